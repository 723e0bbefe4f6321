// toffe: dataset generation, training, inference and evaluation.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "toffe/io/pipeline.hpp"

using namespace toffe;

int main(int argc, char** argv) {
  CLI::App app{"Object flow from events: speed-separating SNN cascade with pose and direction estimation"};
  app.require_subcommand(1);

  std::string config_path;
  io::Overrides overrides;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "INI config file")->required();
    cmd->add_option("--scale", overrides.scale, "fraction of the factorial dataset to generate, (0, 1]");
    cmd->add_option("--seed", overrides.seed, "overrides [run] seed");
    cmd->add_option("--dt", overrides.dt, "overrides [window] dt_us");
  };
  auto* gen = app.add_subcommand("gen", "generate the train/test dataset");
  auto* train_ofs = app.add_subcommand("train-ofs", "train the OFS models (all bins, or one with --bin)");
  auto* train_ofpd = app.add_subcommand("train-ofpd", "train the OFPD model");
  auto* infer = app.add_subcommand("infer", "run cascade inference and write object-flow CSVs");
  auto* eval = app.add_subcommand("eval", "evaluate on the test split");
  auto* sweep = app.add_subcommand("sweep", "dt sweep and noise sweep");
  for (auto* c : {gen, train_ofs, train_ofpd, infer, eval, sweep}) add_common(c);
  train_ofs->add_option("--bin", overrides.bin, "speed bin to train");

  CLI11_PARSE(app, argc, argv);

  try {
    io::RunConfig config = io::load_config(config_path);
    io::apply_overrides(config, overrides);
    if (*gen) {
      const io::Manifest m = io::cmd_gen(config);
      std::cout << fmt::format("wrote {} sequences ({} train, {} test) to {}\n", m.sequences.size(),
                               m.split("train").size(), m.split("test").size(), config.dataset.path.string());
    } else if (*train_ofs) {
      io::cmd_train_ofs(config, overrides.bin, &std::cout);
    } else if (*train_ofpd) {
      io::cmd_train_ofpd(config, &std::cout);
    } else if (*infer) {
      io::cmd_infer(config, &std::cout);
    } else if (*eval) {
      const EvalReport report = io::cmd_eval(config, &std::cout);
      const auto violations = io::threshold_violations(config.eval, report);
      for (const auto& v : violations) std::cerr << "threshold violated: " << v << "\n";
      if (!violations.empty()) return 2;
    } else if (*sweep) {
      io::cmd_sweep(config, &std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
