#include "toffe/io/pipeline.hpp"

#include <fstream>

#include <fmt/format.h>

#include "toffe/event/event_file.hpp"
#include "toffe/io/overlay.hpp"
#include "toffe/neuro/checkpoint.hpp"
#include "toffe/sim/random.hpp"

namespace toffe::io {

namespace fs = std::filesystem;

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.scale) {
    if (!(*o.scale > 0.0 && *o.scale <= 1.0)) throw ConfigError("--scale must lie in (0, 1]");
    config.dataset.scale = *o.scale;
  }
  if (o.seed) {
    config.seed = *o.seed;
    config.ofs_train.seed = *o.seed;
    config.ofpd_train.seed = *o.seed;
  }
  if (o.dt) {
    if (*o.dt == 0) throw ConfigError("--dt must be positive");
    config.window.dt = *o.dt;
  }
  if (o.bin && (*o.bin < 1 || *o.bin > config.table.size())) {
    throw ConfigError(fmt::format("--bin must lie in [1, {}]", config.table.size()));
  }
}

fs::path model_dir(const RunConfig& config, std::uint64_t dt) { return config.models_dir / fmt::format("dt{}", dt); }

fs::path ofs_checkpoint_path(const RunConfig& config, std::uint64_t dt, int bin) {
  return model_dir(config, dt) / fmt::format("ofs_bin{}.ckpt", bin);
}

fs::path ofpd_checkpoint_path(const RunConfig& config, std::uint64_t dt) {
  return model_dir(config, dt) / "ofpd.ckpt";
}

namespace {

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << "\n" << std::flush;
}

void store_config(const RunConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "config.ini") << config.source;
}

Manifest require_dataset(const RunConfig& config) {
  if (!fs::exists(config.dataset.path / "manifest.ini")) {
    throw std::runtime_error("dataset not found at " + config.dataset.path.string() + " (run `toffe gen` first)");
  }
  return load_manifest(config.dataset.path);
}

double object_radius_px(const RunConfig& config) {
  double r = 0.0;
  for (ShapeKind k : config.dataset.shapes) {
    r = std::max(r, silhouette_radius_px({k, config.dataset.shape_size}, config.camera, config.dataset.depth));
  }
  return r;
}

template <class T>
std::vector<T> strided(std::vector<T> all, int stride) {
  if (stride <= 1) return all;
  std::vector<T> out;
  for (std::size_t i = 0; i < all.size(); i += static_cast<std::size_t>(stride)) out.push_back(std::move(all[i]));
  return out;
}

}  // namespace

Manifest cmd_gen(const RunConfig& config) {
  Manifest m = generate_dataset(config, config.dataset.path);
  return m;
}

std::vector<models::OfsExample> ofs_examples(const RunConfig& config, const std::vector<LabeledSequence>& seqs,
                                             int bin, int stride) {
  std::vector<models::OfsExample> out;
  const double radius = object_radius_px(config);
  for (const auto& s : seqs) {
    for (auto& ex : strided(models::build_ofs_targets(s.sequence, bin, config.table, config.window, radius), stride)) {
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<models::OfpdExample> ofpd_examples(const RunConfig& config, const std::vector<LabeledSequence>& seqs,
                                               int stride) {
  std::vector<models::OfpdExample> out;
  const double radius = object_radius_px(config);
  for (const auto& s : seqs) {
    for (auto& ex : strided(models::build_ofpd_examples(s.sequence, config.window, radius), stride)) {
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<OfsTrainResult> cmd_train_ofs(const RunConfig& config, std::optional<int> bin, std::ostream* log) {
  const Manifest manifest = require_dataset(config);
  const TrainSplit split = split_training(manifest, config.dataset.validation_every);
  const auto fit = load_sequences(config.dataset.path, split.fit);
  const auto val = load_sequences(config.dataset.path, split.validation);
  const fs::path dir = model_dir(config, config.window.dt);
  store_config(config, dir);

  std::vector<int> bins;
  if (bin) {
    bins.push_back(*bin);
  } else {
    for (int k = config.table.size(); k >= 1; --k) bins.push_back(k);
  }
  std::vector<OfsTrainResult> results;
  for (int k : bins) {
    const auto train = ofs_examples(config, fit, k, config.dataset.window_stride);
    const auto valid = ofs_examples(config, val, k, 1);
    models::OfsModel model(k, config.ofs, derive_seed(config.seed, fmt::format("ofs/{}/{}", config.window.dt, k)));
    models::TrainLog tlog = models::train_ofs(model, train, valid, config.ofs_train);
    model.round_to_float();
    neuro::save_checkpoint(ofs_checkpoint_path(config, config.window.dt, k), model.to_checkpoint());
    models::write_training_curve(dir / fmt::format("ofs_bin{}_curve.csv", k), tlog);
    say(log, fmt::format("ofs bin {}: {} examples, val loss {:.4f} -> {:.4f}, spike rate {:.4f}", k, train.size(),
                         tlog.initial_val_loss(), tlog.final_val_loss(), tlog.epochs.back().spike_rate));
    results.push_back({std::move(model), std::move(tlog)});
  }
  return results;
}

OfpdTrainResult cmd_train_ofpd(const RunConfig& config, std::ostream* log) {
  const Manifest manifest = require_dataset(config);
  const TrainSplit split = split_training(manifest, config.dataset.validation_every);
  const auto train = ofpd_examples(config, load_sequences(config.dataset.path, split.fit), config.dataset.window_stride);
  const auto valid = ofpd_examples(config, load_sequences(config.dataset.path, split.validation), 1);
  const fs::path dir = model_dir(config, config.window.dt);
  store_config(config, dir);
  models::OfpdModel model(config.ofpd, derive_seed(config.seed, fmt::format("ofpd/{}", config.window.dt)));
  models::TrainLog tlog = models::train_ofpd(model, train, valid, config.ofpd_train);
  model.round_to_float();
  neuro::save_checkpoint(ofpd_checkpoint_path(config, config.window.dt), model.to_checkpoint());
  models::write_training_curve(dir / "ofpd_curve.csv", tlog);
  const auto& last = tlog.epochs.back();
  say(log, fmt::format("ofpd: {} examples, val loss {:.4f} -> {:.4f}, pixE {:.2f} px, dirE {:.2f} deg", train.size(),
                       tlog.initial_val_loss(), last.val_loss, last.pix_error, last.dir_error));
  return {std::move(model), std::move(tlog)};
}

CascadeModels load_models(const RunConfig& config, std::uint64_t dt) {
  CascadeModels m;
  for (int k = config.table.size(); k >= 1; --k) {
    const fs::path p = ofs_checkpoint_path(config, dt, k);
    if (!fs::exists(p)) throw std::runtime_error("missing OFS checkpoint " + p.string());
    m.ofs.push_back(models::OfsModel::from_checkpoint(neuro::load_checkpoint(p)));
  }
  const fs::path p = ofpd_checkpoint_path(config, dt);
  if (!fs::exists(p)) throw std::runtime_error("missing OFPD checkpoint " + p.string());
  m.ofpd = models::OfpdModel::from_checkpoint(neuro::load_checkpoint(p));
  return m;
}

std::size_t cmd_infer(const RunConfig& config, std::ostream* log) {
  CascadeModels models = load_models(config, config.window.dt);
  const fs::path out_dir = config.eval.output / "infer";
  store_config(config, out_dir);

  std::vector<std::pair<std::string, EventFile>> streams;
  if (!config.eval.infer_events.empty()) {
    streams.emplace_back(config.eval.infer_events.stem().string(), read_events(config.eval.infer_events));
  } else {
    const Manifest manifest = require_dataset(config);
    for (const auto& e : manifest.split("test")) {
      streams.emplace_back(e.id, read_events(config.dataset.path / e.events_file));
    }
  }

  std::size_t rows = 0;
  const auto& w = config.window;
  for (const auto& [name, file] : streams) {
    if (file.sensor.width != w.width || file.sensor.height != w.height) {
      throw std::runtime_error(fmt::format("{}: sensor {}x{} differs from configured {}x{}", name,
                                           file.sensor.width, file.sensor.height, w.width, w.height));
    }
    std::ofstream csv(out_dir / (name + ".csv"));
    if (!csv) throw std::runtime_error("cannot write inference output for " + name);
    csv << "t_start_us,dt_us,bin,cx,cy,dir_rad,rep_speed,support\n";
    const auto& ev = file.events;
    const std::uint64_t t_end = ev.empty() ? 0 : ev.back().t + 1;
    for (std::uint64_t t0 : models::tile_windows(0, t_end, w.dt)) {
      const auto [first, last] = window_range(ev, t0, w.dt);
      const BinnedVolume volume = bin_events(std::span<const Event>(ev.data() + first, last - first), t0, w.dt,
                                             w.bins, w.height, w.width);
      CascadeTrace trace;
      const auto flows = cascade_infer(volume, models.ofs, *models.ofpd, config.table, config.cascade, &trace);
      for (const ObjectFlow& f : flows) {
        csv << fmt::format("{},{},{},{},{},{},{},{}\n", t0, w.dt, f.speed_bin, f.center.x, f.center.y, f.direction,
                           f.representative_speed, f.support);
        ++rows;
      }
      if (config.eval.overlays) {
        const fs::path odir = out_dir / name;
        fs::create_directories(odir);
        write_ppm(odir / fmt::format("w{:08}.ppm", t0),
                  render_overlay(volume, trace, flows, config.cascade.close_kernel));
      }
    }
    say(log, fmt::format("{}: {} windows", name, models::tile_windows(0, t_end, w.dt).size()));
  }
  say(log, fmt::format("wrote {} object-flow rows to {}", rows, out_dir.string()));
  return rows;
}

EvalReport cmd_eval(const RunConfig& config, std::ostream* log) {
  const Manifest manifest = require_dataset(config);
  CascadeModels models = load_models(config, config.window.dt);
  const auto test = load_sequences(config.dataset.path, manifest.split("test"));
  EvalReport report = evaluate(test, models, config.table, config.window, config.cascade);
  const fs::path out = config.eval.output / "eval";
  store_config(config, out);
  write_report_csv(out / fmt::format("report_dt{}.csv", config.window.dt), report);
  write_windows_csv(out / fmt::format("windows_dt{}.csv", config.window.dt), report);
  say(log, fmt::format("dt {} us: {} windows, bin accuracy {:.3f}, pixE {:.3f} px, dirE {:.3f} deg, speedE {:.3f} m/s",
                       report.dt, report.windows, report.bin_accuracy, report.pixE, report.dirE, report.speedE));
  return report;
}

std::vector<std::string> threshold_violations(const EvalConfig& eval, const EvalReport& r) {
  std::vector<std::string> out;
  if (eval.min_accuracy && r.bin_accuracy < *eval.min_accuracy) {
    out.push_back(fmt::format("bin accuracy {:.3f} < {}", r.bin_accuracy, *eval.min_accuracy));
  }
  if (eval.max_pixE && r.pixE > *eval.max_pixE) out.push_back(fmt::format("pixE {:.3f} > {}", r.pixE, *eval.max_pixE));
  if (eval.max_dirE && r.dirE > *eval.max_dirE) out.push_back(fmt::format("dirE {:.3f} > {}", r.dirE, *eval.max_dirE));
  if (eval.max_speedE && r.speedE > *eval.max_speedE) {
    out.push_back(fmt::format("speedE {:.3f} > {}", r.speedE, *eval.max_speedE));
  }
  return out;
}

SweepResult cmd_sweep(const RunConfig& config, std::ostream* log) {
  const Manifest manifest = require_dataset(config);
  const auto test = load_sequences(config.dataset.path, manifest.split("test"));
  std::map<std::uint64_t, CascadeModels> per_dt;
  for (std::uint64_t dt : config.eval.dts) per_dt.emplace(dt, load_models(config, dt));
  SweepResult r;
  r.dt_reports = dt_sweep(test, config.eval.dts, per_dt, config.table, config.window, config.cascade);

  CascadeModels& base = per_dt.count(config.window.dt) ? per_dt.at(config.window.dt)
                                                       : per_dt.emplace(config.window.dt, load_models(config, config.window.dt)).first->second;
  r.noise_reports = noise_sweep(test, config.eval.noise_rates, base, config.table, config.window, config.seed,
                                config.cascade);

  const fs::path out = config.eval.output / "sweep";
  store_config(config, out);
  std::vector<SweepRow> rows;
  for (const auto& rep : r.dt_reports) rows.push_back(sweep_row(rep));
  write_sweep_csv(out / "sweep.csv", rows);
  {
    std::ofstream csv(out / "noise.csv");
    csv << "noise_rate,bin_accuracy,pixE,dirE,speedE,mean_spike_pixels\n";
    for (const auto& rep : r.noise_reports) {
      csv << fmt::format("{},{},{},{},{},{}\n", rep.noise_rate, rep.bin_accuracy, rep.pixE, rep.dirE, rep.speedE,
                         rep.mean_spike_pixels);
    }
  }
  if (log) {
    print_sweep(*log, rows);
    *log << fmt::format("{:>8} {:>10.3f} {:>10.3f} {:>10.3f}  (published reference)\n", "ref500",
                        kReferenceDt500.pixE, kReferenceDt500.dirE, kReferenceDt500.speedE);
    for (const auto& rep : r.noise_reports) {
      *log << fmt::format("noise {:>8} ev/s: bin accuracy {:.3f}, spike pixels/window {:.1f}\n", rep.noise_rate,
                          rep.bin_accuracy, rep.mean_spike_pixels);
    }
  }
  return r;
}

}  // namespace toffe::io
