#include "toffe/io/dataset.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "toffe/event/event_file.hpp"
#include "toffe/sim/random.hpp"

namespace toffe::io {

std::vector<SequenceEntry> Manifest::split(const std::string& name) const {
  std::vector<SequenceEntry> out;
  for (const auto& e : sequences) {
    if (e.split == name) out.push_back(e);
  }
  return out;
}

std::vector<SequenceEntry> plan_dataset(const RunConfig& config) {
  const auto& d = config.dataset;
  // Groups keyed by (split, bin, trajectory, shape), in insertion order.
  std::vector<std::vector<SequenceEntry>> groups;
  std::map<std::tuple<std::string, int, int, int>, std::size_t> index;
  auto add = [&](SequenceEntry e) {
    auto key = std::make_tuple(e.split, e.bin, static_cast<int>(e.trajectory), static_cast<int>(e.shape));
    auto [it, fresh] = index.try_emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(std::move(e));
  };
  auto entry = [](const char* split, int bin, ShapeKind shape, TrajectoryKind traj, Sense sense, double ori) {
    SequenceEntry e;
    e.split = split;
    e.bin = bin;
    e.shape = shape;
    e.trajectory = traj;
    e.sense = sense;
    e.orientation_deg = ori;
    return e;
  };
  for (int bin = 1; bin <= config.table.size(); ++bin) {
    for (TrajectoryKind traj : d.train_trajectories)
      for (ShapeKind shape : d.shapes)
        for (Sense sense : d.senses)
          for (double ori : d.orientations) add(entry("train", bin, shape, traj, sense, ori));
    for (TrajectoryKind traj : d.test_trajectories)
      for (ShapeKind shape : d.shapes)
        for (Sense sense : d.senses) add(entry("test", bin, shape, traj, sense, 0.0));
  }

  std::vector<SequenceEntry> out;
  for (auto& g : groups) {
    std::size_t keep = g.size();
    if (d.scale < 1.0) {
      keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(d.scale * static_cast<double>(g.size()))));
      const SequenceEntry& f = g.front();
      Rng rng(derive_seed(config.seed, fmt::format("scale/{}/{}/{}/{}", f.split, f.bin, to_string(f.trajectory),
                                                   to_string(f.shape))));
      for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[rng.below(i)]);
      g.resize(keep);
      std::stable_sort(g.begin(), g.end(), [](const SequenceEntry& a, const SequenceEntry& b) {
        return std::tie(a.sense, a.orientation_deg) < std::tie(b.sense, b.orientation_deg);
      });
    }
    for (auto& e : g) out.push_back(std::move(e));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const SequenceEntry& a, const SequenceEntry& b) { return a.split > b.split; });
  for (auto& e : out) {
    e.id = fmt::format("{}-b{}-{}-{}-{}-o{}", e.split, e.bin, to_string(e.trajectory), to_string(e.shape),
                       to_string(e.sense), static_cast<int>(std::lround(e.orientation_deg)));
    e.seed = derive_seed(config.seed, e.id);
    Rng rng(e.seed);
    e.phase = rng.uniform();
    Trajectory t;
    t.kind = e.trajectory;
    t.radius = d.radius;
    t.sense = e.sense;
    t.orientation_deg = e.orientation_deg;
    e.lap_time = fit_lap_time(t, e.bin, config.table).lap_time;
    e.events_file = "events/" + e.id + ".tofe";
    e.gt_file = "gt/" + e.id + ".csv";
  }
  return out;
}

SequenceSpec sequence_spec(const RunConfig& config, const SequenceEntry& entry) {
  SequenceSpec spec;
  spec.shape = {entry.shape, config.dataset.shape_size};
  spec.trajectory.kind = entry.trajectory;
  spec.trajectory.radius = config.dataset.radius;
  spec.trajectory.lap_time = entry.lap_time;
  spec.trajectory.orientation_deg = entry.orientation_deg;
  spec.trajectory.sense = entry.sense;
  spec.trajectory.phase = entry.phase;
  spec.trajectory.center = {0.0, 0.0, config.dataset.depth};
  spec.duration = config.dataset.duration;
  spec.noise_rate = config.dataset.noise_rate;
  spec.seed = entry.seed;
  return spec;
}

namespace {

namespace pt = boost::property_tree;

template <class T>
T field(const pt::ptree& tree, const std::string& key) {
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_error& e) {
    throw std::runtime_error("manifest: " + std::string(e.what()));
  }
}

}  // namespace

Manifest generate_dataset(const RunConfig& config, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "events");
  fs::create_directories(dir / "gt");
  Manifest m;
  m.seed = config.seed;
  m.scale = config.dataset.scale;
  m.width = config.camera.width;
  m.height = config.camera.height;
  m.sequences = plan_dataset(config);
  for (const SequenceEntry& e : m.sequences) {
    const Sequence seq = generate_sequence(sequence_spec(config, e), config.camera, config.table);
    write_events(dir / e.events_file, seq.events, {config.camera.width, config.camera.height});
    write_ground_truth_csv(dir / e.gt_file, seq.ground_truth);
  }
  pt::ptree tree;
  tree.put("dataset.seed", m.seed);
  tree.put("dataset.scale", m.scale);
  tree.put("dataset.count", m.sequences.size());
  tree.put("dataset.duration_s", config.dataset.duration);
  tree.put("dataset.noise_rate", config.dataset.noise_rate);
  tree.put("camera.width", m.width);
  tree.put("camera.height", m.height);
  tree.put("camera.fx", config.camera.fx);
  tree.put("camera.fy", config.camera.fy);
  tree.put("camera.cx", config.camera.cx);
  tree.put("camera.cy", config.camera.cy);
  tree.put("camera.threshold", config.camera.threshold);
  tree.put("camera.sample_rate", config.camera.sample_rate);
  for (const auto& e : m.sequences) {
    pt::ptree s;
    s.put("split", e.split);
    s.put("bin", e.bin);
    s.put("shape", to_string(e.shape));
    s.put("trajectory", to_string(e.trajectory));
    s.put("sense", to_string(e.sense));
    s.put("orientation_deg", e.orientation_deg);
    s.put("lap_time_s", fmt::format("{}", e.lap_time));
    s.put("phase", fmt::format("{}", e.phase));
    s.put("seed", e.seed);
    s.put("events", e.events_file);
    s.put("ground_truth", e.gt_file);
    tree.add_child(pt::ptree::path_type("seq:" + e.id, '/'), s);
  }
  pt::write_ini((dir / "manifest.ini").string(), tree);
  std::ofstream(dir / "config.ini") << config.source;
  return m;
}

Manifest load_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.ini";
  if (!std::filesystem::exists(path)) throw std::runtime_error("no dataset manifest at " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ptree_error& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
  Manifest m;
  m.seed = field<std::uint64_t>(tree, "dataset.seed");
  m.scale = field<double>(tree, "dataset.scale");
  m.width = field<int>(tree, "camera.width");
  m.height = field<int>(tree, "camera.height");
  for (const auto& [name, s] : tree) {
    if (name.rfind("seq:", 0) != 0) continue;
    SequenceEntry e;
    e.id = name.substr(4);
    e.split = field<std::string>(s, "split");
    e.bin = field<int>(s, "bin");
    e.shape = parse_shape_kind(field<std::string>(s, "shape"));
    e.trajectory = parse_trajectory_kind(field<std::string>(s, "trajectory"));
    e.sense = parse_sense(field<std::string>(s, "sense"));
    e.orientation_deg = field<double>(s, "orientation_deg");
    e.lap_time = field<double>(s, "lap_time_s");
    e.phase = field<double>(s, "phase");
    e.seed = field<std::uint64_t>(s, "seed");
    e.events_file = field<std::string>(s, "events");
    e.gt_file = field<std::string>(s, "ground_truth");
    m.sequences.push_back(std::move(e));
  }
  if (field<std::size_t>(tree, "dataset.count") != m.sequences.size()) {
    throw std::runtime_error("manifest: sequence count does not match entries");
  }
  return m;
}

LabeledSequence load_sequence(const std::filesystem::path& dir, const SequenceEntry& entry) {
  LabeledSequence ls;
  ls.id = entry.id;
  ls.sequence.events = read_events(dir / entry.events_file).events;
  ls.sequence.ground_truth = read_ground_truth_csv(dir / entry.gt_file);
  return ls;
}

std::vector<LabeledSequence> load_sequences(const std::filesystem::path& dir,
                                            const std::vector<SequenceEntry>& entries) {
  std::vector<LabeledSequence> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(load_sequence(dir, e));
  return out;
}

TrainSplit split_training(const Manifest& manifest, int validation_every) {
  TrainSplit s;
  int i = 0;
  for (const auto& e : manifest.split("train")) {
    (++i % validation_every == 0 ? s.validation : s.fit).push_back(e);
  }
  return s;
}

}  // namespace toffe::io
