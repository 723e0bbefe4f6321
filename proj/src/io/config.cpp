#include "toffe/io/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace toffe::io {

namespace pt = boost::property_tree;

namespace {

const char* const kDefaults = R"([run]
seed = 1
models_dir = models

[camera]
width = 64
height = 64
fov_deg = 60
threshold = 0.2
sample_rate = 20000
foreground = 200
background = 50

[window]
dt_us = 500
bins = 5

[dataset]
path = data
duration_s = 0.04
scale = 1.0
noise_rate = 0
shape_size_m = 0.0225
radius_m = 0.09
depth_m = 0.25
shapes = square, circle, diamond, star
train_trajectories = circle, vertical-oval, lemniscate
test_trajectories = test-1, test-2
orientations_deg = 0, 45, 90, 145
senses = anticlockwise, clockwise
validation_every = 8
window_stride = 1

[ofs]
kernel = 5
init_v_th = 1.0
init_leak = 0.9
surrogate = triangle
surrogate_width = 1.0
logit_scale = 4.0
rim_weight = 0.1
negative_weight = 6.0
epochs = 6
batch = 16
lr = 0.005
optimizer = adam

[ofpd]
conv1_channels = 8
conv2_channels = 16
hidden = 64
beta = 1.0
min_active_pixels = 10
epochs = 8
batch = 16
lr = 0.001
optimizer = adam

[cascade]
close_kernel = 5
min_support = 10

[eval]
output = out
dts_us = 500, 1000, 5000
noise_rates = 0, 1000

[infer]
events =
overlays = 0
)";

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
      for (const auto& kv : body) keys_.insert(section + "." + kv.first);
    }
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (auto v = raw(key)) out = convert<T>(key, *v);
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (auto v = raw(key)) out = convert<T>(key, *v);
  }

  template <class T, class Parse>
  void get_list(const std::string& key, std::vector<T>& out, Parse parse) {
    auto v = raw(key);
    if (!v) return;
    std::vector<std::string> parts;
    boost::split(parts, *v, boost::is_any_of(","));
    out.clear();
    for (auto& p : parts) {
      boost::trim(p);
      if (p.empty()) continue;
      try {
        out.push_back(parse(p));
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("{}: bad list item '{}': {}", key, p, e.what()));
      }
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
  }

  void reject_unknown() const {
    for (const auto& k : keys_) {
      if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

 private:
  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!keys_.count(key)) return std::nullopt;
    std::string v = tree_.get<std::string>(pt::ptree::path_type(key, '.'));
    boost::trim(v);
    return v;
  }

  template <class T>
  static T convert(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      T out{};
      if constexpr (std::is_same_v<T, std::string>) {
        return v;
      } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
        return std::filesystem::path(v);
      } else if constexpr (std::is_same_v<T, double>) {
        out = std::stod(v, &pos);
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        out = std::stoull(v, &pos);
      } else {
        out = std::stoi(v, &pos);
      }
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", key, v));
    }
  }

  const pt::ptree& tree_;
  std::set<std::string> keys_;
  std::set<std::string> used_;
};

models::OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return models::OptimizerKind::Adam;
  if (s == "sgd") return models::OptimizerKind::Sgd;
  throw ConfigError("unknown optimizer '" + s + "'");
}

neuro::SurrogateShape parse_surrogate(const std::string& s) {
  if (s == "triangle") return neuro::SurrogateShape::Triangle;
  if (s == "fast-sigmoid") return neuro::SurrogateShape::FastSigmoid;
  throw ConfigError("unknown surrogate '" + s + "'");
}

void read_train(Reader& r, const std::string& section, models::TrainConfig& t) {
  r.get(section + ".epochs", t.epochs);
  r.get(section + ".batch", t.batch);
  r.get(section + ".lr", t.lr);
  std::string opt;
  r.get(section + ".optimizer", opt);
  if (!opt.empty()) t.optimizer = parse_optimizer(opt);
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  try {
    c.camera.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: camera: ") + e.what());
  }
  require(c.fov_deg > 0.0 && c.fov_deg < 180.0, "camera.fov_deg must lie in (0, 180)");
  require(c.window.dt > 0, "window.dt_us must be positive");
  require(c.window.bins >= 1, "window.bins must be >= 1");
  require(c.camera.width % 4 == 0 && c.camera.height % 4 == 0, "camera size must be a multiple of 4");
  require(c.dataset.duration > 0.0, "dataset.duration_s must be positive");
  require(c.dataset.scale > 0.0 && c.dataset.scale <= 1.0, "dataset.scale must lie in (0, 1]");
  require(c.dataset.noise_rate >= 0.0, "dataset.noise_rate must be >= 0");
  require(c.dataset.shape_size > 0.0 && c.dataset.radius > 0.0 && c.dataset.depth > 0.0,
          "dataset geometry must be positive");
  require(c.dataset.validation_every >= 2, "dataset.validation_every must be >= 2");
  require(c.dataset.window_stride >= 1, "dataset.window_stride must be >= 1");
  require(c.ofs.kernel >= 1 && c.ofs.kernel % 2 == 1, "ofs.kernel must be odd");
  require(c.ofs.init_v_th >= 1e-3, "ofs.init_v_th must be >= 1e-3");
  require(c.ofs.init_leak >= 0.0 && c.ofs.init_leak <= 1.0, "ofs.init_leak must lie in [0, 1]");
  require(c.ofs.surrogate.width > 0.0, "ofs.surrogate_width must be positive");
  require(c.ofs.logit_scale > 0.0, "ofs.logit_scale must be positive");
  require(c.ofs_train.rim_weight >= 0.0 && c.ofs_train.negative_weight > 0.0, "ofs loss weights must be valid");
  for (const auto* t : {&c.ofs_train, &c.ofpd_train}) {
    require(t->epochs >= 0 && t->batch >= 1 && t->lr > 0.0, "training epochs, batch and lr must be valid");
  }
  require(c.ofpd.conv1_channels >= 1 && c.ofpd.conv2_channels >= 1 && c.ofpd.hidden >= 1,
          "ofpd sizes must be positive");
  require(c.ofpd.beta >= 0.0, "ofpd.beta must be >= 0");
  require(c.cascade.close_kernel >= 1 && c.cascade.close_kernel % 2 == 1, "cascade.close_kernel must be odd");
  require(c.cascade.min_support >= 0, "cascade.min_support must be >= 0");
  for (auto dt : c.eval.dts) require(dt > 0, "eval.dts_us must be positive");
  for (auto r : c.eval.noise_rates) require(r >= 0.0, "eval.noise_rates must be >= 0");
}

}  // namespace

std::string default_config_text() { return kDefaults; }

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig c;
  c.source = text;
  Reader r(tree);

  r.get("run.seed", c.seed);
  r.get("run.models_dir", c.models_dir);

  r.get("camera.width", c.camera.width);
  r.get("camera.height", c.camera.height);
  r.get("camera.fov_deg", c.fov_deg);
  const CameraModel geometry = CameraModel::with_fov(c.camera.width, c.camera.height, c.fov_deg);
  c.camera.fx = geometry.fx;
  c.camera.fy = geometry.fy;
  c.camera.cx = geometry.cx;
  c.camera.cy = geometry.cy;
  r.get("camera.threshold", c.camera.threshold);
  r.get("camera.sample_rate", c.camera.sample_rate);
  r.get("camera.foreground", c.camera.foreground);
  r.get("camera.background", c.camera.background);

  r.get("window.dt_us", c.window.dt);
  r.get("window.bins", c.window.bins);
  c.window.height = c.camera.height;
  c.window.width = c.camera.width;

  auto& d = c.dataset;
  r.get("dataset.path", d.path);
  r.get("dataset.duration_s", d.duration);
  r.get("dataset.scale", d.scale);
  r.get("dataset.noise_rate", d.noise_rate);
  r.get("dataset.shape_size_m", d.shape_size);
  r.get("dataset.radius_m", d.radius);
  r.get("dataset.depth_m", d.depth);
  r.get_list("dataset.shapes", d.shapes, [](const std::string& s) { return parse_shape_kind(s); });
  r.get_list("dataset.train_trajectories", d.train_trajectories,
             [](const std::string& s) { return parse_trajectory_kind(s); });
  r.get_list("dataset.test_trajectories", d.test_trajectories,
             [](const std::string& s) { return parse_trajectory_kind(s); });
  r.get_list("dataset.orientations_deg", d.orientations, [](const std::string& s) { return std::stod(s); });
  r.get_list("dataset.senses", d.senses, [](const std::string& s) { return parse_sense(s); });
  r.get("dataset.validation_every", d.validation_every);
  r.get("dataset.window_stride", d.window_stride);

  r.get("ofs.kernel", c.ofs.kernel);
  r.get("ofs.init_v_th", c.ofs.init_v_th);
  r.get("ofs.init_leak", c.ofs.init_leak);
  std::string surrogate;
  r.get("ofs.surrogate", surrogate);
  if (!surrogate.empty()) c.ofs.surrogate.shape = parse_surrogate(surrogate);
  r.get("ofs.surrogate_width", c.ofs.surrogate.width);
  r.get("ofs.logit_scale", c.ofs.logit_scale);
  c.ofs_train.epochs = 6;
  c.ofs_train.lr = 0.005;
  c.ofs_train.negative_weight = 6.0;
  r.get("ofs.rim_weight", c.ofs_train.rim_weight);
  r.get("ofs.negative_weight", c.ofs_train.negative_weight);
  read_train(r, "ofs", c.ofs_train);

  c.ofpd.height = c.camera.height;
  c.ofpd.width = c.camera.width;
  r.get("ofpd.conv1_channels", c.ofpd.conv1_channels);
  r.get("ofpd.conv2_channels", c.ofpd.conv2_channels);
  r.get("ofpd.hidden", c.ofpd.hidden);
  r.get("ofpd.beta", c.ofpd.beta);
  r.get("ofpd.min_active_pixels", c.ofpd.min_active_pixels);
  c.ofpd_train.epochs = 8;
  c.ofpd_train.lr = 0.001;
  read_train(r, "ofpd", c.ofpd_train);

  r.get("cascade.close_kernel", c.cascade.close_kernel);
  r.get("cascade.min_support", c.cascade.min_support);

  r.get("eval.output", c.eval.output);
  r.get_list("eval.dts_us", c.eval.dts, [](const std::string& s) { return std::stoull(s); });
  r.get_list("eval.noise_rates", c.eval.noise_rates, [](const std::string& s) { return std::stod(s); });
  r.get("infer.events", c.eval.infer_events);
  int overlays = 0;
  r.get("infer.overlays", overlays);
  c.eval.overlays = overlays != 0;
  r.get("eval.min_accuracy", c.eval.min_accuracy);
  r.get("eval.max_pixE", c.eval.max_pixE);
  r.get("eval.max_dirE", c.eval.max_dirE);
  r.get("eval.max_speedE", c.eval.max_speedE);

  r.reject_unknown();
  c.ofs_train.seed = c.seed;
  c.ofpd_train.seed = c.seed;
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig c = parse_config(text.str());
  const auto base = path.parent_path();
  for (auto* p : {&c.dataset.path, &c.models_dir, &c.eval.output, &c.eval.infer_events}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return c;
}

}  // namespace toffe::io
