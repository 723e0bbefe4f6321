#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "toffe/sim/camera.hpp"
#include "toffe/sim/sequence.hpp"
#include "toffe/sim/speed_bins.hpp"
#include "toffe/sim/trajectory.hpp"

using namespace toffe;

namespace {

const TrajectoryKind kAllKinds[] = {TrajectoryKind::Circle, TrajectoryKind::Lemniscate, TrajectoryKind::VerticalOval,
                                    TrajectoryKind::Test1, TrajectoryKind::Test2};

Trajectory make(TrajectoryKind kind, double lap = 0.1, Sense sense = Sense::Anticlockwise, double ori = 0.0) {
  Trajectory t;
  t.kind = kind;
  t.lap_time = lap;
  t.sense = sense;
  t.orientation_deg = ori;
  return t;
}

}  // namespace

TEST_CASE("speed_to_bin uses the published ranges, lower bound inclusive") {
  const auto table = SpeedBinTable::standard();
  CHECK(speed_to_bin(10.0, table) == 1);
  CHECK(speed_to_bin(50.0, table) == 3);
  CHECK(speed_to_bin(18.0, table) == 2);
  CHECK(speed_to_bin(17.999, table) == 1);
  CHECK(speed_to_bin(84.0, table) == 4);
  CHECK(speed_to_bin(499.0, table) == 4);
  CHECK(speed_to_bin(0.5, table) == 0);
  CHECK(speed_to_bin(0.0, table) == 0);
  CHECK_THROWS_AS(speed_to_bin(500.0, table), SpeedOutOfRange);
  CHECK_THROWS_AS(speed_to_bin(1e6, table), SpeedOutOfRange);
}

TEST_CASE("representative speeds are midpoints of the programmed ranges") {
  const auto table = SpeedBinTable::standard();
  CHECK(table.representative_speed(1) == doctest::Approx((1.0 + 18.0) / 2));
  CHECK(table.representative_speed(2) == doctest::Approx((18.0 + 42.0) / 2));
  CHECK(table.representative_speed(3) == doctest::Approx((42.0 + 84.0) / 2));
  CHECK(table.representative_speed(4) == doctest::Approx((84.0 + 144.0) / 2));
  CHECK(table.programmed_max() == 144.0);
}

TEST_CASE("speed bin tables must be contiguous and increasing") {
  CHECK_THROWS(SpeedBinTable({{1, 18}, {20, 42}}));
  CHECK_THROWS(SpeedBinTable({{18, 1}}));
  CHECK_THROWS(SpeedBinTable({}));
}

TEST_CASE("circle starts on the x axis with tangential speed 2 pi R / T") {
  const Trajectory t = make(TrajectoryKind::Circle, 0.2);
  const TrajectoryState s = trajectory_state(t, 0.0);
  CHECK(s.position.x == doctest::Approx(t.center.x + t.radius));
  CHECK(s.position.y == doctest::Approx(t.center.y));
  CHECK(s.position.z == doctest::Approx(t.center.z));
  CHECK(norm(s.velocity) == doctest::Approx(2.0 * kPi * t.radius / 0.2));
  CHECK(s.velocity.x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trajectories are periodic and velocities match finite differences") {
  for (TrajectoryKind kind : kAllKinds) {
    for (Sense sense : {Sense::Anticlockwise, Sense::Clockwise}) {
      const Trajectory t = make(kind, 0.05, sense, 45.0);
      CAPTURE(to_string(kind));
      const Vec3 p0 = trajectory_state(t, 0.0).position;
      const Vec3 p1 = trajectory_state(t, 0.05).position;
      CHECK(norm(p1 - p0) < 1e-12);
      for (int i = 0; i < 64; ++i) {
        const double time = 0.05 * (i + 0.37) / 64.0;
        const double h = 1e-7;
        const Vec3 fd = (1.0 / (2 * h)) * (trajectory_state(t, time + h).position - trajectory_state(t, time - h).position);
        const Vec3 v = trajectory_state(t, time).velocity;
        CHECK(norm(fd - v) <= 1e-6 * std::max(1.0, norm(v)));
      }
    }
  }
}

TEST_CASE("doubling the lap time halves every speed exactly") {
  for (TrajectoryKind kind : kAllKinds) {
    const Trajectory a = make(kind, 0.1), b = make(kind, 0.2);
    for (int i = 0; i < 32; ++i) {
      const double s = i / 32.0;
      CHECK(norm(trajectory_state(b, 0.2 * s).velocity) ==
            doctest::Approx(0.5 * norm(trajectory_state(a, 0.1 * s).velocity)).epsilon(1e-14));
    }
  }
}

TEST_CASE("clockwise retraces the anticlockwise path backwards") {
  for (TrajectoryKind kind : kAllKinds) {
    const Trajectory a = make(kind, 0.1), c = make(kind, 0.1, Sense::Clockwise);
    for (int i = 1; i < 16; ++i) {
      const double t = 0.1 * i / 16.0;
      CHECK(norm(trajectory_state(a, t).position - trajectory_state(c, 0.1 - t).position) < 1e-12);
    }
  }
}

TEST_CASE("infinite lap time gives a static object") {
  Trajectory t = make(TrajectoryKind::Circle, INFINITY);
  CHECK(norm(trajectory_state(t, 0.3).velocity) == 0.0);
  CHECK(trajectory_state(t, 0.0).position == trajectory_state(t, 5.0).position);
}

TEST_CASE("fitted lap times keep every speed sample inside the bin") {
  const auto table = SpeedBinTable::standard();
  for (TrajectoryKind kind : kAllKinds) {
    for (int bin = 1; bin <= 4; ++bin) {
      CAPTURE(to_string(kind));
      CAPTURE(bin);
      const LapTimeFit fit = fit_lap_time(make(kind), bin, table);
      CHECK(fit.fraction_outside < 0.02);
      Trajectory t = make(kind, fit.lap_time);
      int outside = 0;
      for (int i = 0; i < 1000; ++i) {
        if (speed_to_bin(norm(trajectory_state(t, fit.lap_time * i / 1000.0).velocity), table) != bin) ++outside;
      }
      CHECK(outside < 20);
    }
  }
}

TEST_CASE("objects behind the camera render an empty frame") {
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  const IntensityFrame f = render_intensity({ShapeKind::Circle, 0.05}, {0.0, 0.0, -0.5}, cam);
  for (double v : f.values) CHECK(v == cam.background);
}

TEST_CASE("centered circle covers pi r^2 pixels up to a boundary band") {
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  for (double size : {0.03, 0.05, 0.08, 0.12}) {
    const IntensityFrame f = render_intensity({ShapeKind::Circle, size}, {0.0, 0.0, 0.5}, cam);
    const double r = cam.fx * size / 0.5;
    std::size_t n = 0;
    for (double v : f.values) n += v == cam.foreground;
    // pixel-center sampling only misclassifies pixels cut by the boundary
    CHECK(std::abs(static_cast<double>(n) - kPi * r * r) <= 0.3 * 2 * kPi * r);
  }
}

TEST_CASE("square silhouette bounding box matches hand projection") {
  CameraModel cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 32.0;
  // center projects to (32 + 100*0.05/0.5, 32) = (42, 32); half side 100*0.04/0.5 = 8 px
  const IntensityFrame f = render_intensity({ShapeKind::Square, 0.04}, {0.05, 0.0, 0.5}, cam);
  int xmin = 99, xmax = -1, ymin = 99, ymax = -1;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (f.at(x, y) == cam.foreground) {
        xmin = std::min(xmin, x), xmax = std::max(xmax, x), ymin = std::min(ymin, y), ymax = std::max(ymax, y);
      }
  // pixel centers x + 0.5 in [34, 50] -> x in [34, 49]; rows likewise [24, 39]
  CHECK(xmin == 34);
  CHECK(xmax == 49);
  CHECK(ymin == 24);
  CHECK(ymax == 39);
}

TEST_CASE("emit_events rules") {
  const CameraModel cam = CameraModel::with_fov(16, 16, 60);
  IntensityFrame a{16, 16, std::vector<double>(256, 50.0)};
  CHECK(emit_events(a, a, 10, 0.2).empty());

  IntensityFrame b = a;
  b.values[3 * 16 + 5] = 200.0;
  const EventStream one = emit_events(a, b, 10, 0.2);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Event{5, 3, 10, Polarity::On});
  const EventStream back = emit_events(b, a, 20, 0.2);
  REQUIRE(back.size() == 1);
  CHECK(back[0].p == Polarity::Off);

  CHECK(emit_events(a, b, 10, 1e9).empty());
  b.values[0] = 0.0;
  CHECK_THROWS_AS(emit_events(a, b, 10, 0.2), std::domain_error);
  IntensityFrame c{8, 8, std::vector<double>(64, 50.0)};
  CHECK_THROWS_AS(emit_events(a, c, 10, 0.2), std::invalid_argument);
  (void)cam;
}

TEST_CASE("translating square emits only edge events, matching a per-pixel oracle") {
  CameraModel cam;
  cam.fx = cam.fy = 100.0;
  const double step = 1.0 / 100.0 * 0.5;  // 1 px at depth 0.5
  const Shape sq{ShapeKind::Square, 0.03};
  const IntensityFrame f0 = render_intensity(sq, {0.0, 0.0, 0.5}, cam);
  const IntensityFrame f1 = render_intensity(sq, {step, 0.0, 0.5}, cam);
  const EventStream ev = emit_events(f0, f1, 50, cam.threshold);
  std::size_t oracle = 0;
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x)
      if (std::abs(std::log(f1.at(x, y)) - std::log(f0.at(x, y))) >= cam.threshold) ++oracle;
  CHECK(ev.size() == oracle);
  CHECK(ev.size() == 2 * 6 * 2);  // 6 px half side -> 12 rows, one ON and one OFF column
  for (const Event& e : ev) {
    const bool leading = f1.at(e.x, e.y) == cam.foreground;
    CHECK((e.p == Polarity::On) == leading);
  }
}

TEST_CASE("static object without noise emits nothing") {
  const auto table = SpeedBinTable::standard();
  const CameraModel cam = CameraModel::with_fov(32, 32, 60);
  SequenceSpec spec;
  spec.trajectory.lap_time = INFINITY;
  spec.duration = 0.01;
  const Sequence s = generate_sequence(spec, cam, table);
  CHECK(s.events.empty());
  CHECK(s.ground_truth.size() == 201);
  for (const auto& g : s.ground_truth) {
    CHECK(g.speed == 0.0);
    CHECK(g.speed_bin == 0);
  }
}

TEST_CASE("generated sequences are time sorted with ground truth at the sample rate") {
  const auto table = SpeedBinTable::standard();
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  SequenceSpec spec;
  spec.trajectory.kind = TrajectoryKind::Lemniscate;
  spec.trajectory.lap_time = fit_lap_time(spec.trajectory, 2, table).lap_time;
  spec.duration = 0.01;
  spec.noise_rate = 5000;
  spec.seed = 11;
  const Sequence s = generate_sequence(spec, cam, table);
  CHECK(is_time_sorted(s.events));
  CHECK_FALSE(s.events.empty());
  for (std::size_t i = 0; i < s.ground_truth.size(); ++i) CHECK(s.ground_truth[i].t == 50 * i);
  const Sequence again = generate_sequence(spec, cam, table);
  CHECK(again.events == s.events);
}

TEST_CASE("a bin-2 lemniscate lap stays in bin 2 for at least 98% of samples") {
  const auto table = SpeedBinTable::standard();
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  SequenceSpec spec;
  spec.trajectory.kind = TrajectoryKind::Lemniscate;
  spec.trajectory.lap_time = fit_lap_time(spec.trajectory, 2, table).lap_time;
  spec.duration = spec.trajectory.lap_time;
  const Sequence s = generate_sequence(spec, cam, table);
  std::size_t in_bin = 0;
  for (const auto& g : s.ground_truth) in_bin += g.speed_bin == 2;
  CHECK(static_cast<double>(in_bin) >= 0.98 * static_cast<double>(s.ground_truth.size()));
}

TEST_CASE("ground-truth direction agrees with finite differences of the projected center") {
  const auto table = SpeedBinTable::standard();
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  for (TrajectoryKind kind : kAllKinds) {
    Trajectory t = make(kind, 0.05, Sense::Clockwise, 90.0);
    for (int i = 0; i < 50; ++i) {
      const double time = 0.05 * (i + 0.5) / 50.0;
      const double h = 1e-7;
      const Vec2 a = *project(cam, trajectory_state(t, time - h).position);
      const Vec2 b = *project(cam, trajectory_state(t, time + h).position);
      const double fd = std::atan2(b.y - a.y, b.x - a.x);
      const GroundTruthSample g = ground_truth_at(t, cam, table, time);
      CHECK(std::abs(wrap_angle(g.direction - fd)) < 1e-3);
      CHECK(g.direction >= -kPi);
      CHECK(g.direction < kPi);
    }
  }
}

TEST_CASE("noise injection follows Poisson statistics") {
  EventStream ev;
  inject_noise(ev, {64, 64}, 0, 1000000, 1e4, 5);
  CHECK(std::abs(static_cast<double>(ev.size()) - 1e4) <= 3.0 * std::sqrt(1e4));
  CHECK(is_time_sorted(ev));
  std::size_t on = 0;
  for (const Event& e : ev) {
    CHECK(e.x < 64);
    CHECK(e.y < 64);
    CHECK(e.t < 1000000);
    on += e.p == Polarity::On;
  }
  CHECK(std::abs(static_cast<double>(on) - ev.size() / 2.0) <= 4.0 * std::sqrt(ev.size() / 4.0));

  EventStream signal{{1, 1, 100, Polarity::On}, {2, 2, 900000, Polarity::Off}};
  inject_noise(signal, {64, 64}, 0, 1000000, 1e3, 6);
  CHECK(is_time_sorted(signal));
  CHECK(std::count(signal.begin(), signal.end(), Event{1, 1, 100, Polarity::On}) == 1);
}

TEST_CASE("ground truth CSV round trip and lookup") {
  const auto dir = test::scratch("gt_csv");
  const auto table = SpeedBinTable::standard();
  const CameraModel cam = CameraModel::with_fov(64, 64, 60);
  SequenceSpec spec;
  spec.trajectory.lap_time = fit_lap_time(spec.trajectory, 3, table).lap_time;
  spec.duration = 0.002;
  const Sequence s = generate_sequence(spec, cam, table);
  write_ground_truth_csv(dir / "gt.csv", s.ground_truth);
  const auto back = read_ground_truth_csv(dir / "gt.csv");
  REQUIRE(back.size() == s.ground_truth.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == s.ground_truth[i].t);
    CHECK(back[i].center_px.x == s.ground_truth[i].center_px.x);
    CHECK(back[i].speed == s.ground_truth[i].speed);
    CHECK(back[i].direction == s.ground_truth[i].direction);
    CHECK(back[i].speed_bin == 3);
  }
  CHECK(ground_truth_near(back, 74).t == 50);
  CHECK(ground_truth_near(back, 76).t == 100);
  CHECK_THROWS_AS(ground_truth_near(back, 1000000), std::out_of_range);
  CHECK_THROWS_AS(ground_truth_near({}, 0), std::out_of_range);
}

TEST_CASE("derived seeds are stable and label dependent") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}
