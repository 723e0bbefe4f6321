#include <doctest.h>

#include <array>
#include <cstring>
#include <fstream>

#include "helpers.hpp"
#include "toffe/event/binning.hpp"
#include "toffe/event/event_file.hpp"

using namespace toffe;

namespace {

EventStream random_events(Rng& rng, std::size_t n, int w, int h, std::uint64_t t_max) {
  EventStream ev(n);
  for (auto& e : ev) {
    e.x = static_cast<std::uint16_t>(rng.below(w));
    e.y = static_cast<std::uint16_t>(rng.below(h));
    e.t = rng.below(t_max);
    e.p = rng.below(2) ? Polarity::On : Polarity::Off;
  }
  std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  return ev;
}

std::vector<unsigned char> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("bin_index follows floor((t - t0) * B / dt) with clamping") {
  CHECK(bin_index(1000, 1000, 500, 5) == 0);
  CHECK(bin_index(1099, 1000, 500, 5) == 0);
  CHECK(bin_index(1100, 1000, 500, 5) == 1);
  CHECK(bin_index(1499, 1000, 500, 5) == 4);
  // 7 bins over 100 us: boundaries at multiples of 100/7
  for (std::uint64_t t = 0; t < 100; ++t) {
    const int expect = static_cast<int>((t * 7) / 100);
    CHECK(bin_index(t, 0, 100, 7) == expect);
  }
}

TEST_CASE("bin_events skips out-of-window events and places the rest") {
  EventStream ev{{1, 2, 99, Polarity::On}, {1, 2, 100, Polarity::On}, {3, 0, 150, Polarity::Off},
                 {0, 3, 199, Polarity::On}, {2, 2, 200, Polarity::On}};
  const BinnedVolume v = bin_events(ev, 100, 100, 2, 4, 4);
  CHECK(v.total() == 3);
  CHECK(v.at(0, 1, 2, 1) == 1);
  CHECK(v.at(1, 0, 0, 3) == 1);
  CHECK(v.at(1, 1, 3, 0) == 1);
  CHECK(v.t_start() == 100);
  CHECK(v.dt() == 100);
}

TEST_CASE("bin_events reports the first off-grid event") {
  EventStream ev{{0, 0, 5, Polarity::On}, {9, 0, 6, Polarity::On}};
  try {
    bin_events(ev, 0, 10, 2, 4, 4);
    FAIL("expected BinningError");
  } catch (const BinningError& e) {
    CHECK(e.event_index() == 1);
  }
}

TEST_CASE("binning conserves counts and matches a per-event oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(20)), h = 1 + static_cast<int>(rng.below(20));
    const int bins = 1 + static_cast<int>(rng.below(9));
    const std::uint64_t dt = 1 + rng.below(2000);
    const std::uint64_t t0 = rng.below(500);
    const auto ev = random_events(rng, 2000, w, h, 3000);
    const BinnedVolume v = bin_events(ev, t0, dt, bins, h, w);
    std::vector<std::uint32_t> oracle(v.counts().size(), 0);
    std::size_t in_window = 0;
    for (const Event& e : ev) {
      if (e.t < t0 || e.t >= t0 + dt) continue;
      ++in_window;
      const long double frac = static_cast<long double>(e.t - t0) * bins / static_cast<long double>(dt);
      const int b = std::min(bins - 1, static_cast<int>(frac));
      oracle[((static_cast<std::size_t>(b) * 2 + static_cast<int>(e.p)) * h + e.y) * w + e.x] += 1;
    }
    CHECK(v.total() == in_window);
    CHECK(v.counts() == oracle);
    const auto [first, last] = window_range(ev, t0, dt);
    CHECK(last - first == in_window);
  }
}

TEST_CASE("event file header and record layout are bit exact") {
  const auto dir = test::scratch("event_layout");
  EventStream ev{{0x0102, 0x0304, 0x0A0B0C0D0E0F1011ULL, Polarity::On}};
  write_events(dir / "a.tofe", ev, {640, 480});
  const auto b = file_bytes(dir / "a.tofe");
  const std::vector<unsigned char> expect{
      'T', 'O', 'F', 'E', 1, 0, 0, 0,                                  // magic, version
      0x80, 0x02, 0xE0, 0x01,                                          // 640, 480
      1, 0, 0, 0, 0, 0, 0, 0,                                          // count
      0x02, 0x01, 0x04, 0x03,                                          // x, y
      0x11, 0x10, 0x0F, 0x0E, 0x0D, 0x0C, 0x0B, 0x0A,                  // t
      1};                                                              // polarity
  CHECK(b == expect);
}

TEST_CASE("event file round trip") {
  const auto dir = test::scratch("event_roundtrip");
  Rng rng(3);
  const auto ev = random_events(rng, 5000, 64, 48, 1000000);
  write_events(dir / "r.tofe", ev, {64, 48});
  const EventFile f = read_events(dir / "r.tofe");
  CHECK(f.sensor == SensorSize{64, 48});
  CHECK(f.events == ev);

  write_events(dir / "empty.tofe", {}, {64, 48});
  CHECK(read_events(dir / "empty.tofe").events.empty());
}

TEST_CASE("event file errors") {
  const auto dir = test::scratch("event_errors");
  EventStream ev{{1, 1, 10, Polarity::On}, {2, 2, 20, Polarity::Off}};
  write_events(dir / "ok.tofe", ev, {8, 8});
  const auto good = file_bytes(dir / "ok.tofe");

  auto kind_of = [&](const std::vector<unsigned char>& bytes) {
    write_bytes(dir / "bad.tofe", bytes);
    try {
      read_events(dir / "bad.tofe");
    } catch (const EventFileError& e) {
      return e.kind();
    }
    FAIL("expected EventFileError");
    return EventFileError::Kind::Io;
  };

  auto bad = good;
  bad[0] = 'X';
  CHECK(kind_of(bad) == EventFileError::Kind::BadMagic);
  bad = good;
  bad[4] = 2;
  CHECK(kind_of(bad) == EventFileError::Kind::BadVersion);
  bad = good;
  bad.resize(good.size() - 1);
  CHECK(kind_of(bad) == EventFileError::Kind::Truncated);
  bad = std::vector<unsigned char>(good.begin(), good.begin() + 10);
  CHECK(kind_of(bad) == EventFileError::Kind::Truncated);
  bad = good;
  bad.push_back(0);
  CHECK(kind_of(bad) == EventFileError::Kind::BadRecord);
  bad = good;
  bad[20 + 13 + 4] = 0;  // second timestamp 20 -> 0
  CHECK(kind_of(bad) == EventFileError::Kind::Unsorted);
  bad = good;
  bad[20 + 12] = 7;  // polarity byte
  CHECK(kind_of(bad) == EventFileError::Kind::BadRecord);

  EventStream unsorted{{1, 1, 10, Polarity::On}, {1, 1, 5, Polarity::On}};
  CHECK_THROWS_AS(write_events(dir / "u.tofe", unsorted, {8, 8}), EventFileError);
  try {
    read_events(dir / "missing.tofe");
    FAIL("expected Io error");
  } catch (const EventFileError& e) {
    CHECK(e.kind() == EventFileError::Kind::Io);
  }
}
