#include <doctest.h>

#include "toffe/cascade/cascade.hpp"
#include "toffe/cascade/morphology.hpp"
#include "toffe/sim/random.hpp"

using namespace toffe;
using namespace toffe::models;

namespace {

BinaryGrid random_grid(int h, int w, std::uint64_t seed, double p) {
  BinaryGrid g(h, w);
  Rng rng(seed);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, rng.uniform() < p);
  return g;
}

BinaryGrid naive_dilate(const BinaryGrid& g, int k) {
  BinaryGrid out(g.height(), g.width());
  const int r = k / 2;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy >= 0 && yy < g.height() && xx >= 0 && xx < g.width() && g(yy, xx)) out.set(y, x, true);
        }
  return out;
}

// Erosion with everything outside the grid counted as 0 would eat the border
// after a dilation that could not extend past it; the closing is computed on
// a grid padded by k so that it is a true closing of the zero-extended image.
BinaryGrid naive_close(const BinaryGrid& g, int k) {
  const int p = k;
  BinaryGrid big(g.height() + 2 * p, g.width() + 2 * p);
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) big.set(y + p, x + p, g(y, x));
  const BinaryGrid d = naive_dilate(big, k);
  BinaryGrid e(big.height(), big.width());
  const int r = k / 2;
  for (int y = 0; y < big.height(); ++y)
    for (int x = 0; x < big.width(); ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy)
        for (int dx = -r; dx <= r && all; ++dx) {
          const int yy = y + dy, xx = x + dx;
          all = yy >= 0 && yy < big.height() && xx >= 0 && xx < big.width() && d(yy, xx);
        }
      e.set(y, x, all);
    }
  BinaryGrid out(g.height(), g.width());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) out.set(y, x, e(y + p, x + p));
  return out;
}

// OFS stand-in with a 1x1 kernel that fires on any event of one polarity.
OfsModel polarity_detector(int bin, int channel, double gain) {
  OfsConfig c;
  c.kernel = 1;
  OfsModel m(bin, c, 0);
  m.weight.value.fill(0.0);
  m.weight.value[static_cast<std::size_t>(channel)] = gain;
  m.v_th.value[0] = 0.5;
  m.leak.value[0] = 1.0;
  return m;
}

void square(BinnedVolume& v, int channel, int y0, int x0, int n) {
  for (int y = y0; y < y0 + n; ++y)
    for (int x = x0; x < x0 + n; ++x) v.at(0, channel, y, x) = 1;
}

OfpdConfig small_ofpd() {
  OfpdConfig c;
  c.height = c.width = 24;
  c.conv1_channels = c.conv2_channels = 2;
  c.hidden = 4;
  return c;
}

}  // namespace

TEST_CASE("closing fills a one-pixel gap and keeps an isolated square") {
  BinaryGrid g(12, 12);
  for (int x = 2; x <= 8; ++x)
    if (x != 5) g.set(4, x, true);
  const BinaryGrid c = close(g, 3);
  CHECK(c(4, 5) == 1);
  CHECK(c.count() == 7);
  BinaryGrid corner(6, 6);
  corner.set(0, 0, true);
  corner.set(0, 1, true);
  CHECK(close(corner, 5) == corner);
}

TEST_CASE("closing matches a padded naive oracle and is extensive and idempotent") {
  for (int k : {1, 3, 5, 7}) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const BinaryGrid g = random_grid(17, 13, seed * 31 + k, 0.1 + 0.05 * seed);
      const BinaryGrid c = close(g, k);
      CHECK(c == naive_close(g, k));
      for (std::size_t i = 0; i < g.size(); ++i) CHECK((!g[i] || c[i]));
      CHECK(close(c, k) == c);
    }
  }
  CHECK_THROWS_AS(close(BinaryGrid(4, 4), 4), std::invalid_argument);
  CHECK_THROWS_AS(close(BinaryGrid(4, 4), 0), std::invalid_argument);
  CHECK_THROWS_AS(close(BinaryGrid(4, 4), -3), std::invalid_argument);
}

TEST_CASE("mask and apply_mask") {
  const BinaryGrid out = random_grid(10, 10, 4, 0.2);
  const BinaryGrid mask = make_mask(out, 3);
  const BinaryGrid closed = close(out, 3);
  for (std::size_t i = 0; i < mask.size(); ++i) CHECK(mask[i] == 1 - closed[i]);

  BinnedVolume v(3, 10, 10);
  Rng rng(1);
  for (int b = 0; b < 3; ++b)
    for (int c = 0; c < 2; ++c)
      for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) v.at(b, c, y, x) = static_cast<std::uint32_t>(rng.below(3));
  const BinnedVolume m = apply_mask(v, mask);
  std::uint64_t kept = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      if (mask(y, x)) {
        kept += v.pixel_total(y, x);
        CHECK(m.pixel_total(y, x) == v.pixel_total(y, x));
      } else {
        CHECK(m.pixel_total(y, x) == 0);
      }
    }
  CHECK(m.total() == kept);
  CHECK_THROWS(apply_mask(v, BinaryGrid(9, 10)));
}

TEST_CASE("cascade routes each region to the fastest stage that claims it") {
  BinnedVolume v(1, 24, 24);
  square(v, 1, 2, 2, 4);    // ON block, claimed by bin 3
  v.at(0, 0, 3, 3) = 1;     // OFF event inside it, masked before bin 2
  square(v, 0, 14, 14, 4);  // OFF block, claimed by bin 2
  std::vector<OfsModel> ofs{polarity_detector(4, 0, 0.0), polarity_detector(3, 1, 1.0),
                            polarity_detector(2, 0, 1.0), polarity_detector(1, 0, 1.0)};
  OfpdModel ofpd(small_ofpd(), 1);
  const auto table = SpeedBinTable::standard();
  CascadeTrace trace;
  const auto flows = cascade_infer(v, ofs, ofpd, table, {3, 10}, &trace);

  REQUIRE(flows.size() == 2);
  CHECK(flows[0].speed_bin == 2);
  CHECK(flows[1].speed_bin == 3);
  CHECK(flows[0].support == 16);
  CHECK(flows[1].support == 16);
  CHECK(flows[0].representative_speed == table.representative_speed(2));
  CHECK(flows[1].representative_speed == table.representative_speed(3));

  REQUIRE(trace.stages.size() == 4);
  CHECK(trace.stages[0].bin == 4);
  CHECK(trace.stages[0].output.count() == 0);
  CHECK(trace.stages[0].input == v);
  CHECK(trace.stages[1].input == v);
  CHECK(trace.stages[2].input.total() == 16);
  CHECK(trace.stages[2].input.at(0, 0, 3, 3) == 0);
  CHECK(trace.stages[3].input.total() == 0);
  // each stage sees a subset of the previous stage's events
  for (std::size_t s = 1; s < trace.stages.size(); ++s) {
    const auto& a = trace.stages[s - 1].input.counts();
    const auto& b = trace.stages[s].input.counts();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((b[i] == 0 || b[i] == a[i]));
  }
}

TEST_CASE("cascade ignores stages below the minimum support") {
  BinnedVolume v(1, 24, 24);
  square(v, 1, 2, 2, 3);  // 9 pixels
  std::vector<OfsModel> ofs{polarity_detector(3, 1, 1.0)};
  OfpdModel ofpd(small_ofpd(), 1);
  CHECK(cascade_infer(v, ofs, ofpd, SpeedBinTable::standard(), {3, 10}).empty());
  CHECK(cascade_infer(v, ofs, ofpd, SpeedBinTable::standard(), {3, 9}).size() == 1);
}

TEST_CASE("cascade validates its inputs") {
  BinnedVolume v(1, 24, 24);
  OfpdModel ofpd(small_ofpd(), 1);
  const auto table = SpeedBinTable::standard();
  std::vector<OfsModel> ascending{polarity_detector(2, 0, 1.0), polarity_detector(3, 0, 1.0)};
  CHECK_THROWS_AS(cascade_infer(v, ascending, ofpd, table), CascadeError);
  std::vector<OfsModel> dup{polarity_detector(3, 0, 1.0), polarity_detector(3, 0, 1.0)};
  CHECK_THROWS_AS(cascade_infer(v, dup, ofpd, table), CascadeError);
  std::vector<OfsModel> ok{polarity_detector(3, 0, 1.0)};
  CHECK_THROWS_AS(cascade_infer(BinnedVolume(1, 16, 16), ok, ofpd, table), CascadeError);
}
