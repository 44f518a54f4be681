#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "codev/missing.hpp"
#include "codev/rng.hpp"
#include "codev/series.hpp"

using namespace codev;
using namespace codev::series;

namespace {

// average-rank-then-Pearson oracle on fully observed data
double spearman_oracle(std::vector<double> x, std::vector<double> y) {
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("relative change") {
  std::vector<double> x = {100, 110, kMissing, 120, 0, 50};
  auto r = relative_change(x);
  REQUIRE(r.size() == x.size());
  CHECK(is_missing(r[0]));
  CHECK(r[1] == doctest::Approx(0.10));
  CHECK(is_missing(r[2]));  // missing operand
  CHECK(is_missing(r[3]));  // previous missing
  CHECK(r[4] == doctest::Approx(-1.0));
  CHECK(is_missing(r[5]));  // zero denominator
}

TEST_CASE("log range volatility") {
  std::vector<double> hi = {2.0, kMissing, 3.0};
  std::vector<double> lo = {1.0, 1.0, 0.0};
  auto v = log_range_volatility(hi, lo);
  CHECK(v[0] == doctest::Approx(std::log(2.0)));
  CHECK(is_missing(v[1]));
  CHECK(is_missing(v[2]));
}

TEST_CASE("average ranks with tie blocks") {
  std::vector<double> x = {3, 1, 4, 1, 5};
  auto r = average_ranks(x);
  CHECK(r == std::vector<double>{3, 1.5, 4, 1.5, 5});
}

TEST_CASE("spearman tie example matches a hand computation") {
  std::vector<double> x = {1, 2, 2, 4};
  std::vector<double> y = {2, 1, 3, 4};
  // ranks x: 1, 2.5, 2.5, 4; ranks y: 2, 1, 3, 4 -> r = 0.6324555...
  CHECK(spearman(x, y) == doctest::Approx(0.6324555320336759).epsilon(1e-12));
}

TEST_CASE("spearman edge cases") {
  std::vector<double> a = {1, 2};
  CHECK(is_missing(spearman(a, a)));  // < 3 pairs
  std::vector<double> c = {5, 5, 5, 5};
  std::vector<double> d = {1, 2, 3, 4};
  CHECK(is_missing(spearman(c, d)));  // zero rank variance
  std::vector<double> x = {1, kMissing, 2, 3, kMissing, 4};
  std::vector<double> y = {1, 9, 2, kMissing, 8, 4};
  // surviving pairs (1,1),(2,2),(4,4): perfect
  CHECK(spearman(x, y) == doctest::Approx(1.0));
}

TEST_CASE("spearman equals the oracle on random tied series") {
  Rng rng(314);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 3 + static_cast<int>(rng.below(10));
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(5));  // heavy ties
      y[i] = static_cast<double>(rng.below(5)) + 0.5 * rng.normal();
    }
    double got = spearman(x, y);
    if (is_missing(got)) continue;
    CHECK(got == doctest::Approx(spearman_oracle(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
  Rng rng(99);
  std::vector<double> x(30), y(30);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  double base = spearman(x, y);
  std::vector<double> ex(30), cy(30);
  for (int i = 0; i < 30; ++i) {
    ex[i] = std::exp(x[i]);
    cy[i] = 2.0 * y[i] + 7.0;
  }
  CHECK(spearman(ex, cy) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("rolling spearman windows and completeness floor") {
  Rng rng(55);
  int n = 40;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
  }
  int window = 10;
  auto roll = rolling_spearman(x, y, window);  // min_obs -> ceil(7.5) = 8
  for (int t = 0; t < n; ++t) {
    if (t < window - 1) continue;
    std::vector<double> wx(x.begin() + (t - window + 1), x.begin() + t + 1);
    std::vector<double> wy(y.begin() + (t - window + 1), y.begin() + t + 1);
    CHECK(roll[t] == doctest::Approx(spearman(wx, wy)).epsilon(1e-12));
  }
  SUBCASE("locality: edits outside the window do not matter") {
    // monotone series: perfect correlation until a rank inversion enters
    std::vector<double> mx(n), my(n);
    for (int i = 0; i < n; ++i) mx[i] = my[i] = i;
    auto base = rolling_spearman(mx, my, window, 3);
    CHECK(base[30] == doctest::Approx(1.0));
    auto mx2 = mx;
    mx2[5] = 100.0;  // rank inversion inside windows covering index 5
    auto edited = rolling_spearman(mx2, my, window, 3);
    CHECK(edited[30] == base[30]);  // window (20, 30] untouched
    CHECK(edited[14] != base[14]);
  }
  SUBCASE("min_obs gates sparse windows") {
    auto xs = x;
    for (int i = 20; i < 24; ++i) xs[i] = kMissing;  // 6 of 10 left at t=29
    auto r = rolling_spearman(xs, y, window);        // needs 8
    CHECK(is_missing(r[29]));
    auto r2 = rolling_spearman(xs, y, window, 5);
    CHECK(!is_missing(r2[29]));
  }
}

TEST_CASE("cross-sectional standardization oracle") {
  // three pairs with raw 0.2, 0.4, 0.6 on one day: SC of the third is
  // (0.6-0.4)/sqrt(0.08/3) = 1.224744...
  CorrelationPanel p;
  p.start = 0;
  p.n_days = 1;
  p.pairs = {{0, 1}, {0, 2}, {1, 2}};
  p.raw = {{0.2}, {0.4}, {0.6}};
  p.ecology = {0, 1, 2};
  p.min_cross_section = 3;
  std::vector<int> eco = {0, 1, 2};
  standardize_cross_section(p, eco);
  CHECK(p.cs_n[0] == 3);
  CHECK(p.cs_mean[0] == doctest::Approx(0.4));
  CHECK(p.sc(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-12));
  CHECK(p.sc(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
}

TEST_CASE("SC has zero mean and unit population variance per day") {
  Rng rng(123);
  CorrelationPanel p;
  p.start = 0;
  p.n_days = 5;
  for (int k = 0; k < 40; ++k) {
    p.pairs.push_back({k, k + 100});
    std::vector<double> row(5);
    for (auto& v : row) v = 2 * rng.uniform() - 1;
    p.raw.push_back(row);
    p.ecology.push_back(k);
  }
  standardize_cross_section(p, p.ecology);
  for (int t = 0; t < 5; ++t) {
    double s = 0, s2 = 0;
    for (int k = 0; k < 40; ++k) {
      double v = p.sc(k, t);
      s += v;
      s2 += v * v;
    }
    CHECK(s / 40 == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(s2 / 40 == doctest::Approx(1.0).epsilon(1e-10));  // population sigma
  }
}

TEST_CASE("cross-section floor suppresses thin days") {
  CorrelationPanel p;
  p.start = 0;
  p.n_days = 1;
  p.pairs = {{0, 1}, {0, 2}};
  p.raw = {{0.1}, {0.9}};
  p.ecology = {0, 1};
  p.min_cross_section = 10;
  std::vector<int> eco = {0, 1};
  standardize_cross_section(p, eco);
  CHECK(is_missing(p.sc(0, 0)));
}

TEST_CASE("full panel computation on a small ecology") {
  // deterministic market: asset j has price path with distinct shapes
  auto panel = ingest::AssetPanel::make({"a", "b", "c", "d"}, 100, 60);
  Rng rng(8);
  for (int a = 0; a < 4; ++a) {
    double price = 100;
    for (int d = 0; d < 60; ++d) {
      price *= 1.0 + 0.01 * rng.normal();
      panel.at(ingest::Metric::Price, a, d) = price;
      panel.at(ingest::Metric::Volume, a, d) = 1e6;
      panel.at(ingest::Metric::MarketCap, a, d) = price * 1e5;
    }
  }
  PanelOptions opt;
  opt.window = 20;
  opt.min_cross_section = 3;
  auto cp = compute_correlation_panel(panel, {}, opt);
  CHECK(cp.pairs.size() == 6);  // all pairs of 4 assets
  CHECK(cp.ecology.size() == 6);
  // raw values agree with a direct rolling spearman on returns
  auto ra = metric_series(panel, 0, SeriesKind::Return);
  auto rb = metric_series(panel, 1, SeriesKind::Return);
  auto direct = rolling_spearman(ra, rb, 20);
  int k = cp.pair_index({0, 1});
  REQUIRE(k >= 0);
  for (int t = 0; t < 60; ++t) {
    double got = cp.raw[k][t], want = direct[t];
    CHECK(((is_missing(got) && is_missing(want)) ||
           got == doctest::Approx(want).epsilon(1e-12)));
  }
  SUBCASE("threads do not change the result") {
    auto opt4 = opt;
    opt4.threads = 4;
    auto cp4 = compute_correlation_panel(panel, {}, opt4);
    auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_missing(a[i]) != is_missing(b[i])) return false;
        if (!is_missing(a[i]) && a[i] != b[i]) return false;
      }
      return true;
    };
    REQUIRE(cp4.raw.size() == cp.raw.size());
    for (std::size_t k = 0; k < cp.raw.size(); ++k)
      CHECK(same(cp4.raw[k], cp.raw[k]));
    CHECK(same(cp4.cs_mean, cp.cs_mean));
  }
  SUBCASE("extra pairs ride along outside the ecology") {
    PanelOptions opt2 = opt;
    opt2.cross_section_sample = 3;
    opt2.seed = 5;
    std::vector<PairKey> extra = {{0, 3}};
    auto cp2 = compute_correlation_panel(panel, extra, opt2);
    CHECK(cp2.ecology.size() == 3);
    CHECK(cp2.pair_index({0, 3}) >= 0);
  }
  SUBCASE("panel writer emits one row per defined day") {
    std::ostringstream out;
    std::vector<int> idx = {k};
    std::vector<std::string> ids = {"a|b"};
    write_panel(out, cp, idx, ids);
    CHECK(out.str().find("pair_id,date,raw_corr,sc,cross_section_n") == 0);
    CHECK(out.str().find("a|b,") != std::string::npos);
  }
}

TEST_CASE("metric series kinds") {
  auto panel = ingest::AssetPanel::make({"a"}, 0, 3);
  double prices[3] = {100, 110, 121};
  for (int d = 0; d < 3; ++d) {
    panel.at(ingest::Metric::Price, 0, d) = prices[d];
    panel.at(ingest::Metric::Volume, 0, d) = 10 * (d + 1);
    panel.at(ingest::Metric::MarketCap, 0, d) = 1000.0 * (d + 1);
    panel.at(ingest::Metric::High, 0, d) = prices[d] * 1.1;
    panel.at(ingest::Metric::Low, 0, d) = prices[d] * 0.9;
  }
  auto ret = metric_series(panel, 0, SeriesKind::Return);
  CHECK(ret[1] == doctest::Approx(0.10));
  auto vol = metric_series(panel, 0, SeriesKind::VolumeChange);
  CHECK(vol[2] == doctest::Approx(0.5));
  auto vola = metric_series(panel, 0, SeriesKind::Volatility);
  CHECK(vola[0] == doctest::Approx(std::log(1.1 / 0.9)));
  auto raw = metric_series(panel, 0, SeriesKind::Price);
  CHECK(raw[2] == 121);
}
