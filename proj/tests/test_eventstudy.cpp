#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "codev/error.hpp"
#include "codev/eventstudy.hpp"
#include "codev/rng.hpp"

using namespace codev;
using namespace codev::eventstudy;

namespace {

PairSeries make_row(std::string id, std::vector<double> sc, Day start,
                    Day conn) {
  return {std::move(id), std::move(sc), start, conn};
}

}  // namespace

TEST_CASE("align_panel shifts each row to its connection day") {
  // sc value equals the calendar day index so alignment is directly visible
  std::vector<double> sc(30);
  for (int i = 0; i < 30; ++i) sc[i] = i;
  std::vector<PairSeries> rows = {make_row("p", sc, 100, 110)};
  auto panel = align_panel(rows, -5, 5);
  REQUIRE(panel.cells.size() == 1);
  CHECK(panel.cells[0][panel.col(0)] == 10);   // day 110 -> index 10
  CHECK(panel.cells[0][panel.col(-5)] == 5);
  CHECK(panel.cells[0][panel.col(5)] == 15);
  CHECK(panel.n_d[panel.col(0)] == 1);

  SUBCASE("out-of-range days are missing") {
    std::vector<PairSeries> early = {make_row("q", sc, 100, 102)};
    auto edge = align_panel(early, -5, 5);
    CHECK(is_missing(edge.cells[0][edge.col(-5)]));  // before series start
    CHECK(edge.n_d[edge.col(-5)] == 0);
  }
}

TEST_CASE("bootstrap mean: two-row {0,1} column has sd sqrt(1/8)") {
  AlignedPanel panel;
  panel.d_min = 0;
  panel.d_max = 0;
  panel.row_ids = {"a", "b"};
  panel.cells = {{0.0}, {1.0}};
  panel.n_d = {2};
  auto curve = bootstrap_mean_curve(panel, 40000, 17);
  CHECK(curve.center[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(curve.spread[0] == doctest::Approx(std::sqrt(0.125)).epsilon(0.02));
  CHECK(curve.n_d[0] == 2);
}

TEST_CASE("bootstrap median: exhaustive 27-resample oracle for {0,0,1}") {
  AlignedPanel panel;
  panel.d_min = 0;
  panel.d_max = 0;
  panel.row_ids = {"a", "b", "c"};
  panel.cells = {{0.0}, {0.0}, {1.0}};
  panel.n_d = {3};
  // resample median is 1 iff >= 2 of 3 draws hit the 1-row: p = 7/27, so
  // the resample-median distribution has median 0, sd sqrt(p(1-p)), and
  // its [0.025, 0.975] band spans both outcomes.
  auto curve = bootstrap_median_curve(panel, 40000, 23);
  CHECK(curve.center[0] == 0.0);
  double p = 7.0 / 27.0;
  CHECK(curve.spread[0] == doctest::Approx(std::sqrt(p * (1 - p))).epsilon(0.03));
  CHECK(curve.q_lo[0] == 0.0);
  CHECK(curve.q_hi[0] == 1.0);
}

TEST_CASE("bootstrap determinism across thread counts") {
  Rng rng(3);
  AlignedPanel panel;
  panel.d_min = -10;
  panel.d_max = 10;
  for (int r = 0; r < 25; ++r) {
    panel.row_ids.push_back("r" + std::to_string(r));
    std::vector<double> row(21);
    for (auto& v : row) v = rng.normal();
    if (r % 5 == 0) row[3] = kMissing;
    panel.cells.push_back(row);
  }
  panel.n_d.assign(21, 0);
  for (int c = 0; c < 21; ++c)
    for (const auto& row : panel.cells)
      if (!is_missing(row[c])) ++panel.n_d[c];

  auto c1 = bootstrap_mean_curve(panel, 2000, 5, 1);
  auto c8 = bootstrap_mean_curve(panel, 2000, 5, 8);
  CHECK(c1.center == c8.center);
  CHECK(c1.spread == c8.spread);
  auto m1 = bootstrap_median_curve(panel, 2000, 5, 1);
  auto m8 = bootstrap_median_curve(panel, 2000, 5, 8);
  CHECK(m1.center == m8.center);
  CHECK(m1.q_lo == m8.q_lo);

  SUBCASE("different seeds differ") {
    auto other = bootstrap_mean_curve(panel, 2000, 6, 1);
    CHECK(other.center != c1.center);
  }
  SUBCASE("empty panel throws") {
    AlignedPanel empty;
    empty.n_d.assign(empty.n_cols(), 0);
    CHECK_THROWS_AS(bootstrap_mean_curve(empty, 10, 1), DataError);
    CHECK_THROWS_AS(bootstrap_mean_curve(panel, 0, 1), DataError);
  }
}

TEST_CASE("resize_columns matches the target counts") {
  Rng rng(4);
  AlignedPanel panel;
  panel.d_min = 0;
  panel.d_max = 4;
  for (int r = 0; r < 50; ++r) {
    std::vector<double> row(5);
    for (auto& v : row) v = rng.uniform();
    panel.row_ids.push_back(std::to_string(r));
    panel.cells.push_back(row);
  }
  panel.n_d.assign(5, 50);
  std::vector<int> target = {10, 50, 0, 7, 50};
  auto shrunk = resize_columns(panel, target, 11);
  CHECK(shrunk.n_d == target);
  int defined = 0;
  for (int c = 0; c < 5; ++c)
    for (int r = 0; r < 50; ++r) {
      double v = shrunk.cells[r][c];
      if (is_missing(v)) continue;
      ++defined;
      CHECK(v == panel.cells[r][c]);  // kept cells are unchanged
    }
  CHECK(defined == 10 + 50 + 0 + 7 + 50);
  auto again = resize_columns(panel, target, 11);  // seeded
  for (int c = 0; c < 5; ++c)
    for (int r = 0; r < 50; ++r) {
      double v = again.cells[r][c], w = shrunk.cells[r][c];
      CHECK(((is_missing(v) && is_missing(w)) || v == w));
    }
}

TEST_CASE("before/after deltas and translation equivariance") {
  AlignedPanel panel;
  panel.d_min = -10;
  panel.d_max = 10;
  std::vector<double> row(21, 1.0);
  for (int c = 11; c < 21; ++c) row[c] = 3.0;  // d >= 1
  panel.row_ids = {"p"};
  panel.cells = {row};
  panel.n_d.assign(21, 1);
  auto rep = before_after_deltas(panel, -10, -1, 1, 10);
  REQUIRE(rep.summaries.size() == 1);
  CHECK(rep.summaries[0].before == doctest::Approx(1.0));
  CHECK(rep.summaries[0].after == doctest::Approx(3.0));
  CHECK(rep.summaries[0].delta == doctest::Approx(2.0));
  CHECK(rep.excluded == 0);

  SUBCASE("adding a constant shifts before/after but not the panel shape") {
    auto shifted = panel;
    for (auto& v : shifted.cells[0]) v += 5.0;
    auto rep2 = before_after_deltas(shifted, -10, -1, 1, 10);
    CHECK(rep2.summaries[0].delta == doctest::Approx(2.0));
    CHECK(rep2.summaries[0].before == doctest::Approx(6.0));
  }
  SUBCASE("pairs with an empty window are excluded") {
    auto gappy = panel;
    for (int c = 0; c <= 9; ++c) gappy.cells[0][c] = kMissing;
    auto rep3 = before_after_deltas(gappy, -10, -1, 1, 10);
    CHECK(rep3.summaries.empty());
    CHECK(rep3.excluded == 1);
  }
}

TEST_CASE("fraction increasing with bootstrap CI") {
  std::vector<BeforeAfterSummary> s;
  for (int i = 0; i < 10; ++i)
    s.push_back({"p" + std::to_string(i), 0.0, i < 7 ? 1.0 : -1.0,
                 i < 7 ? 1.0 : -1.0});
  auto f = fraction_increasing(s, 5000, 2);
  CHECK(f.fraction == doctest::Approx(0.7));
  CHECK(f.ci_lo >= 0.0);
  CHECK(f.ci_hi <= 1.0);
  CHECK(f.ci_lo <= 0.7);
  CHECK(f.ci_hi >= 0.7);
  std::vector<BeforeAfterSummary> tie = {{"t", 1.0, 1.0, 0.0}};
  CHECK(fraction_increasing(tie, 100, 1).fraction == 0.0);  // ties not counted
}

TEST_CASE("make_pair_infos: keep/dismiss horizon") {
  using ingest::EventKind;
  using ingest::EventRecord;
  auto t = [](Day d) { return Instant{d} * 86400 + 3600; };
  std::vector<EventRecord> events = {
      {"dev", "p1", t(0), EventKind::Push, {}},
      {"dev", "p2", t(10), EventKind::Push, {}},   // connection day 10
      {"dev", "p1", t(50), EventKind::Push, {}},   // keeps editing p1
      {"dev2", "q1", t(0), EventKind::Push, {}},
      {"dev2", "q2", t(10), EventKind::Push, {}},
      {"dev2", "q1", t(150), EventKind::Push, {}},  // outside 90-day horizon
  };
  auto conns = conet::detect_connections(events);
  std::map<std::string, std::string> mapping = {
      {"p1", "a1"}, {"p2", "a2"}, {"q1", "b1"}, {"q2", "b2"}};
  auto infos = make_pair_infos(conns, mapping, events, 90);
  REQUIRE(infos.size() == 2);
  std::map<std::string, bool> keep;
  for (const auto& p : infos) keep[p.asset_i] = p.keep;
  CHECK(keep.at("a1") == true);
  CHECK(keep.at("b1") == false);
  for (const auto& p : infos) {
    CHECK(p.connection_day == 10);
    CHECK(p.direction_defined);
    CHECK((p.second_edited_asset == "a2" || p.second_edited_asset == "b2"));
  }
  SUBCASE("unmapped projects are dropped") {
    std::map<std::string, std::string> partial = {{"p1", "a1"}, {"p2", "a2"}};
    CHECK(make_pair_infos(conns, partial, events, 90).size() == 1);
  }
}

TEST_CASE("pair characteristics and the six classifications") {
  auto panel = ingest::AssetPanel::make({"big", "young", "old", "small"}, 0, 100);
  for (int d = 0; d < 100; ++d) {
    auto set = [&](int a, double price, double cap, double vol) {
      panel.at(ingest::Metric::Price, a, d) = price;
      panel.at(ingest::Metric::MarketCap, a, d) = cap;
      panel.at(ingest::Metric::Volume, a, d) = vol;
    };
    set(0, 100, 1e9, 1e7);
    if (d >= 60) set(1, 1, 1e6, 1e4);  // listed late
    set(2, 5, 5e6, 5e4);
    if (d >= 5) set(3, 0.1, 1e5, 1e3);  // slightly younger than "old"
  }
  std::vector<PairInfo> pairs = {
      {"big|young", "big", "young", 80, ingest::EventKind::Push, true, "young",
       true},
      {"old|small", "old", "small", 20, ingest::EventKind::MergedPullRequest,
       true, "old", false},
  };
  auto chars = pair_characteristics(pairs, panel, 1);
  REQUIRE(chars.size() == 2);
  CHECK(chars[0].age_diff == doctest::Approx(60));  // 80 vs 20 days old
  CHECK(chars[0].younger_is_second);
  CHECK(chars[0].lower_cap_is_second);
  CHECK(chars[0].has_top10);   // top_k = 1 -> only "big"
  CHECK(!chars[1].has_top10);
  CHECK(chars[0].cap_diff > chars[1].cap_diff);

  auto check_split = [&](Criterion c, std::size_t na, std::size_t nb) {
    auto cls = classify_pairs(chars, c);
    CHECK(cls.a.size() == na);
    CHECK(cls.b.size() == nb);
  };
  check_split(Criterion::YoungSecond, 1, 1);
  check_split(Criterion::KeepDismiss, 1, 1);  // dismiss vs keep
  check_split(Criterion::Top10, 1, 1);
  check_split(Criterion::PushPull, 1, 1);
  check_split(Criterion::LateEarly, 1, 1);
  auto cap = classify_pairs(chars, Criterion::CapDiffMedian);
  CHECK(cap.a.size() + cap.b.size() == 2);
}

TEST_CASE("compare_classes runs the five-test battery") {
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> b = {11, 12, 13, 14, 15, 16, 17, 18};
  auto results = compare_classes(a, b);
  REQUIRE(results.size() == 5);
  std::vector<std::string> names;
  for (const auto& r : results) {
    names.push_back(r.test);
    CHECK(r.valid);
    CHECK(r.reject);  // disjoint samples: everything fires
  }
  CHECK(names == std::vector<std::string>{"welch_t", "mann_whitney_u",
                                          "ks_two_sample", "kruskal_wallis",
                                          "mood_median"});
  std::ostringstream out;
  write_test_results(out, results);
  CHECK(out.str().find("\"test\":\"welch_t\"") != std::string::npos);
}

TEST_CASE("sigmoid transition fit recovers planted parameters") {
  BootstrapCurve curve;
  curve.d_min = -180;
  int n = 581;
  curve.center.resize(n);
  curve.spread.assign(n, 0.05);
  curve.n_d.assign(n, 50);
  for (int i = 0; i < n; ++i) {
    double d = curve.d_min + i;
    curve.center[i] = 0.3 + 0.35 / (1.0 + std::exp(-(d - 20.0) / 25.0));
  }
  auto fit = fit_transition_sigmoid(curve, 12000, 6);
  REQUIRE(fit.param_names.size() >= 4);
  CHECK(fit.mean[0] == doctest::Approx(0.3).epsilon(0.1));
  CHECK(fit.mean[1] == doctest::Approx(0.35).epsilon(0.15));
  CHECK(fit.mean[2] == doctest::Approx(20.0).epsilon(0.5));
  CHECK(fit.mean[3] == doctest::Approx(25.0).epsilon(0.5));
}

TEST_CASE("curve and delta writers") {
  BootstrapCurve curve;
  curve.d_min = -1;
  curve.center = {0.1, kMissing, 0.3};
  curve.spread = {0.01, kMissing, 0.02};
  curve.n_d = {5, 0, 6};
  std::ostringstream out;
  write_curve(out, curve);
  CHECK(out.str() ==
        "d,mean_sc,sd,n_pairs\n-1,0.1,0.01,5\n0,,,0\n1,0.3,0.02,6\n");

  DeltaReport rep;
  rep.summaries = {{"x|y", 0.25, 0.5, 0.25}};
  std::ostringstream out2;
  write_deltas(out2, rep);
  CHECK(out2.str() == "pair_id,before,after,delta\nx|y,0.25,0.5,0.25\n");
}
