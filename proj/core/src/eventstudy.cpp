#include "codev/eventstudy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codev/csv.hpp"
#include "codev/error.hpp"
#include "codev/parallel.hpp"
#include "codev/rng.hpp"

#include "json.hpp"

namespace codev::eventstudy {

AlignedPanel align_panel(std::span<const PairSeries> rows, int d_min,
                         int d_max) {
  AlignedPanel out;
  out.d_min = d_min;
  out.d_max = d_max;
  out.n_d.assign(out.n_cols(), 0);
  for (const auto& row : rows) {
    std::vector<double> cells(out.n_cols(), kMissing);
    for (int d = d_min; d <= d_max; ++d) {
      auto idx = static_cast<std::int64_t>(row.connection_day) + d -
                 static_cast<std::int64_t>(row.series_start);
      if (idx < 0 || idx >= static_cast<std::int64_t>(row.sc.size())) continue;
      double v = row.sc[static_cast<std::size_t>(idx)];
      if (is_missing(v)) continue;
      cells[out.col(d)] = v;
      ++out.n_d[out.col(d)];
    }
    out.row_ids.push_back(row.id);
    out.cells.push_back(std::move(cells));
  }
  return out;
}

namespace {

constexpr std::uint64_t kBootstrapStream = 0xb007;

// Defined cell values of one column, in row order.
std::vector<double> column_values(const AlignedPanel& panel, int col) {
  std::vector<double> out;
  for (const auto& row : panel.cells)
    if (!is_missing(row[col])) out.push_back(row[col]);
  return out;
}

double median_inplace(std::vector<double>& v) {
  std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_sorted(const std::vector<double>& v, double q) {
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

BootstrapCurve bootstrap_curve(const AlignedPanel& panel, std::size_t n,
                               std::uint64_t seed, int threads, bool median) {
  if (panel.cells.empty() || n == 0)
    throw DataError("bootstrap: empty panel or zero resamples");
  BootstrapCurve out;
  out.d_min = panel.d_min;
  int cols = panel.n_cols();
  out.center.assign(cols, kMissing);
  out.spread.assign(cols, kMissing);
  if (median) {
    out.q_lo.assign(cols, kMissing);
    out.q_hi.assign(cols, kMissing);
  }
  out.n_d = panel.n_d;

  parallel_for(static_cast<std::size_t>(cols), threads, [&](std::size_t c) {
    auto values = column_values(panel, static_cast<int>(c));
    if (values.empty()) return;
    std::size_t nd = values.size();
    std::vector<double> stat(n);
    std::vector<double> draw;
    if (median) draw.reserve(nd);
    for (std::size_t r = 0; r < n; ++r) {
      // one stream per (day, resample index): output is independent of the
      // worker count
      Rng rng(derive_seed(seed, kBootstrapStream, c, r));
      if (median) {
        draw.clear();
        for (std::size_t k = 0; k < nd; ++k)
          draw.push_back(values[rng.below(nd)]);
        stat[r] = median_inplace(draw);
      } else {
        double sum = 0.0;
        for (std::size_t k = 0; k < nd; ++k) sum += values[rng.below(nd)];
        stat[r] = sum / static_cast<double>(nd);
      }
    }
    double mean = pairwise_sum(stat) / static_cast<double>(n);
    double ss = 0.0;
    for (double s : stat) ss += (s - mean) * (s - mean);
    double sd = std::sqrt(ss / static_cast<double>(n));
    if (median) {
      std::sort(stat.begin(), stat.end());
      out.center[c] = quantile_sorted(stat, 0.5);
      out.q_lo[c] = quantile_sorted(stat, 0.025);
      out.q_hi[c] = quantile_sorted(stat, 0.975);
      out.spread[c] = sd;
    } else {
      out.center[c] = mean;
      out.spread[c] = sd;
    }
  });
  return out;
}

}  // namespace

BootstrapCurve bootstrap_mean_curve(const AlignedPanel& panel, std::size_t n,
                                    std::uint64_t seed, int threads) {
  return bootstrap_curve(panel, n, seed, threads, false);
}

BootstrapCurve bootstrap_median_curve(const AlignedPanel& panel, std::size_t n,
                                      std::uint64_t seed, int threads) {
  return bootstrap_curve(panel, n, seed, threads, true);
}

AlignedPanel resize_columns(const AlignedPanel& panel,
                            std::span<const int> target_n_d,
                            std::uint64_t seed) {
  AlignedPanel out = panel;
  int cols = panel.n_cols();
  for (int c = 0; c < cols; ++c) {
    int target = c < static_cast<int>(target_n_d.size()) ? target_n_d[c] : 0;
    if (panel.n_d[c] <= target) continue;
    std::vector<std::size_t> defined;
    for (std::size_t r = 0; r < panel.cells.size(); ++r)
      if (!is_missing(panel.cells[r][c])) defined.push_back(r);
    // partial Fisher-Yates: keep the first `target` positions
    Rng rng(derive_seed(seed, 0x5121, static_cast<std::uint64_t>(c)));
    for (std::size_t i = 0; i < static_cast<std::size_t>(target); ++i) {
      std::size_t j = i + rng.below(defined.size() - i);
      std::swap(defined[i], defined[j]);
    }
    for (std::size_t i = target; i < defined.size(); ++i)
      out.cells[defined[i]][c] = kMissing;
    out.n_d[c] = target;
  }
  return out;
}

std::vector<double> DeltaReport::deltas() const {
  std::vector<double> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) out.push_back(s.delta);
  return out;
}

DeltaReport before_after_deltas(const AlignedPanel& panel, int before_lo,
                                int before_hi, int after_lo, int after_hi) {
  DeltaReport out;
  auto window_mean = [&](const std::vector<double>& row, int lo, int hi) {
    double sum = 0.0;
    int n = 0;
    for (int d = lo; d <= hi; ++d) {
      if (d < panel.d_min || d > panel.d_max) continue;
      double v = row[panel.col(d)];
      if (is_missing(v)) continue;
      sum += v;
      ++n;
    }
    return n > 0 ? sum / n : kMissing;
  };
  for (std::size_t r = 0; r < panel.cells.size(); ++r) {
    double before = window_mean(panel.cells[r], before_lo, before_hi);
    double after = window_mean(panel.cells[r], after_lo, after_hi);
    if (is_missing(before) || is_missing(after)) {
      ++out.excluded;
      continue;
    }
    out.summaries.push_back(
        {panel.row_ids[r], before, after, after - before});
  }
  return out;
}

FractionResult fraction_increasing(std::span<const BeforeAfterSummary> summaries,
                                   std::size_t n_boot, std::uint64_t seed) {
  FractionResult out;
  if (summaries.empty()) return out;
  std::size_t n = summaries.size();
  auto frac_of = [&](const std::vector<std::size_t>& idx) {
    std::size_t up = 0;
    for (std::size_t i : idx)
      if (summaries[i].delta > 0.0) ++up;
    return static_cast<double>(up) / static_cast<double>(idx.size());
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  out.fraction = frac_of(all);
  if (n_boot == 0) return out;
  std::vector<double> boot(n_boot);
  std::vector<std::size_t> draw(n);
  for (std::size_t r = 0; r < n_boot; ++r) {
    Rng rng(derive_seed(seed, 0xf2ac, r));
    for (auto& d : draw) d = rng.below(n);
    boot[r] = frac_of(draw);
  }
  std::sort(boot.begin(), boot.end());
  out.ci_lo = quantile_sorted(boot, 0.025);
  out.ci_hi = quantile_sorted(boot, 0.975);
  return out;
}

std::vector<PairInfo> make_pair_infos(
    std::span<const conet::ConnectionEvent> connections,
    const std::map<std::string, std::string>& project_to_asset,
    std::span<const ingest::EventRecord> events, int keep_horizon_days) {
  std::vector<PairInfo> out;
  for (const auto& c : connections) {
    auto ai = project_to_asset.find(c.project_i);
    auto aj = project_to_asset.find(c.project_j);
    if (ai == project_to_asset.end() || aj == project_to_asset.end()) continue;
    PairInfo p;
    p.id = c.pair_id();
    p.asset_i = ai->second;
    p.asset_j = aj->second;
    p.connection_day = c.connection_day;
    p.kind = c.kind;
    p.direction_defined = c.direction_defined;
    if (c.direction_defined) {
      auto as = project_to_asset.find(c.second_edited);
      if (as != project_to_asset.end()) p.second_edited_asset = as->second;
      bool kept = false;
      for (const auto& e : events) {
        if (e.developer != c.developer || e.project != c.first_edited) continue;
        Day d = e.day();
        if (d > c.connection_day && d <= c.connection_day + keep_horizon_days) {
          kept = true;
          break;
        }
      }
      p.keep = kept;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairCharacteristics> pair_characteristics(
    std::span<const PairInfo> pairs, const ingest::AssetPanel& panel,
    int top_k) {
  using ingest::Metric;
  std::vector<PairCharacteristics> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    int ia = panel.index_of(p.asset_i), ib = panel.index_of(p.asset_j);
    if (ia < 0 || ib < 0) continue;
    PairCharacteristics c;
    c.id = p.id;
    c.kind = p.kind;
    c.keep = p.keep;
    c.direction_defined = p.direction_defined;
    c.connection_day = p.connection_day;
    double cap_a = panel.lifetime_mean(Metric::MarketCap, ia);
    double cap_b = panel.lifetime_mean(Metric::MarketCap, ib);
    double vol_a = panel.lifetime_mean(Metric::Volume, ia);
    double vol_b = panel.lifetime_mean(Metric::Volume, ib);
    if (!is_missing(cap_a) && !is_missing(cap_b))
      c.cap_diff = std::abs(cap_a - cap_b);
    if (!is_missing(vol_a) && !is_missing(vol_b))
      c.volume_diff = std::abs(vol_a - vol_b);

    auto age = [&](int asset) {
      int first = panel.first_observed(asset);
      if (first < 0) return kMissing;
      return std::max(0.0, static_cast<double>(p.connection_day -
                                                panel.day_at(first)));
    };
    double age_a = age(ia), age_b = age(ib);
    if (!is_missing(age_a) && !is_missing(age_b)) {
      c.age_diff = std::abs(age_a - age_b);
      c.older_age = std::max(age_a, age_b);
      c.younger_age = std::min(age_a, age_b);
      if (p.direction_defined && !p.second_edited_asset.empty()) {
        double age_second =
            p.second_edited_asset == p.asset_i ? age_a : age_b;
        c.younger_is_second = age_second <= std::min(age_a, age_b);
        double cap_second =
            p.second_edited_asset == p.asset_i ? cap_a : cap_b;
        c.lower_cap_is_second =
            !is_missing(cap_second) && cap_second <= std::min(cap_a, cap_b);
      }
    }

    // top-10 by average market cap before this pair's connection
    std::vector<std::pair<double, int>> caps;
    for (std::size_t a = 0; a < panel.assets.size(); ++a) {
      int end = panel.day_index(p.connection_day);
      if (end < 0) end = p.connection_day >= panel.start ? panel.n_days : 0;
      double sum = 0.0;
      int n = 0;
      for (int t = 0; t < end; ++t) {
        double v = panel.at(Metric::MarketCap, static_cast<int>(a), t);
        if (is_missing(v)) continue;
        sum += v;
        ++n;
      }
      if (n > 0) caps.push_back({sum / n, static_cast<int>(a)});
    }
    std::sort(caps.rbegin(), caps.rend());
    for (int r = 0; r < std::min<int>(top_k, static_cast<int>(caps.size())); ++r)
      if (caps[r].second == ia || caps[r].second == ib) c.has_top10 = true;

    out.push_back(std::move(c));
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) { return median_inplace(v); }

}  // namespace

Classification classify_pairs(std::span<const PairCharacteristics> chars,
                              Criterion criterion) {
  Classification out;
  auto split = [&](auto pred, std::string name_a, std::string name_b,
                   auto eligible) {
    out.name_a = std::move(name_a);
    out.name_b = std::move(name_b);
    for (const auto& c : chars) {
      if (!eligible(c)) continue;
      (pred(c) ? out.a : out.b).push_back(c.id);
    }
  };
  auto all = [](const PairCharacteristics&) { return true; };
  auto directed = [](const PairCharacteristics& c) {
    return c.direction_defined;
  };
  switch (criterion) {
    case Criterion::YoungSecond:
      split([](const auto& c) { return c.younger_is_second; }, "young_second",
            "young_first", directed);
      break;
    case Criterion::CapDiffMedian: {
      std::vector<double> diffs;
      for (const auto& c : chars)
        if (!is_missing(c.cap_diff)) diffs.push_back(c.cap_diff);
      if (diffs.empty()) break;
      double med = median_of(std::move(diffs));
      split([med](const auto& c) { return c.cap_diff > med; }, "high_diff",
            "low_diff",
            [](const auto& c) { return !is_missing(c.cap_diff); });
      break;
    }
    case Criterion::KeepDismiss:
      split([](const auto& c) { return !c.keep; }, "dismiss", "keep", directed);
      break;
    case Criterion::Top10:
      split([](const auto& c) { return c.has_top10; }, "top10", "minor", all);
      break;
    case Criterion::PushPull:
      split([](const auto& c) { return c.kind == ingest::EventKind::Push; },
            "push", "pull", all);
      break;
    case Criterion::LateEarly: {
      std::vector<double> days;
      for (const auto& c : chars)
        days.push_back(static_cast<double>(c.connection_day));
      if (days.empty()) break;
      double med = median_of(std::move(days));
      split([med](const auto& c) {
              return static_cast<double>(c.connection_day) > med;
            },
            "late", "early", all);
      break;
    }
  }
  return out;
}

std::vector<stats::TestResult> compare_classes(std::span<const double> a,
                                               std::span<const double> b,
                                               double alpha) {
  std::vector<stats::TestResult> out;
  out.push_back(stats::welch_t(a, b, alpha));
  out.push_back(stats::mann_whitney_u(a, b, alpha));
  out.push_back(stats::ks_two_sample(a, b, alpha));
  std::vector<std::vector<double>> groups{{a.begin(), a.end()},
                                          {b.begin(), b.end()}};
  out.push_back(stats::kruskal_wallis(groups, alpha));
  out.push_back(stats::mood_median(groups, alpha));
  return out;
}

stats::FitResult fit_transition_sigmoid(const BootstrapCurve& curve,
                                        std::size_t n_steps,
                                        std::uint64_t seed) {
  std::vector<double> x, y;
  for (std::size_t c = 0; c < curve.center.size(); ++c) {
    if (is_missing(curve.center[c])) continue;
    x.push_back(static_cast<double>(curve.d_min + static_cast<int>(c)));
    y.push_back(curve.center[c]);
  }
  stats::FitOptions opts;
  opts.n_steps = n_steps;
  opts.seed = seed;
  return stats::mcmc_curve_fit(stats::FitModel::Sigmoid, x, y, {}, opts);
}

void write_curve(std::ostream& out, const BootstrapCurve& curve) {
  out << "d,mean_sc,sd,n_pairs\n";
  for (std::size_t c = 0; c < curve.center.size(); ++c) {
    out << curve.d_min + static_cast<int>(c) << ','
        << csv::format_double(curve.center[c]) << ','
        << csv::format_double(curve.spread[c]) << ',' << curve.n_d[c] << '\n';
  }
}

void write_deltas(std::ostream& out, const DeltaReport& report) {
  out << "pair_id,before,after,delta\n";
  for (const auto& s : report.summaries) {
    out << s.id << ',' << csv::format_double(s.before) << ','
        << csv::format_double(s.after) << ',' << csv::format_double(s.delta)
        << '\n';
  }
}

void write_test_results(std::ostream& out,
                        std::span<const stats::TestResult> results) {
  for (const auto& r : results) {
    nlohmann::json j{{"test", r.test},       {"statistic", r.statistic},
                     {"p", r.p_value},       {"alpha", r.alpha},
                     {"reject", r.reject},   {"valid", r.valid},
                     {"note", r.note}};
    if (!r.valid) {
      j["statistic"] = nullptr;
      j["p"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace codev::eventstudy
