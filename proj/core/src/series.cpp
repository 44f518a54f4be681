#include "codev/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "codev/csv.hpp"
#include "codev/parallel.hpp"
#include "codev/rng.hpp"

namespace codev::series {

namespace {

// Pearson correlation; NaN on zero variance or n < 2.
double pearson(std::span<const double> x, std::span<const double> y) {
  std::size_t n = x.size();
  if (n < 2) return kMissing;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return kMissing;
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

void ranks_into(std::span<const double> x, std::vector<std::size_t>& order,
                std::vector<double>& out) {
  std::size_t n = x.size();
  order.resize(n);
  out.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
    i = j + 1;
  }
}

}  // namespace

std::vector<double> relative_change(std::span<const double> x) {
  std::vector<double> out(x.size(), kMissing);
  for (std::size_t t = 1; t < x.size(); ++t) {
    if (is_missing(x[t]) || is_missing(x[t - 1]) || x[t - 1] == 0.0) continue;
    out[t] = (x[t] - x[t - 1]) / x[t - 1];
  }
  return out;
}

std::vector<double> log_range_volatility(std::span<const double> high,
                                         std::span<const double> low) {
  std::vector<double> out(std::min(high.size(), low.size()), kMissing);
  for (std::size_t t = 0; t < out.size(); ++t) {
    if (is_missing(high[t]) || is_missing(low[t]) || low[t] <= 0.0) continue;
    out[t] = std::log(high[t]) - std::log(low[t]);
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order;
  std::vector<double> out;
  ranks_into(x, order, out);
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  std::vector<double> xv, yv;
  std::size_t n = std::min(x.size(), y.size());
  xv.reserve(n);
  yv.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_missing(x[i]) || is_missing(y[i])) continue;
    xv.push_back(x[i]);
    yv.push_back(y[i]);
  }
  if (xv.size() < 3) return kMissing;
  std::vector<std::size_t> order;
  std::vector<double> rx, ry;
  ranks_into(xv, order, rx);
  ranks_into(yv, order, ry);
  return pearson(rx, ry);
}

std::vector<double> rolling_spearman(std::span<const double> x,
                                     std::span<const double> y, int window,
                                     int min_obs) {
  if (min_obs <= 0)
    min_obs = static_cast<int>(std::ceil(0.75 * static_cast<double>(window)));
  std::size_t n = std::min(x.size(), y.size());
  std::vector<double> out(n, kMissing);
  std::vector<double> xv, yv, rx, ry;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t lo = t + 1 >= static_cast<std::size_t>(window)
                         ? t + 1 - static_cast<std::size_t>(window)
                         : 0;
    xv.clear();
    yv.clear();
    for (std::size_t i = lo; i <= t; ++i) {
      if (is_missing(x[i]) || is_missing(y[i])) continue;
      xv.push_back(x[i]);
      yv.push_back(y[i]);
    }
    if (static_cast<int>(xv.size()) < std::max(min_obs, 3)) continue;
    ranks_into(xv, order, rx);
    ranks_into(yv, order, ry);
    out[t] = pearson(rx, ry);
  }
  return out;
}

int CorrelationPanel::pair_index(PairKey key) const {
  if (key.a > key.b) std::swap(key.a, key.b);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i] == key) return static_cast<int>(i);
  return -1;
}

double CorrelationPanel::sc(int pair, int t) const {
  double r = raw[pair][t];
  if (is_missing(r)) return kMissing;
  if (cs_n[t] < min_cross_section) return kMissing;
  double sd = cs_sd[t];
  if (is_missing(sd) || sd <= 0.0) return kMissing;
  return (r - cs_mean[t]) / sd;
}

std::vector<double> CorrelationPanel::sc_series(int pair) const {
  std::vector<double> out(n_days, kMissing);
  for (int t = 0; t < n_days; ++t) out[t] = sc(pair, t);
  return out;
}

std::vector<double> metric_series(const ingest::AssetPanel& panel, int asset,
                                  SeriesKind kind) {
  using ingest::Metric;
  auto copy = [&](Metric m) {
    auto r = panel.row(m, asset);
    return std::vector<double>(r.begin(), r.end());
  };
  switch (kind) {
    case SeriesKind::Return:
      return relative_change(panel.row(Metric::Price, asset));
    case SeriesKind::VolumeChange:
      return relative_change(panel.row(Metric::Volume, asset));
    case SeriesKind::CapChange:
      return relative_change(panel.row(Metric::MarketCap, asset));
    case SeriesKind::Price:
      return copy(Metric::Price);
    case SeriesKind::Volume:
      return copy(Metric::Volume);
    case SeriesKind::MarketCap:
      return copy(Metric::MarketCap);
    case SeriesKind::Volatility:
      return log_range_volatility(panel.row(Metric::High, asset),
                                  panel.row(Metric::Low, asset));
  }
  return {};
}

void standardize_cross_section(CorrelationPanel& panel,
                               std::span<const int> ecology_pairs) {
  panel.ecology.assign(ecology_pairs.begin(), ecology_pairs.end());
  panel.cs_mean.assign(panel.n_days, kMissing);
  panel.cs_sd.assign(panel.n_days, kMissing);
  panel.cs_n.assign(panel.n_days, 0);
  std::vector<double> values;
  for (int t = 0; t < panel.n_days; ++t) {
    values.clear();
    for (int k : ecology_pairs) {
      double v = panel.raw[k][t];
      if (!is_missing(v)) values.push_back(v);
    }
    panel.cs_n[t] = static_cast<int>(values.size());
    if (values.empty()) continue;
    double mean = pairwise_sum(values) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    panel.cs_mean[t] = mean;
    panel.cs_sd[t] = std::sqrt(ss / static_cast<double>(values.size()));
  }
}

CorrelationPanel compute_correlation_panel(const ingest::AssetPanel& panel,
                                           std::span<const PairKey> extra_pairs,
                                           const PanelOptions& options) {
  CorrelationPanel out;
  out.assets = panel.assets;
  out.start = panel.start;
  out.n_days = panel.n_days;
  out.min_cross_section = options.min_cross_section;

  const int n_assets = static_cast<int>(panel.assets.size());
  std::vector<PairKey> ecology;
  const std::size_t total =
      static_cast<std::size_t>(n_assets) * (n_assets - 1) / 2;
  if (options.cross_section_sample && *options.cross_section_sample < total) {
    // Seeded subsample of the pair universe, without replacement.
    Rng rng(derive_seed(options.seed, 0x9a1c5));
    std::set<std::size_t> chosen;
    while (chosen.size() < *options.cross_section_sample)
      chosen.insert(static_cast<std::size_t>(rng.below(total)));
    for (std::size_t flat : chosen) {
      // decode flat index into (a, b), a < b
      std::size_t a = 0, remaining = flat;
      for (; a + 1 < static_cast<std::size_t>(n_assets); ++a) {
        std::size_t row = static_cast<std::size_t>(n_assets) - 1 - a;
        if (remaining < row) break;
        remaining -= row;
      }
      ecology.push_back(
          {static_cast<int>(a), static_cast<int>(a + 1 + remaining)});
    }
  } else {
    for (int a = 0; a < n_assets; ++a)
      for (int b = a + 1; b < n_assets; ++b) ecology.push_back({a, b});
  }

  out.pairs = ecology;
  std::vector<int> ecology_idx(ecology.size());
  std::iota(ecology_idx.begin(), ecology_idx.end(), 0);
  std::set<PairKey> present(ecology.begin(), ecology.end());
  for (PairKey key : extra_pairs) {
    if (key.a > key.b) std::swap(key.a, key.b);
    if (present.insert(key).second) out.pairs.push_back(key);
  }

  // Per-asset input series, then per-pair rolling correlations in parallel.
  std::vector<std::vector<double>> inputs(n_assets);
  parallel_for(n_assets, options.threads, [&](std::size_t a) {
    inputs[a] = metric_series(panel, static_cast<int>(a), options.kind);
  });
  out.raw.resize(out.pairs.size());
  parallel_for(out.pairs.size(), options.threads, [&](std::size_t k) {
    const PairKey& p = out.pairs[k];
    out.raw[k] = rolling_spearman(inputs[p.a], inputs[p.b], options.window,
                                  options.min_obs);
  });

  standardize_cross_section(out, ecology_idx);
  return out;
}

void write_panel(std::ostream& out, const CorrelationPanel& panel,
                 std::span<const int> pair_indices,
                 std::span<const std::string> pair_ids) {
  out << "pair_id,date,raw_corr,sc,cross_section_n\n";
  for (std::size_t i = 0; i < pair_indices.size(); ++i) {
    int k = pair_indices[i];
    for (int t = 0; t < panel.n_days; ++t) {
      double r = panel.raw[k][t];
      if (is_missing(r)) continue;
      out << pair_ids[i] << ',' << format_date(panel.day_at(t)) << ','
          << csv::format_double(r) << ',' << csv::format_double(panel.sc(k, t))
          << ',' << panel.cs_n[t] << '\n';
    }
  }
}

}  // namespace codev::series
