#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/ingest.hpp"
#include "codev/missing.hpp"

namespace codev::series {

// out[t] = (x[t] - x[t-1]) / x[t-1]; missing when an operand is missing or
// the denominator is zero. out[0] is always missing.
std::vector<double> relative_change(std::span<const double> x);

// v(t) = ln(high) - ln(low); missing when either is missing or low <= 0.
std::vector<double> log_range_volatility(std::span<const double> high,
                                         std::span<const double> low);

// Average-fractional ranks (ties get the mean of their rank block).
std::vector<double> average_ranks(std::span<const double> x);

// Tie-aware Spearman: Pearson on average ranks after pairwise deletion of
// missing entries. NaN when fewer than 3 pairs survive or either rank
// variance is zero.
double spearman(std::span<const double> x, std::span<const double> y);

// Backward rolling Spearman: value at t covers days (t-window, t];
// missing when fewer than min_obs valid pairs. min_obs <= 0 selects the
// default ceil(0.75 * window).
std::vector<double> rolling_spearman(std::span<const double> x,
                                     std::span<const double> y, int window,
                                     int min_obs = 0);

struct PairKey {
  int a = -1, b = -1;  // asset indices, a < b
  bool operator==(const PairKey&) const = default;
  auto operator<=>(const PairKey&) const = default;
};

// Raw rolling correlations for a set of pairs plus per-day cross-sectional
// statistics, from which standardized correlations (SC) are read off.
struct CorrelationPanel {
  std::vector<std::string> assets;  // shared asset order
  Day start = 0;
  int n_days = 0;
  std::vector<PairKey> pairs;
  std::vector<std::vector<double>> raw;  // [pair][day]
  std::vector<int> ecology;              // pair indices in the cross-section
  std::vector<double> cs_mean, cs_sd;    // per day, over the ecology
  std::vector<int> cs_n;
  int min_cross_section = 10;

  Day day_at(int t) const { return start + t; }
  int day_index(Day d) const {
    int i = static_cast<int>(d - start);
    return (i >= 0 && i < n_days) ? i : -1;
  }
  int pair_index(PairKey key) const;

  // Standardized correlation SC_k(t); missing when the raw value is missing,
  // the cross-section is below the floor, or sigma is zero.
  double sc(int pair, int t) const;
  std::vector<double> sc_series(int pair) const;
};

enum class SeriesKind {
  Return,        // relative change of price
  VolumeChange,  // relative change of volume
  CapChange,     // relative change of market cap
  Price,
  Volume,
  MarketCap,
  Volatility  // ln(high) - ln(low)
};

std::vector<double> metric_series(const ingest::AssetPanel& panel, int asset,
                                  SeriesKind kind);

struct PanelOptions {
  SeriesKind kind = SeriesKind::Return;
  int window = 120;
  int min_obs = 0;  // 0 -> ceil(0.75 * window)
  // Ecology cross-section: all pairs by default, or a seeded subsample.
  std::optional<std::size_t> cross_section_sample;
  std::uint64_t seed = 0;
  int min_cross_section = 10;
  int threads = 1;
};

// Computes raw rolling correlations for the ecology pairs (all unordered
// asset pairs, or a subsample) plus any extra pairs, then fills the per-day
// cross-sectional mean and population sigma over the ecology pairs.
CorrelationPanel compute_correlation_panel(const ingest::AssetPanel& panel,
                                           std::span<const PairKey> extra_pairs,
                                           const PanelOptions& options);

// Recomputes cs_mean/cs_sd/cs_n over the given ecology pair indices.
void standardize_cross_section(CorrelationPanel& panel,
                               std::span<const int> ecology_pairs);

// `pair_id,date,raw_corr,sc,cross_section_n`
void write_panel(std::ostream& out, const CorrelationPanel& panel,
                 std::span<const int> pair_indices,
                 std::span<const std::string> pair_ids);

}  // namespace codev::series
