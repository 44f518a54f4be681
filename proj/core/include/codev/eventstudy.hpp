#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/conet.hpp"
#include "codev/ingest.hpp"
#include "codev/series.hpp"
#include "codev/stats.hpp"

namespace codev::eventstudy {

// One pair's SC series and the calendar day it is aligned on (d = 0).
struct PairSeries {
  std::string id;
  std::vector<double> sc;
  Day series_start = 0;
  Day connection_day = 0;
};

// Rows = pairs, columns = event-day d; per-day N_d counts defined cells.
struct AlignedPanel {
  int d_min = -180, d_max = 400;
  std::vector<std::string> row_ids;
  std::vector<std::vector<double>> cells;  // [row][d - d_min]
  std::vector<int> n_d;

  int n_cols() const { return d_max - d_min + 1; }
  int col(int d) const { return d - d_min; }
};

AlignedPanel align_panel(std::span<const PairSeries> rows, int d_min = -180,
                         int d_max = 400);

struct BootstrapCurve {
  int d_min = 0;
  std::vector<double> center;  // mean (or median) of the resample statistic
  std::vector<double> spread;  // sd of resample means
  std::vector<double> q_lo, q_hi;  // median curve only: [0.025, 0.975]
  std::vector<int> n_d;
};

// Per day d: resample the N_d defined rows with replacement, average; the
// curve reports the mean and sd of the resample averages. Deterministic for
// a given seed at any thread count.
BootstrapCurve bootstrap_mean_curve(const AlignedPanel& panel, std::size_t n,
                                    std::uint64_t seed, int threads = 1);

// Median statistic with the [0.025, 0.975] quantile band of the resample
// distribution.
BootstrapCurve bootstrap_median_curve(const AlignedPanel& panel, std::size_t n,
                                      std::uint64_t seed, int threads = 1);

// Shrinks each column's defined cells to a per-day target count (seeded,
// day-indexed streams) so a null cohort matches the linked cohort's N_d.
AlignedPanel resize_columns(const AlignedPanel& panel,
                            std::span<const int> target_n_d,
                            std::uint64_t seed);

struct BeforeAfterSummary {
  std::string id;
  double before = kMissing;
  double after = kMissing;
  double delta = kMissing;
};

struct DeltaReport {
  std::vector<BeforeAfterSummary> summaries;
  std::size_t excluded = 0;  // pairs with an empty before or after window

  std::vector<double> deltas() const;
};

DeltaReport before_after_deltas(const AlignedPanel& panel, int before_lo = -120,
                                int before_hi = -1, int after_lo = 75,
                                int after_hi = 195);

struct FractionResult {
  double fraction = kMissing;
  double ci_lo = kMissing, ci_hi = kMissing;  // bootstrap over pairs
};

// Fraction of pairs with delta > 0 (ties count as non-increasing).
FractionResult fraction_increasing(std::span<const BeforeAfterSummary> summaries,
                                   std::size_t n_boot, std::uint64_t seed);

// Input for pair characteristics: a connection restated in asset ids.
struct PairInfo {
  std::string id;
  std::string asset_i, asset_j;
  Day connection_day = 0;
  ingest::EventKind kind = ingest::EventKind::Push;
  bool direction_defined = true;
  std::string second_edited_asset;  // meaningful when direction_defined
  bool keep = true;                 // developer kept editing the first project
};

// Restates connections as PairInfo and computes the keep/dismiss flag: keep
// means the connecting developer has an event on the first-edited project
// within keep_horizon days after the connection.
std::vector<PairInfo> make_pair_infos(
    std::span<const conet::ConnectionEvent> connections,
    const std::map<std::string, std::string>& project_to_asset,
    std::span<const ingest::EventRecord> events, int keep_horizon_days = 90);

struct PairCharacteristics {
  std::string id;
  double cap_diff = kMissing;     // |delta lifetime-average market cap|
  double volume_diff = kMissing;  // |delta lifetime-average volume|
  double age_diff = kMissing;     // |delta market age at connection| (days)
  double older_age = kMissing, younger_age = kMissing;
  bool direction_defined = true;
  bool younger_is_second = false;
  bool lower_cap_is_second = false;
  bool has_top10 = false;  // member in the top-10 pre-connection average cap
  bool keep = true;
  ingest::EventKind kind = ingest::EventKind::Push;
  Day connection_day = 0;
};

std::vector<PairCharacteristics> pair_characteristics(
    std::span<const PairInfo> pairs, const ingest::AssetPanel& panel,
    int top_k = 10);

enum class Criterion {
  YoungSecond,    // second-edited member is the younger one vs not
  CapDiffMedian,  // high-diff vs low-diff (median split on cap difference)
  KeepDismiss,    // dismiss vs keep
  Top10,          // top10 vs minor
  PushPull,       // push-connected vs pull-connected
  LateEarly       // late vs early (median split on connection date)
};

struct Classification {
  std::string name_a, name_b;
  std::vector<std::string> a, b;  // pair ids
};

Classification classify_pairs(std::span<const PairCharacteristics> chars,
                              Criterion criterion);

// Welch, Mann-Whitney U, Kolmogorov-Smirnov, Kruskal-Wallis, Mood.
std::vector<stats::TestResult> compare_classes(std::span<const double> a,
                                               std::span<const double> b,
                                               double alpha = 0.05);

// Fits a + b/(1+exp(-(d-d0)/tau)) to the defined part of a mean curve.
stats::FitResult fit_transition_sigmoid(const BootstrapCurve& curve,
                                        std::size_t n_steps = 20000,
                                        std::uint64_t seed = 1);

// `d,mean_sc,sd,n_pairs`
void write_curve(std::ostream& out, const BootstrapCurve& curve);
// `pair_id,before,after,delta`
void write_deltas(std::ostream& out, const DeltaReport& report);
// JSONL `{test, statistic, p, alpha, reject}`
void write_test_results(std::ostream& out,
                        std::span<const stats::TestResult> results);

}  // namespace codev::eventstudy
