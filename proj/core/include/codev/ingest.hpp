#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/missing.hpp"

namespace codev::ingest {

enum class EventKind { Push, MergedPullRequest, Other };

std::string kind_label(EventKind kind, const std::string& other_name);

struct EventRecord {
  std::string developer;
  std::string project;
  Instant timestamp = 0;
  EventKind kind = EventKind::Other;
  std::string kind_name;  // original label when kind == Other

  Day day() const { return day_of_instant(timestamp); }
  std::string label() const { return kind_label(kind, kind_name); }
};

enum class Metric { Price, Volume, MarketCap, High, Low };
inline constexpr int kNumMetrics = 5;
inline constexpr std::array<Metric, kNumMetrics> kAllMetrics = {
    Metric::Price, Metric::Volume, Metric::MarketCap, Metric::High,
    Metric::Low};

// Dense (asset x day) grids per metric, with NaN missing markers.
struct AssetPanel {
  std::vector<std::string> assets;
  std::unordered_map<std::string, int> asset_index;
  Day start = 0;
  int n_days = 0;
  std::array<std::vector<double>, kNumMetrics> grid;

  static AssetPanel make(std::vector<std::string> ids, Day start, int n_days);

  int index_of(const std::string& asset) const;
  int day_index(Day d) const {
    int i = static_cast<int>(d - start);
    return (i >= 0 && i < n_days) ? i : -1;
  }
  Day day_at(int index) const { return start + index; }

  double& at(Metric m, int asset, int day) {
    return grid[static_cast<int>(m)][static_cast<std::size_t>(asset) * n_days + day];
  }
  double at(Metric m, int asset, int day) const {
    return grid[static_cast<int>(m)][static_cast<std::size_t>(asset) * n_days + day];
  }
  std::span<const double> row(Metric m, int asset) const {
    return {grid[static_cast<int>(m)].data() +
                static_cast<std::size_t>(asset) * n_days,
            static_cast<std::size_t>(n_days)};
  }

  // First day index with a non-missing price (market listing day); -1 if none.
  int first_observed(int asset) const;

  // Mean of a metric over non-missing days; volume additionally treats
  // zero as a market-inactivity missing value. NaN when nothing is defined.
  double lifetime_mean(Metric m, int asset) const;

  AssetPanel restricted_to(std::span<const std::string> keep) const;
};

struct DatasetConfig {
  double min_avg_volume = 1e5;
  double discrepancy_ratio = 5.0;
  std::string bot_substring = "bot";
  std::vector<std::string> bot_allowlist;  // exact developer ids exempted
  std::vector<std::string> allowed_kinds = {"Push", "MergedPullRequest"};
  std::optional<Day> study_start;
  std::optional<Day> study_end;  // inclusive
};

struct ParseReport {
  std::size_t parsed = 0;
  std::size_t malformed = 0;
  std::size_t out_of_window = 0;
};

// Event log: newline-delimited JSON records with fields
// developer, project, timestamp (RFC-3339), kind.
// Throws IoError on an unreadable stream and FormatError when more than half
// of the non-empty lines are malformed.
std::vector<EventRecord> parse_event_log(std::istream& in,
                                         const DatasetConfig& config,
                                         ParseReport* report = nullptr);

void write_event_log(std::ostream& out, std::span<const EventRecord> events);

// Keeps allowed kinds, drops bot developers (case-insensitive substring,
// allowlist exempt). Stable order; idempotent.
std::vector<EventRecord> filter_events(std::vector<EventRecord> events,
                                       const DatasetConfig& config);

// Market table: header `asset,date,price,volume,market_cap[,high,low]`,
// empty cell = missing. At most one observation per (asset, date).
AssetPanel read_market_table(std::istream& in);
void write_market_table(std::ostream& out, const AssetPanel& panel);

// Per-cell source reconciliation: primary wins when defined; a cell defined
// in both sources with |a-b|/min(a,b) > ratio is discarded as missing.
// Zero-volume days become missing. Calendars must overlap.
AssetPanel reconcile_sources(const AssetPanel& primary,
                             const AssetPanel& secondary, double ratio);

// Assets whose lifetime mean volume (non-missing, non-zero days) meets the
// threshold, in panel order.
std::vector<std::string> eligible_assets(const AssetPanel& panel,
                                         double min_avg_volume);

struct Dataset {
  std::vector<EventRecord> events;  // filtered, mapped, sorted by timestamp
  AssetPanel panel;                 // eligible assets only
  std::map<std::string, std::string> project_to_asset;
  std::map<std::string, std::size_t> unmapped_projects;  // project -> events
  ParseReport parse_report;
  std::size_t dropped_by_filter = 0;
};

// Reads `project,asset` rows.
std::map<std::string, std::string> read_mapping(std::istream& in);

// Throws DataError when no asset is eligible.
Dataset build_dataset(std::vector<EventRecord> events, const AssetPanel& panel,
                      const std::map<std::string, std::string>& mapping,
                      const DatasetConfig& config);

}  // namespace codev::ingest
