#include "codev/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "codev/csv.hpp"
#include "codev/error.hpp"

#include "json.hpp"

namespace codev::ingest {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

EventKind kind_from_label(const std::string& label) {
  if (label == "Push" || label == "PushEvent") return EventKind::Push;
  if (label == "MergedPullRequest" || label == "PullRequestEvent")
    return EventKind::MergedPullRequest;
  return EventKind::Other;
}

}  // namespace

std::string kind_label(EventKind kind, const std::string& other_name) {
  switch (kind) {
    case EventKind::Push:
      return "Push";
    case EventKind::MergedPullRequest:
      return "MergedPullRequest";
    case EventKind::Other:
      return other_name.empty() ? "Other" : other_name;
  }
  return "Other";
}

AssetPanel AssetPanel::make(std::vector<std::string> ids, Day start,
                            int n_days) {
  AssetPanel p;
  p.assets = std::move(ids);
  p.start = start;
  p.n_days = n_days;
  for (std::size_t i = 0; i < p.assets.size(); ++i)
    p.asset_index[p.assets[i]] = static_cast<int>(i);
  for (auto& g : p.grid)
    g.assign(p.assets.size() * static_cast<std::size_t>(n_days), kMissing);
  return p;
}

int AssetPanel::index_of(const std::string& asset) const {
  auto it = asset_index.find(asset);
  return it == asset_index.end() ? -1 : it->second;
}

int AssetPanel::first_observed(int asset) const {
  auto prices = row(Metric::Price, asset);
  for (int t = 0; t < n_days; ++t)
    if (!is_missing(prices[t])) return t;
  return -1;
}

double AssetPanel::lifetime_mean(Metric m, int asset) const {
  auto values = row(m, asset);
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (is_missing(v)) continue;
    if (m == Metric::Volume && v == 0.0) continue;
    sum += v;
    ++n;
  }
  return n == 0 ? kMissing : sum / static_cast<double>(n);
}

AssetPanel AssetPanel::restricted_to(std::span<const std::string> keep) const {
  std::vector<std::string> ids;
  ids.reserve(keep.size());
  for (const auto& a : keep)
    if (asset_index.count(a)) ids.push_back(a);
  AssetPanel out = AssetPanel::make(std::move(ids), start, n_days);
  for (std::size_t i = 0; i < out.assets.size(); ++i) {
    int src = index_of(out.assets[i]);
    for (Metric m : kAllMetrics)
      for (int t = 0; t < n_days; ++t)
        out.at(m, static_cast<int>(i), t) = at(m, src, t);
  }
  return out;
}

std::vector<EventRecord> parse_event_log(std::istream& in,
                                         const DatasetConfig& config,
                                         ParseReport* report) {
  if (in.fail()) throw IoError("event log: unreadable stream");
  std::vector<EventRecord> out;
  ParseReport rep;
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++lines;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++rep.malformed;
      continue;
    }
    EventRecord rec;
    if (!j.contains("developer") || !j["developer"].is_string() ||
        !j.contains("project") || !j["project"].is_string() ||
        !j.contains("timestamp") || !j["timestamp"].is_string() ||
        !j.contains("kind") || !j["kind"].is_string()) {
      ++rep.malformed;
      continue;
    }
    rec.developer = j["developer"].get<std::string>();
    rec.project = j["project"].get<std::string>();
    auto ts = parse_rfc3339(j["timestamp"].get<std::string>());
    if (!ts || rec.developer.empty() || rec.project.empty()) {
      ++rep.malformed;
      continue;
    }
    rec.timestamp = *ts;
    std::string kind = j["kind"].get<std::string>();
    rec.kind = kind_from_label(kind);
    if (rec.kind == EventKind::Other) rec.kind_name = kind;
    Day d = rec.day();
    if ((config.study_start && d < *config.study_start) ||
        (config.study_end && d > *config.study_end)) {
      ++rep.out_of_window;
      continue;
    }
    ++rep.parsed;
    out.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("event log: read failure");
  if (lines > 0 && rep.malformed * 2 > lines)
    throw FormatError("event log: more than half the lines are malformed (" +
                      std::to_string(rep.malformed) + "/" +
                      std::to_string(lines) + ")");
  if (report) *report = rep;
  return out;
}

void write_event_log(std::ostream& out, std::span<const EventRecord> events) {
  for (const auto& e : events) {
    nlohmann::json j{{"developer", e.developer},
                     {"project", e.project},
                     {"timestamp", format_rfc3339(e.timestamp)},
                     {"kind", e.label()}};
    out << j.dump() << '\n';
  }
}

std::vector<EventRecord> filter_events(std::vector<EventRecord> events,
                                       const DatasetConfig& config) {
  std::set<std::string> allowed(config.allowed_kinds.begin(),
                                config.allowed_kinds.end());
  std::string needle = to_lower(config.bot_substring);
  std::set<std::string> allowlist(config.bot_allowlist.begin(),
                                  config.bot_allowlist.end());
  auto is_bot = [&](const std::string& dev) {
    if (needle.empty()) return false;
    if (allowlist.count(dev)) return false;
    return to_lower(dev).find(needle) != std::string::npos;
  };
  std::erase_if(events, [&](const EventRecord& e) {
    return !allowed.count(e.label()) || is_bot(e.developer);
  });
  return events;
}

AssetPanel read_market_table(std::istream& in) {
  if (in.fail()) throw IoError("market table: unreadable stream");
  auto table = csv::read_table(in);
  int c_asset = table.column("asset");
  int c_date = table.column("date");
  int c_price = table.column("price");
  int c_volume = table.column("volume");
  int c_cap = table.column("market_cap");
  int c_high = table.column("high");
  int c_low = table.column("low");
  if (c_asset < 0 || c_date < 0 || c_price < 0 || c_volume < 0 || c_cap < 0)
    throw FormatError("market table: missing required columns");

  struct Row {
    int asset;
    Day date;
    std::array<double, kNumMetrics> v;
  };
  std::vector<Row> rows;
  std::vector<std::string> assets;
  std::unordered_map<std::string, int> index;
  Day lo = 0, hi = 0;
  bool any = false;
  std::set<std::pair<int, Day>> seen;
  for (const auto& r : table.rows) {
    auto cell = [&](int c) -> std::string_view {
      return c >= 0 && c < static_cast<int>(r.size()) ? std::string_view(r[c])
                                                      : std::string_view();
    };
    auto date = parse_date(cell(c_date));
    if (!date || cell(c_asset).empty())
      throw FormatError("market table: bad row near asset '" +
                        std::string(cell(c_asset)) + "'");
    std::string asset(cell(c_asset));
    auto [it, inserted] = index.try_emplace(asset, (int)assets.size());
    if (inserted) assets.push_back(asset);
    if (!seen.insert({it->second, *date}).second)
      throw DataError("market table: duplicate observation for " + asset +
                      " on " + format_date(*date));
    auto num = [&](int c) {
      auto v = csv::parse_double(cell(c));
      return v ? *v : kMissing;
    };
    Row row{it->second, *date,
            {num(c_price), num(c_volume), num(c_cap), num(c_high), num(c_low)}};
    const double h = row.v[3], l = row.v[4];
    if (!is_missing(h) && !is_missing(l) && h < l)
      throw DataError("market table: high < low for " + asset + " on " +
                      format_date(*date));
    rows.push_back(row);
    lo = any ? std::min(lo, *date) : *date;
    hi = any ? std::max(hi, *date) : *date;
    any = true;
  }
  if (!any) return AssetPanel::make({}, 0, 0);
  AssetPanel panel = AssetPanel::make(std::move(assets), lo, hi - lo + 1);
  for (const auto& r : rows) {
    int t = panel.day_index(r.date);
    for (int m = 0; m < kNumMetrics; ++m)
      panel.at(static_cast<Metric>(m), r.asset, t) = r.v[m];
  }
  return panel;
}

void write_market_table(std::ostream& out, const AssetPanel& panel) {
  out << "asset,date,price,volume,market_cap,high,low\n";
  for (std::size_t a = 0; a < panel.assets.size(); ++a) {
    for (int t = 0; t < panel.n_days; ++t) {
      bool all_missing = true;
      for (Metric m : kAllMetrics)
        if (!is_missing(panel.at(m, static_cast<int>(a), t))) all_missing = false;
      if (all_missing) continue;
      out << panel.assets[a] << ',' << format_date(panel.day_at(t));
      for (Metric m : kAllMetrics)
        out << ',' << csv::format_double(panel.at(m, static_cast<int>(a), t));
      out << '\n';
    }
  }
}

AssetPanel reconcile_sources(const AssetPanel& primary,
                             const AssetPanel& secondary, double ratio) {
  Day lo = std::min(primary.start, secondary.start);
  Day p_end = primary.start + primary.n_days;
  Day s_end = secondary.start + secondary.n_days;
  Day hi = std::max(p_end, s_end);
  if (std::max(primary.start, secondary.start) >= std::min(p_end, s_end))
    throw DataError("reconcile: calendars do not overlap");

  std::vector<std::string> ids = primary.assets;
  for (const auto& a : secondary.assets)
    if (!primary.asset_index.count(a)) ids.push_back(a);
  AssetPanel out = AssetPanel::make(std::move(ids), lo, static_cast<int>(hi - lo));

  for (std::size_t i = 0; i < out.assets.size(); ++i) {
    int pa = primary.index_of(out.assets[i]);
    int sa = secondary.index_of(out.assets[i]);
    for (int t = 0; t < out.n_days; ++t) {
      Day d = out.day_at(t);
      int pt = pa >= 0 ? primary.day_index(d) : -1;
      int st = sa >= 0 ? secondary.day_index(d) : -1;
      for (Metric m : kAllMetrics) {
        double a = pt >= 0 ? primary.at(m, pa, pt) : kMissing;
        double b = st >= 0 ? secondary.at(m, sa, st) : kMissing;
        double v;
        if (!is_missing(a) && !is_missing(b)) {
          double denom = std::min(std::abs(a), std::abs(b));
          bool discard = denom == 0.0 ? a != b
                                      : std::abs(a - b) / denom > ratio;
          v = discard ? kMissing : a;
        } else {
          v = !is_missing(a) ? a : b;
        }
        if (m == Metric::Volume && v == 0.0) v = kMissing;
        out.at(m, static_cast<int>(i), t) = v;
      }
    }
  }
  return out;
}

std::vector<std::string> eligible_assets(const AssetPanel& panel,
                                         double min_avg_volume) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < panel.assets.size(); ++a) {
    double mean = panel.lifetime_mean(Metric::Volume, static_cast<int>(a));
    if (!is_missing(mean) && mean >= min_avg_volume)
      out.push_back(panel.assets[a]);
  }
  return out;
}

std::map<std::string, std::string> read_mapping(std::istream& in) {
  if (in.fail()) throw IoError("mapping: unreadable stream");
  auto table = csv::read_table(in);
  int c_project = table.column("project");
  int c_asset = table.column("asset");
  if (c_project < 0 || c_asset < 0)
    throw FormatError("mapping: expected header `project,asset`");
  std::map<std::string, std::string> out;
  for (const auto& r : table.rows) {
    if (static_cast<int>(r.size()) <= std::max(c_project, c_asset))
      throw FormatError("mapping: short row");
    out[r[c_project]] = r[c_asset];
  }
  return out;
}

Dataset build_dataset(std::vector<EventRecord> events, const AssetPanel& panel,
                      const std::map<std::string, std::string>& mapping,
                      const DatasetConfig& config) {
  Dataset ds;
  std::size_t before = events.size();
  events = filter_events(std::move(events), config);
  ds.dropped_by_filter = before - events.size();
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.timestamp < b.timestamp;
                   });

  auto keep = eligible_assets(panel, config.min_avg_volume);
  if (keep.empty()) throw DataError("dataset: no eligible assets");
  ds.panel = panel.restricted_to(keep);

  for (auto& e : events) {
    auto it = mapping.find(e.project);
    if (it == mapping.end() || ds.panel.index_of(it->second) < 0) {
      ++ds.unmapped_projects[e.project];
      continue;
    }
    ds.project_to_asset[e.project] = it->second;
    ds.events.push_back(std::move(e));
  }
  return ds;
}

}  // namespace codev::ingest
