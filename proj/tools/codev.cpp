// codev: co-development network + market event-study pipeline.
//
// Subcommands: ingest, network, eventstudy, nullmodel, synth, report.
// Every run writes a manifest.json (effective config, hash, seed) next to
// its outputs; identical config + seed reproduce outputs byte-for-byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "codev/conet.hpp"
#include "codev/csv.hpp"
#include "codev/error.hpp"
#include "codev/eventstudy.hpp"
#include "codev/ingest.hpp"
#include "codev/manifest.hpp"
#include "codev/nullmodels.hpp"
#include "codev/rng.hpp"
#include "codev/series.hpp"
#include "codev/synthgen.hpp"

namespace fs = std::filesystem;
using namespace codev;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot open " + p.string());
  return f;
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

const std::vector<std::string> kDecisions = {
    "month = 30 days; window defaults: rolling 120d, before [-120,-1], after [75,195]",
    "cross-sectional sigma is the population standard deviation",
    "rolling-window completeness floor: ceil(0.75 * window) paired days",
    "pull-request connections dated by the merged-event timestamp",
    "source discrepancy rule: |a-b|/min(a,b) > ratio discards the cell",
    "keep/dismiss horizon: 90 days after connection",
    "same-instant first edits leave the pair direction undefined",
};

struct DatasetOnDisk {
  std::vector<ingest::EventRecord> events;
  ingest::AssetPanel panel;
  std::map<std::string, std::string> mapping;
};

DatasetOnDisk load_dataset(const fs::path& dir) {
  DatasetOnDisk ds;
  auto ev = open_in(dir / "events.jsonl");
  ingest::DatasetConfig cfg;  // stored events are already filtered
  ds.events = ingest::parse_event_log(ev, cfg);
  auto mk = open_in(dir / "panel.csv");
  ds.panel = ingest::read_market_table(mk);
  auto mp = open_in(dir / "mapping.csv");
  ds.mapping = ingest::read_mapping(mp);
  return ds;
}

void write_mapping(std::ostream& out,
                   const std::map<std::string, std::string>& mapping) {
  out << "project,asset\n";
  for (const auto& [p, a] : mapping) out << p << ',' << a << '\n';
}

manifest::Config base_config(const std::string& config_path) {
  manifest::Config cfg;
  if (!config_path.empty()) {
    auto in = open_in(config_path);
    cfg = manifest::Config::load(in);
  }
  return cfg;
}

void emit_manifest(const fs::path& dir, manifest::RunManifest m) {
  m.decisions = kDecisions;
  auto out = open_out(dir / "manifest.json");
  manifest::write(out, m);
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& config_path, const std::string& events_path,
               const std::string& market_path,
               const std::string& market_secondary, const std::string& mapping_path,
               const std::string& out_dir) {
  auto cfg = base_config(config_path);
  ingest::DatasetConfig dc;
  dc.min_avg_volume = cfg.get_double("min_avg_volume", dc.min_avg_volume);
  dc.discrepancy_ratio = cfg.get_double("discrepancy_ratio", dc.discrepancy_ratio);
  dc.bot_substring = cfg.get_or("bot_substring", dc.bot_substring);
  if (auto s = cfg.get("study_start")) dc.study_start = parse_date(*s);
  if (auto s = cfg.get("study_end")) dc.study_end = parse_date(*s);

  ingest::ParseReport report;
  auto ev_in = open_in(events_path);
  auto events = ingest::parse_event_log(ev_in, dc, &report);

  auto mk_in = open_in(market_path);
  auto panel = ingest::read_market_table(mk_in);
  if (!market_secondary.empty()) {
    auto mk2_in = open_in(market_secondary);
    auto secondary = ingest::read_market_table(mk2_in);
    panel = ingest::reconcile_sources(panel, secondary, dc.discrepancy_ratio);
  }

  auto mp_in = open_in(mapping_path);
  auto mapping = ingest::read_mapping(mp_in);

  auto ds = ingest::build_dataset(std::move(events), panel, mapping, dc);
  ds.parse_report = report;

  fs::create_directories(out_dir);
  {
    auto out = open_out(fs::path(out_dir) / "events.jsonl");
    ingest::write_event_log(out, ds.events);
  }
  {
    auto out = open_out(fs::path(out_dir) / "panel.csv");
    ingest::write_market_table(out, ds.panel);
  }
  {
    auto out = open_out(fs::path(out_dir) / "mapping.csv");
    write_mapping(out, ds.project_to_asset);
  }
  {
    auto out = open_out(fs::path(out_dir) / "unmapped.csv");
    out << "project,events\n";
    for (const auto& [p, n] : ds.unmapped_projects) out << p << ',' << n << '\n';
  }

  manifest::RunManifest m;
  m.command = "ingest";
  m.effective = cfg;
  m.counters["events"] = std::to_string(ds.events.size());
  m.counters["malformed_lines"] = std::to_string(report.malformed);
  m.counters["out_of_window"] = std::to_string(report.out_of_window);
  m.counters["dropped_by_filter"] = std::to_string(ds.dropped_by_filter);
  m.counters["eligible_assets"] = std::to_string(ds.panel.assets.size());
  m.counters["unmapped_projects"] = std::to_string(ds.unmapped_projects.size());
  m.outputs["events"] = "events.jsonl";
  m.outputs["panel"] = "panel.csv";
  emit_manifest(out_dir, std::move(m));
  std::cout << "ingest: " << ds.events.size() << " events, "
            << ds.panel.assets.size() << " eligible assets\n";
  return 0;
}

int cmd_network(const std::string& config_path, const std::string& dataset_dir,
                const std::string& out_dir, bool one_link_only) {
  auto cfg = base_config(config_path);
  auto ds = load_dataset(dataset_dir);
  auto bipartite = conet::build_bipartite(ds.events);
  auto graph = conet::project_graph(bipartite);
  auto connections = conet::detect_connections(ds.events);
  if (one_link_only) connections = conet::one_link_only(std::move(connections));

  fs::create_directories(out_dir);
  {
    auto out = open_out(fs::path(out_dir) / "edges.csv");
    conet::write_edge_list(out, connections);
  }
  {
    auto out = open_out(fs::path(out_dir) / "degree_histogram.csv");
    conet::write_degree_histogram(out, graph);
  }
  {
    auto out = open_out(fs::path(out_dir) / "degrees.csv");
    out << "project,degree\n";
    auto deg = graph.degrees();
    for (std::size_t i = 0; i < graph.projects.size(); ++i)
      if (deg[i] > 0) out << graph.projects[i] << ',' << deg[i] << '\n';
  }

  auto components = conet::connected_components(graph);
  nlohmann::json stats;
  stats["links"] = graph.edges.size();
  stats["non_isolated_nodes"] =
      std::accumulate(components.begin(), components.end(), 0);
  stats["components"] = components;
  stats["giant_component"] = components.empty() ? 0 : components.front();
  if (!graph.edges.empty()) {
    auto a = conet::assortativity_coefficient(graph);
    if (a)
      stats["assortativity"] = *a;
    else
      stats["assortativity"] = nullptr;
  }
  {
    nlohmann::json dc = nlohmann::json::array();
    for (auto [n, devs] : conet::developer_connection_counts(connections))
      dc.push_back({{"connections", n}, {"developers", devs}});
    stats["developer_connection_counts"] = dc;
  }
  {
    nlohmann::json nl = nlohmann::json::array();
    for (auto [day, count] : conet::new_links_per_period(connections, 30))
      nl.push_back({{"period_start", format_date(day)}, {"count", count}});
    stats["new_links_per_30d"] = nl;
  }
  {
    auto out = open_out(fs::path(out_dir) / "network_stats.json");
    out << stats.dump(2) << '\n';
  }

  manifest::RunManifest m;
  m.command = "network";
  m.effective = cfg;
  m.effective.set("one_link_only", one_link_only ? "true" : "false");
  m.counters["links"] = std::to_string(graph.edges.size());
  m.counters["connections"] = std::to_string(connections.size());
  m.outputs["edges"] = "edges.csv";
  m.outputs["stats"] = "network_stats.json";
  emit_manifest(out_dir, std::move(m));
  std::cout << "network: " << graph.edges.size() << " links, giant component "
            << (components.empty() ? 0 : components.front()) << "\n";
  return 0;
}

struct EventStudyArgs {
  std::string config_path, dataset_dir, out_dir;
  std::uint64_t seed = 0;
  int window_days = 120;
  std::string before = "-120:-1";
  std::string after = "75:195";
  std::size_t bootstrap_n = 10000;
  std::string null_model;  // "", "rt", "rta", "orta"
  std::vector<std::string> exclude_assets;
  bool one_link_only = false;
  int threads = 1;
};

std::pair<int, int> parse_window(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw FormatError("window must be lo:hi, got '" + s + "'");
  return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

int cmd_eventstudy(const EventStudyArgs& args) {
  auto cfg = base_config(args.config_path);
  auto [before_lo, before_hi] = parse_window(args.before);
  auto [after_lo, after_hi] = parse_window(args.after);
  int d_min = static_cast<int>(cfg.get_int("d_min", -180));
  int d_max = static_cast<int>(cfg.get_int("d_max", 400));

  auto ds = load_dataset(args.dataset_dir);
  auto connections = conet::detect_connections(ds.events);
  if (args.one_link_only)
    connections = conet::one_link_only(std::move(connections));
  auto infos = eventstudy::make_pair_infos(
      connections, ds.mapping, ds.events,
      static_cast<int>(cfg.get_int("keep_horizon_days", 90)));

  std::set<std::string> excluded(args.exclude_assets.begin(),
                                 args.exclude_assets.end());
  std::erase_if(infos, [&](const eventstudy::PairInfo& p) {
    return excluded.count(p.asset_i) || excluded.count(p.asset_j) ||
           ds.panel.index_of(p.asset_i) < 0 || ds.panel.index_of(p.asset_j) < 0;
  });
  if (infos.empty())
    throw InfeasibleError("eventstudy: no linked pairs on the panel");

  // Linked set and null cohort (before the correlation pass, so the cohort's
  // pairs are part of the computed extra pairs).
  std::set<nullmodels::PairId> linked_set;
  std::vector<nullmodels::LinkedPair> linked_pairs;
  std::vector<Day> connection_days;
  for (const auto& p : infos) {
    linked_set.insert(nullmodels::make_pair_id(p.asset_i, p.asset_j));
    linked_pairs.push_back({p.asset_i, p.asset_j, p.connection_day});
    connection_days.push_back(p.connection_day);
  }
  nullmodels::Cohort cohort;
  if (!args.null_model.empty()) {
    auto n_null = static_cast<std::size_t>(cfg.get_int("null_cohort_size", 10000));
    int tolerance = static_cast<int>(cfg.get_int("age_tolerance_days", 7));
    if (args.null_model == "rt")
      cohort = nullmodels::sample_rt(ds.panel.assets, linked_set,
                                     connection_days, n_null, args.seed);
    else if (args.null_model == "rta")
      cohort = nullmodels::sample_rta(linked_pairs, ds.panel, linked_set,
                                      tolerance, args.seed);
    else if (args.null_model == "orta")
      cohort = nullmodels::sample_orta(linked_pairs, ds.panel, linked_set,
                                       tolerance, args.seed);
    else
      throw FormatError("unknown null model '" + args.null_model + "'");
  }

  series::PanelOptions popts;
  popts.window = args.window_days;
  popts.threads = args.threads;
  popts.seed = args.seed;
  if (auto m = cfg.get("cross_section_sample"))
    popts.cross_section_sample = static_cast<std::size_t>(std::stoul(*m));
  std::vector<series::PairKey> extra;
  auto add_pair = [&](const std::string& a, const std::string& b) {
    extra.push_back({ds.panel.index_of(a), ds.panel.index_of(b)});
  };
  for (const auto& p : infos) add_pair(p.asset_i, p.asset_j);
  for (const auto& p : cohort.pairs) add_pair(p.asset_i, p.asset_j);
  auto corr = series::compute_correlation_panel(ds.panel, extra, popts);

  auto rows_for = [&](auto const& list, auto id_of, auto key_of, auto day_of) {
    std::vector<eventstudy::PairSeries> rows;
    for (const auto& item : list) {
      int k = corr.pair_index(key_of(item));
      if (k < 0) continue;
      rows.push_back({id_of(item), corr.sc_series(k), corr.start, day_of(item)});
    }
    return rows;
  };
  auto linked_rows = rows_for(
      infos, [](const auto& p) { return p.id; },
      [&](const auto& p) {
        return series::PairKey{ds.panel.index_of(p.asset_i),
                               ds.panel.index_of(p.asset_j)};
      },
      [](const auto& p) { return p.connection_day; });
  auto aligned = eventstudy::align_panel(linked_rows, d_min, d_max);

  auto mean_curve = eventstudy::bootstrap_mean_curve(aligned, args.bootstrap_n,
                                                     args.seed, args.threads);
  auto median_curve = eventstudy::bootstrap_median_curve(
      aligned, args.bootstrap_n, derive_seed(args.seed, 0x3ed), args.threads);
  auto deltas =
      eventstudy::before_after_deltas(aligned, before_lo, before_hi, after_lo,
                                      after_hi);
  auto fraction = eventstudy::fraction_increasing(deltas.summaries,
                                                  args.bootstrap_n, args.seed);

  fs::create_directories(args.out_dir);
  fs::path out(args.out_dir);
  {
    auto f = open_out(out / "curve_mean.csv");
    eventstudy::write_curve(f, mean_curve);
  }
  {
    auto f = open_out(out / "curve_median.csv");
    eventstudy::write_curve(f, median_curve);
  }
  {
    auto f = open_out(out / "deltas.csv");
    eventstudy::write_deltas(f, deltas);
  }

  // grey Fig-3 baseline: mean SC over the 3 months before connection
  double baseline = kMissing;
  {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : aligned.cells)
      for (int d = -90; d <= -1; ++d) {
        if (d < aligned.d_min || d > aligned.d_max) continue;
        double v = row[aligned.col(d)];
        if (is_missing(v)) continue;
        sum += v;
        ++n;
      }
    if (n > 0) baseline = sum / static_cast<double>(n);
  }

  nlohmann::json summary;
  summary["n_linked_pairs"] = infos.size();
  summary["n_aligned_rows"] = aligned.row_ids.size();
  summary["excluded_pairs"] = deltas.excluded;
  summary["fraction_increasing"] = fraction.fraction;
  summary["fraction_ci"] = {fraction.ci_lo, fraction.ci_hi};
  summary["pre_connection_baseline"] = baseline;

  // sigmoid transition fit on the mean curve
  try {
    auto fit = eventstudy::fit_transition_sigmoid(
        mean_curve, static_cast<std::size_t>(cfg.get_int("mcmc_steps", 20000)),
        derive_seed(args.seed, 0x519));
    nlohmann::json jf;
    for (std::size_t i = 0; i < fit.param_names.size(); ++i)
      jf[fit.param_names[i]] = {{"mean", fit.mean[i]}, {"sd", fit.sd[i]}};
    jf["acceptance_rate"] = fit.acceptance_rate;
    summary["sigmoid_fit"] = jf;
  } catch (const Error& e) {
    summary["sigmoid_fit"] = e.what();
  }

  // characteristics + the six class comparisons
  auto chars = eventstudy::pair_characteristics(infos, ds.panel);
  {
    auto f = open_out(out / "characteristics.csv");
    f << "pair_id,cap_diff,volume_diff,age_diff,older_age,younger_age,"
         "younger_is_second,lower_cap_is_second,top10,keep,kind,connection_day\n";
    for (const auto& c : chars) {
      f << c.id << ',' << csv::format_double(c.cap_diff) << ','
        << csv::format_double(c.volume_diff) << ','
        << csv::format_double(c.age_diff) << ','
        << csv::format_double(c.older_age) << ','
        << csv::format_double(c.younger_age) << ','
        << (c.direction_defined ? (c.younger_is_second ? "1" : "0") : "") << ','
        << (c.direction_defined ? (c.lower_cap_is_second ? "1" : "0") : "")
        << ',' << (c.has_top10 ? 1 : 0) << ',' << (c.keep ? 1 : 0) << ','
        << ingest::kind_label(c.kind, "") << ','
        << format_date(c.connection_day) << '\n';
    }
  }
  {
    std::map<std::string, double> delta_by_id;
    for (const auto& s : deltas.summaries) delta_by_id[s.id] = s.delta;
    auto deltas_of = [&](const std::vector<std::string>& ids) {
      std::vector<double> v;
      for (const auto& id : ids)
        if (auto it = delta_by_id.find(id); it != delta_by_id.end())
          v.push_back(it->second);
      return v;
    };
    nlohmann::json classes;
    for (auto crit : {eventstudy::Criterion::YoungSecond,
                      eventstudy::Criterion::CapDiffMedian,
                      eventstudy::Criterion::KeepDismiss,
                      eventstudy::Criterion::Top10,
                      eventstudy::Criterion::PushPull,
                      eventstudy::Criterion::LateEarly}) {
      auto cls = eventstudy::classify_pairs(chars, crit);
      auto da = deltas_of(cls.a), db = deltas_of(cls.b);
      nlohmann::json jc;
      jc["class_a"] = cls.name_a;
      jc["class_b"] = cls.name_b;
      jc["n_a"] = da.size();
      jc["n_b"] = db.size();
      nlohmann::json tests = nlohmann::json::array();
      for (const auto& t : eventstudy::compare_classes(da, db)) {
        tests.push_back({{"test", t.test},
                         {"statistic", t.valid ? nlohmann::json(t.statistic)
                                               : nlohmann::json()},
                         {"p", t.valid ? nlohmann::json(t.p_value)
                                       : nlohmann::json()},
                         {"alpha", t.alpha},
                         {"reject", t.reject},
                         {"note", t.note}});
      }
      jc["tests"] = tests;
      classes[cls.name_a + "_vs_" + cls.name_b] = jc;
    }
    summary["class_comparisons"] = classes;
  }

  if (!args.null_model.empty()) {
    auto null_rows = rows_for(
        cohort.pairs,
        [](const auto& p) { return p.asset_i + "|" + p.asset_j; },
        [&](const auto& p) {
          return series::PairKey{ds.panel.index_of(p.asset_i),
                                 ds.panel.index_of(p.asset_j)};
        },
        [](const auto& p) { return p.pseudo_day; });
    auto null_aligned = eventstudy::align_panel(null_rows, d_min, d_max);
    auto resized = eventstudy::resize_columns(null_aligned, aligned.n_d,
                                              derive_seed(args.seed, 0x9d));
    auto null_curve = eventstudy::bootstrap_mean_curve(
        resized, args.bootstrap_n, derive_seed(args.seed, 0x9c), args.threads);
    auto null_deltas = eventstudy::before_after_deltas(
        null_aligned, before_lo, before_hi, after_lo, after_hi);
    {
      auto f = open_out(out / "curve_null.csv");
      eventstudy::write_curve(f, null_curve);
    }
    {
      auto f = open_out(out / "deltas_null.csv");
      eventstudy::write_deltas(f, null_deltas);
    }
    auto tests = eventstudy::compare_classes(deltas.deltas(),
                                             null_deltas.deltas());
    auto f = open_out(out / "tests_linked_vs_null.jsonl");
    eventstudy::write_test_results(f, tests);
    summary["null_model"] = args.null_model;
    summary["null_pairs"] = cohort.pairs.size();
    summary["null_skipped"] = cohort.skipped.size();
  }

  {
    auto f = open_out(out / "summary.json");
    f << summary.dump(2) << '\n';
  }

  manifest::RunManifest m;
  m.command = "eventstudy";
  m.effective = cfg;
  m.seed = args.seed;
  m.effective.set("window_days", std::to_string(args.window_days));
  m.effective.set("before", args.before);
  m.effective.set("after", args.after);
  m.effective.set("bootstrap_n", std::to_string(args.bootstrap_n));
  m.effective.set("null_model", args.null_model);
  m.effective.set("one_link_only", args.one_link_only ? "true" : "false");
  for (const auto& a : args.exclude_assets)
    m.effective.set("exclude_asset:" + a, "true");
  m.counters["linked_pairs"] = std::to_string(infos.size());
  m.outputs["curve_mean"] = "curve_mean.csv";
  m.outputs["summary"] = "summary.json";
  emit_manifest(args.out_dir, std::move(m));
  std::cout << "eventstudy: " << infos.size() << " linked pairs, fraction increasing "
            << fraction.fraction << "\n";
  return 0;
}

int cmd_nullmodel(const std::string& config_path, const std::string& dataset_dir,
                  const std::string& out_dir, const std::string& model,
                  std::size_t n, int tolerance, std::uint64_t seed) {
  auto cfg = base_config(config_path);
  auto ds = load_dataset(dataset_dir);
  auto connections = conet::detect_connections(ds.events);
  auto infos = eventstudy::make_pair_infos(connections, ds.mapping, ds.events);

  std::set<nullmodels::PairId> linked_set;
  std::vector<nullmodels::LinkedPair> linked_pairs;
  std::vector<Day> days;
  for (const auto& p : infos) {
    linked_set.insert(nullmodels::make_pair_id(p.asset_i, p.asset_j));
    linked_pairs.push_back({p.asset_i, p.asset_j, p.connection_day});
    days.push_back(p.connection_day);
  }
  if (linked_pairs.empty())
    throw InfeasibleError("nullmodel: no linked pairs in dataset");

  nullmodels::Cohort cohort;
  if (model == "rt")
    cohort = nullmodels::sample_rt(ds.panel.assets, linked_set, days, n, seed);
  else if (model == "rta")
    cohort = nullmodels::sample_rta(linked_pairs, ds.panel, linked_set,
                                    tolerance, seed);
  else if (model == "orta")
    cohort = nullmodels::sample_orta(linked_pairs, ds.panel, linked_set,
                                     tolerance, seed);
  else
    throw FormatError("unknown null model '" + model + "'");

  fs::create_directories(out_dir);
  {
    auto f = open_out(fs::path(out_dir) / "cohort.csv");
    nullmodels::write_cohort(f, cohort);
  }
  manifest::RunManifest m;
  m.command = "nullmodel";
  m.effective = cfg;
  m.seed = seed;
  m.effective.set("null_model", model);
  m.effective.set("n", std::to_string(n));
  m.effective.set("age_tolerance_days", std::to_string(tolerance));
  m.counters["pairs"] = std::to_string(cohort.pairs.size());
  m.counters["skipped"] = std::to_string(cohort.skipped.size());
  m.outputs["cohort"] = "cohort.csv";
  emit_manifest(out_dir, std::move(m));
  std::cout << "nullmodel: " << cohort.pairs.size() << " pairs ("
            << cohort.skipped.size() << " skipped)\n";
  return 0;
}

int cmd_synth(const std::string& scenario_path, const std::string& out_dir,
              std::uint64_t seed) {
  auto in = open_in(scenario_path);
  auto cfg = manifest::Config::load(in);

  synthgen::PanelSpec ps;
  ps.n_assets = static_cast<int>(cfg.get_int("n_assets", 20));
  ps.days = static_cast<int>(cfg.get_int("days", 720));
  ps.base_rho = cfg.get_double("base_rho", 0.1);
  ps.vol = cfg.get_double("vol", 0.02);
  ps.missing_rate = cfg.get_double("missing_rate", 0.0);
  ps.max_listing_stagger = static_cast<int>(cfg.get_int("max_listing_stagger", 0));
  if (auto s = cfg.get("start_date")) {
    auto d = parse_date(*s);
    if (!d) throw FormatError("scenario: bad start_date");
    ps.start = *d;
  }
  ps.seed = seed;
  auto gp = synthgen::gen_panel(ps);

  int n_planted = static_cast<int>(cfg.get_int("n_planted", 0));
  if (2 * n_planted > ps.n_assets)
    throw DataError("scenario: n_planted needs 2*n_planted <= n_assets");
  double rho_before = cfg.get_double("rho_before", ps.base_rho);
  double rho_after = cfg.get_double("rho_after", 0.6);
  int day_lo = static_cast<int>(cfg.get_int("bridge_day_min", ps.days / 3));
  int day_hi = static_cast<int>(cfg.get_int("bridge_day_max", 2 * ps.days / 3));

  synthgen::EventStreamSpec es;
  es.n_projects = ps.n_assets;
  es.n_devs = static_cast<int>(cfg.get_int("n_devs", ps.n_assets));
  es.activity_rate = cfg.get_double("activity_rate", 0.2);
  es.start = ps.start;
  es.end = ps.start + ps.days - 1;
  es.seed = seed;

  for (int k = 0; k < n_planted; ++k) {
    int ai = 2 * k, aj = 2 * k + 1;
    Day day = ps.start + day_lo +
              (n_planted > 1 ? (day_hi - day_lo) * k / (n_planted - 1) : 0);
    synthgen::PlantSpec plant;
    plant.asset_i = ai;
    plant.asset_j = aj;
    plant.switch_day = day;
    plant.rho_before = rho_before;
    plant.rho_after = rho_after;
    plant.seed = seed;
    synthgen::plant_synchronization(gp, plant);
    es.schedule.push_back({synthgen::bridge_developer_name(k),
                           synthgen::project_name(ai),
                           synthgen::project_name(aj), day});
  }
  auto ge = synthgen::gen_event_stream(es);

  fs::create_directories(out_dir);
  fs::path out(out_dir);
  {
    auto f = open_out(out / "panel.csv");
    ingest::write_market_table(f, gp.panel);
  }
  {
    auto f = open_out(out / "events.jsonl");
    ingest::write_event_log(f, ge.events);
  }
  {
    std::map<std::string, std::string> mapping;
    for (int a = 0; a < ps.n_assets; ++a)
      mapping[synthgen::project_name(a)] = synthgen::asset_name(a);
    auto f = open_out(out / "mapping.csv");
    write_mapping(f, mapping);
  }
  {
    auto f = open_out(out / "truth_connections.csv");
    conet::write_edge_list(f, ge.ground_truth);
  }

  manifest::RunManifest m;
  m.command = "synth";
  m.effective = cfg;
  m.seed = seed;
  m.counters["assets"] = std::to_string(ps.n_assets);
  m.counters["events"] = std::to_string(ge.events.size());
  m.counters["planted_pairs"] = std::to_string(n_planted);
  m.outputs["panel"] = "panel.csv";
  m.outputs["events"] = "events.jsonl";
  m.outputs["truth"] = "truth_connections.csv";
  emit_manifest(out_dir, std::move(m));
  std::cout << "synth: " << ge.events.size() << " events, " << n_planted
            << " planted pairs\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs,
               const std::string& out_path) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& dir : run_dirs) {
    auto f = open_in(fs::path(dir) / "manifest.json");
    nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
    if (j.is_discarded())
      throw FormatError("report: bad manifest in " + dir);
    j["run_dir"] = dir;
    runs.push_back(std::move(j));
  }
  nlohmann::json report{{"runs", runs}, {"version", manifest::kVersion}};
  if (out_path.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    auto f = open_out(out_path);
    f << report.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-development network and market event-study pipeline"};
  app.require_subcommand(1);

  std::string config_path, dataset_dir, out_dir;
  std::uint64_t seed = 0;

  auto* ing = app.add_subcommand("ingest", "build a validated dataset");
  std::string events_path, market_path, market_secondary, mapping_path;
  ing->add_option("--config", config_path);
  ing->add_option("--events", events_path)->required();
  ing->add_option("--market", market_path)->required();
  ing->add_option("--market-secondary", market_secondary);
  ing->add_option("--mapping", mapping_path)->required();
  ing->add_option("--out", out_dir)->required();

  auto* net = app.add_subcommand("network", "graph + network statistics");
  bool one_link_only = false;
  net->add_option("--config", config_path);
  net->add_option("--dataset", dataset_dir)->required();
  net->add_option("--out", out_dir)->required();
  net->add_flag("--one-link-only", one_link_only);

  auto* evs = app.add_subcommand("eventstudy", "aligned curves, deltas, tests");
  EventStudyArgs ea;
  evs->add_option("--config", ea.config_path);
  evs->add_option("--dataset", ea.dataset_dir)->required();
  evs->add_option("--out", ea.out_dir)->required();
  evs->add_option("--seed", ea.seed)->required();
  evs->add_option("--window-days", ea.window_days)->default_val(120);
  evs->add_option("--before", ea.before)->default_val("-120:-1");
  evs->add_option("--after", ea.after)->default_val("75:195");
  evs->add_option("--bootstrap-n", ea.bootstrap_n)->default_val(10000);
  evs->add_option("--null-model", ea.null_model)
      ->check(CLI::IsMember({"rt", "rta", "orta"}));
  evs->add_option("--exclude-asset", ea.exclude_assets);
  evs->add_flag("--one-link-only", ea.one_link_only);
  evs->add_option("--threads", ea.threads)->default_val(1);

  auto* nul = app.add_subcommand("nullmodel", "randomized pair cohorts");
  std::string null_model = "rt";
  std::size_t null_n = 10000;
  int tolerance = 7;
  nul->add_option("--config", config_path);
  nul->add_option("--dataset", dataset_dir)->required();
  nul->add_option("--out", out_dir)->required();
  nul->add_option("--null-model", null_model)
      ->check(CLI::IsMember({"rt", "rta", "orta"}));
  nul->add_option("--n", null_n)->default_val(10000);
  nul->add_option("--tolerance", tolerance)->default_val(7);
  nul->add_option("--seed", seed)->required();

  auto* syn = app.add_subcommand("synth", "synthetic ground-truth scenarios");
  std::string scenario_path;
  syn->add_option("--scenario", scenario_path)->required();
  syn->add_option("--out", out_dir)->required();
  syn->add_option("--seed", seed)->required();

  auto* rep = app.add_subcommand("report", "aggregate run manifests");
  std::vector<std::string> run_dirs;
  std::string report_out;
  rep->add_option("--run", run_dirs)->required();
  rep->add_option("--out", report_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ing)
      return cmd_ingest(config_path, events_path, market_path, market_secondary,
                        mapping_path, out_dir);
    if (*net) return cmd_network(config_path, dataset_dir, out_dir, one_link_only);
    if (*evs) return cmd_eventstudy(ea);
    if (*nul)
      return cmd_nullmodel(config_path, dataset_dir, out_dir, null_model,
                           null_n, tolerance, seed);
    if (*syn) return cmd_synth(scenario_path, out_dir, seed);
    if (*rep) return cmd_report(run_dirs, report_out);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
