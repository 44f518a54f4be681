#include "codev/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "codev/error.hpp"
#include "codev/rng.hpp"

namespace codev::synthgen {

namespace {

constexpr std::uint64_t kFactorStream = 0xfac;
constexpr std::uint64_t kAssetStream = 0xa55e7;
constexpr std::uint64_t kVolumeStream = 0x701d;
constexpr std::uint64_t kListingStream = 0x1157;
constexpr std::uint64_t kMissingStream = 0x3155;
constexpr std::uint64_t kPlantStream = 0x91a47;
constexpr std::uint64_t kActivityStream = 0xac71;

std::string numbered(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, index);
  return buf;
}

int poisson_draw(Rng& rng, double lambda) {
  // Knuth; lambda is small here
  double l = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > l);
  return k - 1;
}

// Rebuilds the price path of one asset from its returns, keeping the cap
// supply and regenerating high/low around the new price.
void rebuild_prices(ingest::AssetPanel& panel, int asset, int listing,
                    std::span<const double> returns, double supply, Rng& rng) {
  using ingest::Metric;
  double price = 100.0;
  for (int t = 0; t < panel.n_days; ++t) {
    if (t < listing) continue;
    if (t > listing) price *= 1.0 + returns[t];
    if (is_missing(panel.at(Metric::Price, asset, t))) continue;
    panel.at(Metric::Price, asset, t) = price;
    panel.at(Metric::MarketCap, asset, t) = supply * price;
    double spread = 0.01 * std::abs(rng.normal());
    panel.at(Metric::High, asset, t) = price * std::exp(spread);
    panel.at(Metric::Low, asset, t) = price * std::exp(-spread);
  }
}

}  // namespace

std::string project_name(int index) { return numbered("proj", index); }
std::string developer_name(int index) { return numbered("dev", index); }
std::string bridge_developer_name(int index) { return numbered("bridge", index); }
std::string asset_name(int index) { return numbered("asset", index); }

GeneratedPanel gen_panel(const PanelSpec& spec) {
  if (spec.n_assets < 1 || spec.days < 2 || spec.base_rho < 0.0 ||
      spec.base_rho >= 1.0)
    throw DataError("gen_panel: invalid spec");
  std::vector<std::string> ids;
  ids.reserve(spec.n_assets);
  for (int a = 0; a < spec.n_assets; ++a) ids.push_back(asset_name(a));
  GeneratedPanel gp;
  gp.spec = spec;
  gp.panel = ingest::AssetPanel::make(std::move(ids), spec.start, spec.days);

  // Common factor stream is independent of per-asset streams, so one asset's
  // draws never shift another's.
  std::vector<double> factor(spec.days);
  {
    Rng rng(derive_seed(spec.seed, kFactorStream));
    for (auto& f : factor) f = rng.normal();
  }

  Rng listing_rng(derive_seed(spec.seed, kListingStream));
  double load = std::sqrt(spec.base_rho);
  double idio = std::sqrt(1.0 - spec.base_rho);
  using ingest::Metric;
  for (int a = 0; a < spec.n_assets; ++a) {
    int listing = spec.max_listing_stagger > 0
                      ? static_cast<int>(listing_rng.below(
                            static_cast<std::uint64_t>(spec.max_listing_stagger) + 1))
                      : 0;
    gp.listing_offset.push_back(listing);

    Rng rng(derive_seed(spec.seed, kAssetStream, static_cast<std::uint64_t>(a)));
    double supply = std::exp(10.0 + 2.0 * rng.normal());
    gp.supply.push_back(supply);

    Rng vol_rng(derive_seed(spec.seed, kVolumeStream, static_cast<std::uint64_t>(a)));
    double volume_mu = std::log(1e6) + vol_rng.normal();

    double price = 100.0;
    for (int t = listing; t < spec.days; ++t) {
      if (t > listing) {
        double r = spec.vol * (load * factor[t] + idio * rng.normal());
        r = std::max(r, -0.95);
        price *= 1.0 + r;
      }
      gp.panel.at(Metric::Price, a, t) = price;
      gp.panel.at(Metric::MarketCap, a, t) = supply * price;
      gp.panel.at(Metric::Volume, a, t) =
          std::exp(volume_mu + 0.5 * vol_rng.normal());
      double spread = 0.01 * std::abs(vol_rng.normal());
      gp.panel.at(Metric::High, a, t) = price * std::exp(spread);
      gp.panel.at(Metric::Low, a, t) = price * std::exp(-spread);
    }
  }

  if (spec.missing_rate > 0.0) {
    Rng rng(derive_seed(spec.seed, kMissingStream));
    for (int a = 0; a < spec.n_assets; ++a)
      for (int t = gp.listing_offset[a] + 1; t < spec.days; ++t)
        if (rng.uniform() < spec.missing_rate)
          for (ingest::Metric m : ingest::kAllMetrics)
            gp.panel.at(m, a, t) = kMissing;
  }
  return gp;
}

void plant_synchronization(GeneratedPanel& gp, const PlantSpec& ps) {
  ingest::AssetPanel& panel = gp.panel;
  if (ps.asset_i == ps.asset_j || ps.asset_i < 0 || ps.asset_j < 0 ||
      ps.asset_i >= static_cast<int>(panel.assets.size()) ||
      ps.asset_j >= static_cast<int>(panel.assets.size()))
    throw DataError("plant_synchronization: bad pair");
  int switch_t = std::max(0, panel.day_index(ps.switch_day) < 0
                                 ? (ps.switch_day <= panel.start ? 0 : panel.n_days)
                                 : panel.day_index(ps.switch_day));

  Rng rng(derive_seed(ps.seed, kPlantStream,
                      static_cast<std::uint64_t>(ps.asset_i),
                      static_cast<std::uint64_t>(ps.asset_j)));
  double vol = gp.spec.vol;
  std::vector<double> ri(panel.n_days, 0.0), rj(panel.n_days, 0.0);
  for (int t = 0; t < panel.n_days; ++t) {
    double rho = t < switch_t ? ps.rho_before : ps.rho_after;
    double z1 = rng.normal(), z2 = rng.normal();
    ri[t] = std::max(vol * z1, -0.95);
    rj[t] = std::max(vol * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2), -0.95);
  }
  rebuild_prices(panel, ps.asset_i, gp.listing_offset[ps.asset_i], ri,
                 gp.supply[ps.asset_i], rng);
  rebuild_prices(panel, ps.asset_j, gp.listing_offset[ps.asset_j], rj,
                 gp.supply[ps.asset_j], rng);
}

GeneratedEvents gen_event_stream(const EventStreamSpec& spec) {
  if (spec.n_devs < 0 || spec.n_projects < 1 || spec.end < spec.start)
    throw DataError("gen_event_stream: invalid spec");
  std::set<std::string> bridge_devs;
  std::set<std::pair<std::string, std::string>> bridge_pairs;
  for (const auto& b : spec.schedule) {
    if (b.project_i == b.project_j)
      throw DataError("gen_event_stream: bridge with identical projects");
    if (!bridge_devs.insert(b.developer).second)
      throw DataError("gen_event_stream: bridge developers must be dedicated");
    auto key = std::minmax(b.project_i, b.project_j);
    if (!bridge_pairs.insert({key.first, key.second}).second)
      throw DataError("gen_event_stream: duplicate bridge pair");
    if (b.day < spec.start || b.day > spec.end)
      throw DataError("gen_event_stream: bridge day outside stream window");
  }

  GeneratedEvents out;
  out.spec = spec;
  using ingest::EventKind;
  using ingest::EventRecord;

  for (int d = 0; d < spec.n_devs; ++d) {
    Rng rng(derive_seed(spec.seed, kActivityStream, static_cast<std::uint64_t>(d)));
    std::string dev = developer_name(d);
    std::string home = project_name(d % spec.n_projects);
    for (Day day = spec.start; day <= spec.end; ++day) {
      int k = poisson_draw(rng, spec.activity_rate);
      for (int e = 0; e < k; ++e) {
        EventRecord rec;
        rec.developer = dev;
        rec.project = home;
        rec.timestamp = static_cast<Instant>(day) * 86400 +
                        static_cast<Instant>(rng.below(86400));
        rec.kind = rng.uniform() < 0.8 ? EventKind::Push
                                       : EventKind::MergedPullRequest;
        out.events.push_back(std::move(rec));
      }
    }
  }

  for (std::size_t i = 0; i < spec.schedule.size(); ++i) {
    const Bridge& b = spec.schedule[i];
    Rng rng(derive_seed(spec.seed, 0xb21d6e, i));
    Day lead = std::max(spec.start, b.day - spec.bridge_lead_days);
    EventRecord first;
    first.developer = b.developer;
    first.project = b.project_i;
    first.timestamp = static_cast<Instant>(lead) * 86400 + 43200;
    first.kind = EventKind::Push;
    EventRecord second;
    second.developer = b.developer;
    second.project = b.project_j;
    second.timestamp = static_cast<Instant>(b.day) * 86400 + 43200;
    second.kind = rng.uniform() < 0.5 ? EventKind::Push
                                      : EventKind::MergedPullRequest;
    out.events.push_back(first);
    out.events.push_back(second);

    conet::ConnectionEvent truth;
    auto key = std::minmax(b.project_i, b.project_j);
    truth.project_i = key.first;
    truth.project_j = key.second;
    truth.connection_time = second.timestamp;
    truth.connection_day = b.day;
    truth.developer = b.developer;
    truth.kind = second.kind;
    truth.first_edited = b.project_i;
    truth.second_edited = b.project_j;
    truth.direction_defined = lead != b.day;
    out.ground_truth.push_back(std::move(truth));
  }

  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  std::sort(out.ground_truth.begin(), out.ground_truth.end(),
            [](const conet::ConnectionEvent& a, const conet::ConnectionEvent& b) {
              return std::tie(a.connection_time, a.project_i, a.project_j) <
                     std::tie(b.connection_time, b.project_i, b.project_j);
            });
  return out;
}

}  // namespace codev::synthgen
