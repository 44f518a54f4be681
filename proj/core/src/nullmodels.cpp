#include "codev/nullmodels.hpp"

#include <algorithm>

#include "codev/error.hpp"
#include "codev/rng.hpp"

namespace codev::nullmodels {

namespace {

constexpr int kMaxTolerance = 35;
constexpr int kToleranceStep = 7;
constexpr int kRejectionBudget = 4096;

// Market age of an asset at a reference day; nullopt when the asset has no
// observation on or before that day.
std::optional<int> market_age(const ingest::AssetPanel& panel, int asset,
                              Day at) {
  int first = panel.first_observed(asset);
  if (first < 0) return std::nullopt;
  Day listed = panel.day_at(first);
  if (listed > at) return std::nullopt;
  return static_cast<int>(at - listed);
}

bool is_linked(const std::set<PairId>& linked, const std::string& a,
               const std::string& b) {
  return linked.count(make_pair_id(a, b)) > 0;
}

// Assets within |age - target| <= tol at the reference day.
std::vector<int> age_candidates(const ingest::AssetPanel& panel, Day at,
                                int target, int tol) {
  std::vector<int> out;
  for (std::size_t a = 0; a < panel.assets.size(); ++a) {
    auto age = market_age(panel, static_cast<int>(a), at);
    if (age && std::abs(*age - target) <= tol) out.push_back(static_cast<int>(a));
  }
  return out;
}

}  // namespace

Cohort sample_rt(std::span<const std::string> assets,
                 const std::set<PairId>& linked,
                 std::span<const Day> connection_days, std::size_t n,
                 std::uint64_t seed) {
  if (assets.size() < 2) throw InfeasibleError("sample_rt: need >= 2 assets");
  if (connection_days.empty())
    throw InfeasibleError("sample_rt: empty connection-day multiset");
  std::size_t total = assets.size() * (assets.size() - 1) / 2;
  std::size_t linked_in_universe = 0;
  for (const auto& p : linked) {
    bool a = std::find(assets.begin(), assets.end(), p.first) != assets.end();
    bool b = std::find(assets.begin(), assets.end(), p.second) != assets.end();
    if (a && b) ++linked_in_universe;
  }
  if (linked_in_universe >= total)
    throw InfeasibleError("sample_rt: every pair is linked");

  Cohort out;
  out.pairs.reserve(n);
  Rng rng(derive_seed(seed, 0x27));
  for (std::size_t k = 0; k < n; ++k) {
    for (;;) {
      auto i = static_cast<std::size_t>(rng.below(assets.size()));
      auto j = static_cast<std::size_t>(rng.below(assets.size()));
      if (i == j) continue;
      if (is_linked(linked, assets[i], assets[j])) continue;
      auto id = make_pair_id(assets[i], assets[j]);
      Day day = connection_days[rng.below(connection_days.size())];
      out.pairs.push_back({id.first, id.second, day, "rt", std::nullopt});
      break;
    }
  }
  return out;
}

Cohort sample_rta(std::span<const LinkedPair> linked_pairs,
                  const ingest::AssetPanel& panel,
                  const std::set<PairId>& linked, int tolerance,
                  std::uint64_t seed) {
  Cohort out;
  Rng rng(derive_seed(seed, 0x27a));
  for (const auto& lp : linked_pairs) {
    int ia = panel.index_of(lp.asset_i), ib = panel.index_of(lp.asset_j);
    auto age_a = ia >= 0 ? market_age(panel, ia, lp.connection_day) : std::nullopt;
    auto age_b = ib >= 0 ? market_age(panel, ib, lp.connection_day) : std::nullopt;
    if (!age_a || !age_b) {
      out.skipped.push_back(lp.asset_i + "|" + lp.asset_j);
      continue;
    }
    // base tolerance first, then the widening schedule
    std::string a, b;
    bool found = false;
    for (int tol = tolerance; tol <= kMaxTolerance && !found;
         tol += kToleranceStep) {
      auto ca = age_candidates(panel, lp.connection_day, *age_a, tol);
      auto cb = age_candidates(panel, lp.connection_day, *age_b, tol);
      if (ca.empty() || cb.empty()) continue;
      for (int tries = 0; tries < kRejectionBudget && !found; ++tries) {
        a = panel.assets[ca[rng.below(ca.size())]];
        b = panel.assets[cb[rng.below(cb.size())]];
        if (a == b || is_linked(linked, a, b)) continue;
        found = true;
      }
    }
    if (!found) {
      out.skipped.push_back(lp.asset_i + "|" + lp.asset_j);
      continue;
    }
    auto id = make_pair_id(a, b);
    out.pairs.push_back({id.first, id.second, lp.connection_day, "rta",
                         std::nullopt});
  }
  return out;
}

Cohort sample_orta(std::span<const LinkedPair> linked_pairs,
                   const ingest::AssetPanel& panel,
                   const std::set<PairId>& linked, int tolerance,
                   std::uint64_t seed) {
  Cohort out;
  Rng rng(derive_seed(seed, 0x0127a));
  for (const auto& lp : linked_pairs) {
    bool keep_first = rng.uniform() < 0.5;
    const std::string& kept = keep_first ? lp.asset_i : lp.asset_j;
    const std::string& replaced = keep_first ? lp.asset_j : lp.asset_i;
    int ir = panel.index_of(replaced);
    auto age_r = ir >= 0 ? market_age(panel, ir, lp.connection_day) : std::nullopt;
    if (!age_r || panel.index_of(kept) < 0) {
      out.skipped.push_back(lp.asset_i + "|" + lp.asset_j);
      continue;
    }
    std::string substitute;
    bool found = false;
    for (int tol = tolerance; tol <= kMaxTolerance && !found;
         tol += kToleranceStep) {
      auto cands = age_candidates(panel, lp.connection_day, *age_r, tol);
      if (cands.empty()) continue;
      for (int tries = 0; tries < kRejectionBudget && !found; ++tries) {
        substitute = panel.assets[cands[rng.below(cands.size())]];
        if (substitute == kept || is_linked(linked, kept, substitute)) continue;
        found = true;
      }
    }
    if (!found) {
      out.skipped.push_back(lp.asset_i + "|" + lp.asset_j);
      continue;
    }
    auto id = make_pair_id(kept, substitute);
    out.pairs.push_back(
        {id.first, id.second, lp.connection_day, "orta", keep_first});
  }
  return out;
}

void write_cohort(std::ostream& out, const Cohort& cohort) {
  out << "asset_i,asset_j,pseudo_connection_day,model,retained\n";
  for (const auto& p : cohort.pairs) {
    out << p.asset_i << ',' << p.asset_j << ',' << format_date(p.pseudo_day)
        << ',' << p.model << ',';
    if (p.retained_first) out << (*p.retained_first ? "first" : "second");
    out << '\n';
  }
}

}  // namespace codev::nullmodels
