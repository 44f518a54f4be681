#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/ingest.hpp"

namespace codev::nullmodels {

// Unordered asset pair, normalized so first < second.
using PairId = std::pair<std::string, std::string>;

inline PairId make_pair_id(std::string a, std::string b) {
  return a < b ? PairId{std::move(a), std::move(b)}
               : PairId{std::move(b), std::move(a)};
}

struct LinkedPair {
  std::string asset_i, asset_j;
  Day connection_day = 0;
};

struct NullPair {
  std::string asset_i, asset_j;
  Day pseudo_day = 0;
  std::string model;                  // "rt", "rta", "orta"
  std::optional<bool> retained_first; // ORTA: original member kept
};

struct Cohort {
  std::vector<NullPair> pairs;
  std::vector<std::string> skipped;  // pair ids with no age match
};

// n uniform draws over unordered non-linked pairs (with replacement across
// draws), each with a pseudo-connection day drawn from the empirical
// connection-day multiset. Throws InfeasibleError when every pair is linked.
Cohort sample_rt(std::span<const std::string> assets,
                 const std::set<PairId>& linked,
                 std::span<const Day> connection_days, std::size_t n,
                 std::uint64_t seed);

// Per linked pair: two non-linked assets whose market ages at the original
// connection day match the originals within the tolerance; the tolerance
// widens by +7-day steps up to 35 days, after which the pair is skipped.
Cohort sample_rta(std::span<const LinkedPair> linked_pairs,
                  const ingest::AssetPanel& panel,
                  const std::set<PairId>& linked, int tolerance,
                  std::uint64_t seed);

// Per linked pair: one original member kept (fair coin), the other replaced
// by an age-matched non-linked asset.
Cohort sample_orta(std::span<const LinkedPair> linked_pairs,
                   const ingest::AssetPanel& panel,
                   const std::set<PairId>& linked, int tolerance,
                   std::uint64_t seed);

// `asset_i,asset_j,pseudo_connection_day,model,retained`
void write_cohort(std::ostream& out, const Cohort& cohort);

}  // namespace codev::nullmodels
