#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/conet.hpp"
#include "codev/ingest.hpp"

namespace codev::synthgen {

// Market panel from a one-factor Gaussian return model: every asset pair has
// latent Pearson correlation base_rho. Spearman calibration for tests uses
// rho_s = (6/pi) * asin(rho/2).
struct PanelSpec {
  int n_assets = 10;
  int days = 365;
  double base_rho = 0.0;
  double vol = 0.02;  // daily return sd
  double missing_rate = 0.0;
  int max_listing_stagger = 0;  // listing day uniform in [0, stagger]
  Day start = 16801;            // 2016-01-01
  std::uint64_t seed = 1;
};

struct GeneratedPanel {
  ingest::AssetPanel panel;
  PanelSpec spec;                   // latent parameters (manifest)
  std::vector<int> listing_offset;  // per asset, day index of first price
  std::vector<double> supply;       // cap = supply * price
};

GeneratedPanel gen_panel(const PanelSpec& spec);

// Replaces the designated pair's returns with a bivariate normal whose
// correlation switches from rho_before to rho_after at switch_day; prices
// and caps are rebuilt along the new path, other assets are untouched.
struct PlantSpec {
  int asset_i = 0, asset_j = 1;
  Day switch_day = 0;
  double rho_before = 0.0, rho_after = 0.5;
  std::uint64_t seed = 1;
};

void plant_synchronization(GeneratedPanel& gp, const PlantSpec& spec);

// Developer event stream: Poisson edits on home projects plus exactly
// realized bridge entries. Bridge developers must be dedicated (one per
// entry) so the schedule is the complete connection ground truth.
struct Bridge {
  std::string developer;
  std::string project_i, project_j;  // project_i edited first
  Day day = 0;                       // connection day
};

struct EventStreamSpec {
  int n_devs = 20;
  int n_projects = 10;
  double activity_rate = 0.2;  // expected edits per developer per day
  Day start = 16801;
  Day end = 17166;
  std::vector<Bridge> schedule;
  int bridge_lead_days = 30;  // first project edited this many days earlier
  std::uint64_t seed = 1;
};

struct GeneratedEvents {
  std::vector<ingest::EventRecord> events;  // sorted by timestamp
  std::vector<conet::ConnectionEvent> ground_truth;
  EventStreamSpec spec;
};

GeneratedEvents gen_event_stream(const EventStreamSpec& spec);

std::string project_name(int index);
std::string developer_name(int index);
std::string bridge_developer_name(int index);
std::string asset_name(int index);

}  // namespace codev::synthgen
