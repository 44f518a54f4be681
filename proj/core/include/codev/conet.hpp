#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "codev/calendar.hpp"
#include "codev/ingest.hpp"

namespace codev::conet {

using ingest::EventKind;
using ingest::EventRecord;

struct BipartiteEdge {
  int developer = -1;
  int project = -1;
  Instant first_edit = 0;
  EventKind first_kind = EventKind::Other;
  int edit_count = 0;
};

// Developer-project graph; at most one edge per (developer, project).
struct BipartiteGraph {
  std::vector<std::string> developers;
  std::vector<std::string> projects;
  std::unordered_map<std::string, int> developer_index;
  std::unordered_map<std::string, int> project_index;
  std::vector<BipartiteEdge> edges;                // grouped by developer
  std::vector<std::pair<int, int>> developer_span; // [begin,end) into edges
};

// Undirected projection: projects sharing >= 1 developer, weighted by the
// number of shared developers.
struct ProjectGraph {
  std::vector<std::string> projects;
  struct Edge {
    int i, j;  // i < j
    int weight;
  };
  std::vector<Edge> edges;

  std::vector<int> degrees() const;
};

struct ConnectionEvent {
  std::string project_i, project_j;  // unordered, project_i < project_j
  Day connection_day = 0;
  Instant connection_time = 0;
  std::string developer;
  EventKind kind = EventKind::Other;
  std::string first_edited, second_edited;
  bool direction_defined = true;
  std::vector<std::string> subsequent_connectors;

  std::string pair_id() const { return project_i + "|" + project_j; }
};

BipartiteGraph build_bipartite(std::span<const EventRecord> events);

ProjectGraph project_graph(const BipartiteGraph& g);

// One ConnectionEvent per linked pair: for each developer the candidate time
// is max(first edit of either project); the pair connects at the minimum
// candidate across developers. Ties on the candidate instant break by
// developer id.
std::vector<ConnectionEvent> detect_connections(
    std::span<const EventRecord> events);

// Pairs bridged by exactly one developer (Fig-S10-style subsample).
std::vector<ConnectionEvent> one_link_only(
    std::vector<ConnectionEvent> connections);

// (degree, count) over non-isolated nodes, descending degree.
std::vector<std::pair<int, int>> degree_histogram(const ProjectGraph& g);

// Newman degree assortativity; nullopt when endpoint-degree variance is zero.
// Throws DataError on an empty edge set.
std::optional<double> assortativity_coefficient(const ProjectGraph& g);

// Component sizes over non-isolated nodes, descending.
std::vector<int> connected_components(const ProjectGraph& g);

// (n_connections, n_developers) histogram of connecting developers,
// descending n_connections.
std::vector<std::pair<int, int>> developer_connection_counts(
    std::span<const ConnectionEvent> connections);

// New links binned by `bin` days from the earliest connection.
std::vector<std::pair<Day, int>> new_links_per_period(
    std::span<const ConnectionEvent> connections, int bin);

// `project_i,project_j,weight,connection_day,developer,kind,first_edited`
void write_edge_list(std::ostream& out,
                     std::span<const ConnectionEvent> connections);
void write_degree_histogram(std::ostream& out, const ProjectGraph& g);

}  // namespace codev::conet
