#include "codev/conet.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "codev/error.hpp"

namespace codev::conet {

BipartiteGraph build_bipartite(std::span<const EventRecord> events) {
  BipartiteGraph g;
  std::map<std::pair<int, int>, BipartiteEdge> edges;
  for (const auto& e : events) {
    auto [dit, dnew] =
        g.developer_index.try_emplace(e.developer, (int)g.developers.size());
    if (dnew) g.developers.push_back(e.developer);
    auto [pit, pnew] =
        g.project_index.try_emplace(e.project, (int)g.projects.size());
    if (pnew) g.projects.push_back(e.project);
    auto key = std::make_pair(dit->second, pit->second);
    auto it = edges.find(key);
    if (it == edges.end()) {
      edges.emplace(key, BipartiteEdge{dit->second, pit->second, e.timestamp,
                                       e.kind, 1});
    } else {
      ++it->second.edit_count;
      if (e.timestamp < it->second.first_edit) {
        it->second.first_edit = e.timestamp;
        it->second.first_kind = e.kind;
      }
    }
  }
  g.edges.reserve(edges.size());
  for (auto& [key, edge] : edges) g.edges.push_back(edge);
  // map is ordered by (developer, project), so spans are contiguous
  g.developer_span.assign(g.developers.size(), {0, 0});
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    int d = g.edges[i].developer;
    if (g.developer_span[d].second == 0)
      g.developer_span[d] = {static_cast<int>(i), static_cast<int>(i)};
    g.developer_span[d].second = static_cast<int>(i) + 1;
  }
  return g;
}

ProjectGraph project_graph(const BipartiteGraph& g) {
  ProjectGraph out;
  out.projects = g.projects;
  std::map<std::pair<int, int>, int> weight;
  for (std::size_t d = 0; d < g.developers.size(); ++d) {
    auto [b, e] = g.developer_span[d];
    for (int i = b; i < e; ++i)
      for (int j = i + 1; j < e; ++j) {
        int pi = g.edges[i].project, pj = g.edges[j].project;
        if (pi > pj) std::swap(pi, pj);
        ++weight[{pi, pj}];
      }
  }
  out.edges.reserve(weight.size());
  for (const auto& [pair, w] : weight)
    out.edges.push_back({pair.first, pair.second, w});
  return out;
}

std::vector<int> ProjectGraph::degrees() const {
  std::vector<int> deg(projects.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<ConnectionEvent> detect_connections(
    std::span<const EventRecord> events) {
  BipartiteGraph g = build_bipartite(events);

  struct Candidate {
    Instant time;
    std::string developer;
    EventKind kind;
    std::string first_edited, second_edited;
    bool direction_defined;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Candidate>> pairs;

  for (std::size_t d = 0; d < g.developers.size(); ++d) {
    auto [b, e] = g.developer_span[d];
    for (int i = b; i < e; ++i)
      for (int j = i + 1; j < e; ++j) {
        const auto& ei = g.edges[i];
        const auto& ej = g.edges[j];
        const auto& later = ei.first_edit >= ej.first_edit ? ei : ej;
        const auto& earlier = ei.first_edit >= ej.first_edit ? ej : ei;
        Candidate c;
        c.time = later.first_edit;
        c.developer = g.developers[d];
        c.kind = later.first_kind;
        c.direction_defined = ei.first_edit != ej.first_edit;
        c.first_edited = g.projects[earlier.project];
        c.second_edited = g.projects[later.project];
        std::string a = g.projects[ei.project], bname = g.projects[ej.project];
        if (a > bname) std::swap(a, bname);
        pairs[{a, bname}].push_back(std::move(c));
      }
  }

  std::vector<ConnectionEvent> out;
  out.reserve(pairs.size());
  for (auto& [key, cands] : pairs) {
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) {
                return std::tie(a.time, a.developer) <
                       std::tie(b.time, b.developer);
              });
    const Candidate& first = cands.front();
    ConnectionEvent ev;
    ev.project_i = key.first;
    ev.project_j = key.second;
    ev.connection_time = first.time;
    ev.connection_day = day_of_instant(first.time);
    ev.developer = first.developer;
    ev.kind = first.kind;
    ev.direction_defined = first.direction_defined;
    ev.first_edited = first.direction_defined ? first.first_edited : "";
    ev.second_edited = first.direction_defined ? first.second_edited : "";
    for (std::size_t i = 1; i < cands.size(); ++i)
      ev.subsequent_connectors.push_back(cands[i].developer);
    out.push_back(std::move(ev));
  }
  std::sort(out.begin(), out.end(),
            [](const ConnectionEvent& a, const ConnectionEvent& b) {
              return std::tie(a.connection_time, a.project_i, a.project_j) <
                     std::tie(b.connection_time, b.project_i, b.project_j);
            });
  return out;
}

std::vector<ConnectionEvent> one_link_only(
    std::vector<ConnectionEvent> connections) {
  std::erase_if(connections, [](const ConnectionEvent& c) {
    return !c.subsequent_connectors.empty();
  });
  return connections;
}

std::vector<std::pair<int, int>> degree_histogram(const ProjectGraph& g) {
  std::map<int, int, std::greater<>> hist;
  for (int d : g.degrees())
    if (d > 0) ++hist[d];
  return {hist.begin(), hist.end()};
}

std::optional<double> assortativity_coefficient(const ProjectGraph& g) {
  if (g.edges.empty()) throw DataError("assortativity: empty edge set");
  auto deg = g.degrees();
  // Pearson over the directed edge list (each edge in both orientations).
  double n = 2.0 * static_cast<double>(g.edges.size());
  double sx = 0, sxx = 0, sxy = 0;
  for (const auto& e : g.edges) {
    double di = deg[e.i], dj = deg[e.j];
    sx += di + dj;
    sxx += di * di + dj * dj;
    sxy += 2.0 * di * dj;
  }
  double mean = sx / n;
  double var = sxx / n - mean * mean;
  if (var <= 1e-12 * mean * mean) return std::nullopt;
  double cov = sxy / n - mean * mean;
  return cov / var;
}

std::vector<int> connected_components(const ProjectGraph& g) {
  std::vector<int> parent(g.projects.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<bool> touched(g.projects.size(), false);
  for (const auto& e : g.edges) {
    touched[e.i] = touched[e.j] = true;
    parent[find(e.i)] = find(e.j);
  }
  std::map<int, int> sizes;
  for (std::size_t v = 0; v < parent.size(); ++v)
    if (touched[v]) ++sizes[find(static_cast<int>(v))];
  std::vector<int> out;
  for (auto& [root, size] : sizes) out.push_back(size);
  std::sort(out.rbegin(), out.rend());
  return out;
}

std::vector<std::pair<int, int>> developer_connection_counts(
    std::span<const ConnectionEvent> connections) {
  std::map<std::string, int> per_dev;
  for (const auto& c : connections) ++per_dev[c.developer];
  std::map<int, int, std::greater<>> hist;
  for (const auto& [dev, n] : per_dev) ++hist[n];
  return {hist.begin(), hist.end()};
}

std::vector<std::pair<Day, int>> new_links_per_period(
    std::span<const ConnectionEvent> connections, int bin) {
  if (connections.empty()) return {};
  Day lo = connections.front().connection_day;
  Day hi = lo;
  for (const auto& c : connections) {
    lo = std::min(lo, c.connection_day);
    hi = std::max(hi, c.connection_day);
  }
  int n_bins = static_cast<int>((hi - lo) / bin) + 1;
  std::vector<std::pair<Day, int>> out(n_bins);
  for (int i = 0; i < n_bins; ++i) out[i] = {lo + static_cast<Day>(i) * bin, 0};
  for (const auto& c : connections)
    ++out[(c.connection_day - lo) / bin].second;
  return out;
}

void write_edge_list(std::ostream& out,
                     std::span<const ConnectionEvent> connections) {
  out << "project_i,project_j,weight,connection_day,developer,kind,first_edited\n";
  for (const auto& c : connections) {
    out << c.project_i << ',' << c.project_j << ','
        << 1 + c.subsequent_connectors.size() << ','
        << format_date(c.connection_day) << ',' << c.developer << ','
        << ingest::kind_label(c.kind, "") << ',' << c.first_edited << '\n';
  }
}

void write_degree_histogram(std::ostream& out, const ProjectGraph& g) {
  out << "degree,count\n";
  for (auto [deg, count] : degree_histogram(g))
    out << deg << ',' << count << '\n';
}

}  // namespace codev::conet
