#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "metricgp/errors.hpp"

namespace metricgp {

struct edge_record {
  std::string id;
  int from = -1; // vertex index, from < to
  int to = -1;
  double length = 0.0;
  double weight = 0.0; // 1 / length
};

// A point is either a vertex or an interior edge point at relative
// position delta in (0,1) measured from the smaller endpoint. delta = 0/1
// canonicalize to the vertex form at construction.
struct point_on_graph {
  bool is_vertex = true;
  int vertex = -1;
  int edge = -1;
  double delta = 0.0;
  std::uint64_t graph_hash = 0;

  friend bool operator==(const point_on_graph& a, const point_on_graph& b) {
    if (a.graph_hash != b.graph_hash || a.is_vertex != b.is_vertex) return false;
    return a.is_vertex ? a.vertex == b.vertex : (a.edge == b.edge && a.delta == b.delta);
  }
};

// Finite simple connected graph with positive edge lengths. Vertex order is
// lexicographic over ids and fixes all matrix indexing. Immutable after
// construction.
class graph_ee {
public:
  static graph_ee build(std::vector<std::string> vertex_ids,
                        std::vector<std::tuple<std::string, std::string, std::string, double>> edge_specs) {
    graph_ee g;
    g.vertices_ = std::move(vertex_ids);
    std::sort(g.vertices_.begin(), g.vertices_.end());
    if (std::adjacent_find(g.vertices_.begin(), g.vertices_.end()) != g.vertices_.end())
      throw validation_error("duplicate-vertex", "duplicate vertex id in vertex list");
    if (g.vertices_.empty()) throw validation_error("empty-graph", "graph has no vertices");

    std::map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(g.vertices_.size()); ++i) index[g.vertices_[i]] = i;

    std::map<std::pair<int, int>, std::string> seen_pairs;
    std::map<std::string, bool> seen_ids;
    for (auto& [eid, from_id, to_id, length] : edge_specs) {
      if (seen_ids.count(eid))
        throw validation_error("duplicate-edge-id", "edge id '" + eid + "' appears more than once");
      seen_ids[eid] = true;
      auto fit = index.find(from_id);
      auto tit = index.find(to_id);
      if (fit == index.end())
        throw validation_error("unknown-vertex", "edge '" + eid + "' references unknown vertex '" + from_id + "'");
      if (tit == index.end())
        throw validation_error("unknown-vertex", "edge '" + eid + "' references unknown vertex '" + to_id + "'");
      int u = fit->second, v = tit->second;
      if (u == v)
        throw validation_error("self-loop", "edge '" + eid + "' joins vertex '" + from_id + "' to itself");
      if (u > v) std::swap(u, v);
      if (seen_pairs.count({u, v}))
        throw validation_error("duplicate-edge",
                               "edges '" + seen_pairs[{u, v}] + "' and '" + eid + "' join the same vertex pair");
      seen_pairs[{u, v}] = eid;
      if (!(length > 0.0))
        throw validation_error("non-positive-length", "edge '" + eid + "' has non-positive length");
      g.edges_.push_back({eid, u, v, length, 1.0 / length});
    }

    g.adjacency_.assign(g.vertices_.size(), {});
    for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
      g.adjacency_[static_cast<std::size_t>(g.edges_[e].from)].push_back(e);
      g.adjacency_[static_cast<std::size_t>(g.edges_[e].to)].push_back(e);
    }
    g.check_connected();
    g.hash_ = g.compute_hash();
    return g;
  }

  static graph_ee parse(const nlohmann::json& doc) {
    if (!doc.contains("vertices") || !doc["vertices"].is_array())
      throw validation_error("schema", "graph document must contain a 'vertices' array");
    if (!doc.contains("edges") || !doc["edges"].is_array())
      throw validation_error("schema", "graph document must contain an 'edges' array");
    std::vector<std::string> vs;
    for (const auto& v : doc["vertices"]) vs.push_back(v.get<std::string>());
    std::vector<std::tuple<std::string, std::string, std::string, double>> es;
    for (const auto& e : doc["edges"]) {
      if (!e.contains("id") || !e.contains("from") || !e.contains("to") || !e.contains("length"))
        throw validation_error("schema", "each edge needs 'id', 'from', 'to', 'length'");
      es.emplace_back(e["id"].get<std::string>(), e["from"].get<std::string>(), e["to"].get<std::string>(),
                      e["length"].get<double>());
    }
    return build(std::move(vs), std::move(es));
  }

  static graph_ee parse(const std::string& text) { return parse(nlohmann::json::parse(text)); }

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& vertex_ids() const { return vertices_; }
  const std::vector<edge_record>& edges() const { return edges_; }
  std::uint64_t content_hash() const { return hash_; }

  int vertex_index(const std::string& id) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
    if (it == vertices_.end() || *it != id)
      throw validation_error("unknown-vertex", "unknown vertex '" + id + "'");
    return static_cast<int>(it - vertices_.begin());
  }

  int edge_index(const std::string& id) const {
    for (int e = 0; e < n_edges(); ++e)
      if (edges_[static_cast<std::size_t>(e)].id == id) return e;
    throw validation_error("unknown-edge", "unknown edge '" + id + "'");
  }

  int degree(int v) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size()); }

  point_on_graph vertex_point(const std::string& id) const { return vertex_point(vertex_index(id)); }

  point_on_graph vertex_point(int v) const {
    point_on_graph p;
    p.is_vertex = true;
    p.vertex = v;
    p.graph_hash = hash_;
    return p;
  }

  point_on_graph edge_point(const std::string& id, double delta) const { return edge_point(edge_index(id), delta); }

  point_on_graph edge_point(int e, double delta) const {
    if (e < 0 || e >= n_edges()) throw validation_error("unknown-edge", "edge index out of range");
    if (!(delta >= 0.0 && delta <= 1.0))
      throw validation_error("delta-range", "delta must lie in [0,1]");
    const auto& er = edges_[static_cast<std::size_t>(e)];
    if (delta == 0.0) return vertex_point(er.from);
    if (delta == 1.0) return vertex_point(er.to);
    point_on_graph p;
    p.is_vertex = false;
    p.edge = e;
    p.delta = delta;
    p.graph_hash = hash_;
    return p;
  }

  point_on_graph parse_point(const nlohmann::json& doc) const {
    if (doc.contains("vertex")) return vertex_point(doc["vertex"].get<std::string>());
    if (doc.contains("edge") && doc.contains("delta"))
      return edge_point(doc["edge"].get<std::string>(), doc["delta"].get<double>());
    throw validation_error("schema", "point must be {\"vertex\": id} or {\"edge\": id, \"delta\": x}");
  }

  std::string point_label(const point_on_graph& p) const {
    require_own(p);
    if (p.is_vertex) return vertices_[static_cast<std::size_t>(p.vertex)];
    return edges_[static_cast<std::size_t>(p.edge)].id + "@" + std::to_string(p.delta);
  }

  void require_own(const point_on_graph& p) const {
    if (p.graph_hash != hash_)
      throw validation_error("foreign-point", "point does not belong to this graph");
  }

  Eigen::MatrixXd laplacian() const {
    const int n = n_vertices();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges_) {
      L(e.from, e.to) -= e.weight;
      L(e.to, e.from) -= e.weight;
      L(e.from, e.from) += e.weight;
      L(e.to, e.to) += e.weight;
    }
    return L;
  }

  bool is_tree() const { return n_edges() == n_vertices() - 1; }

  int leaf_count() const {
    int m = 0;
    for (int v = 0; v < n_vertices(); ++v)
      if (degree(v) == 1) ++m;
    return m;
  }

  // Length of the unique path between two points of a tree. Interior points
  // contribute partial edge lengths.
  double tree_geodesic(const point_on_graph& a, const point_on_graph& b) const {
    if (!is_tree()) throw validation_error("not-a-tree", "tree_geodesic requires a tree");
    require_own(a);
    require_own(b);
    if (a == b) return 0.0;
    if (!a.is_vertex && !b.is_vertex && a.edge == b.edge)
      return std::abs(a.delta - b.delta) * edges_[static_cast<std::size_t>(a.edge)].length;

    auto ends = [&](const point_on_graph& p) {
      std::vector<std::pair<int, double>> out; // (vertex, distance from p)
      if (p.is_vertex) {
        out.emplace_back(p.vertex, 0.0);
      } else {
        const auto& e = edges_[static_cast<std::size_t>(p.edge)];
        out.emplace_back(e.from, p.delta * e.length);
        out.emplace_back(e.to, (1.0 - p.delta) * e.length);
      }
      return out;
    };

    const auto ea = ends(a);
    const auto eb = ends(b);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [va, da] : ea) {
      const auto dist = vertex_distances(va);
      for (const auto& [vb, db] : eb)
        best = std::min(best, da + dist[static_cast<std::size_t>(vb)] + db);
    }
    return best;
  }

private:
  graph_ee() = default;

  void check_connected() const {
    std::vector<char> seen(vertices_.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e : adjacency_[static_cast<std::size_t>(v)]) {
        const auto& er = edges_[static_cast<std::size_t>(e)];
        int w = er.from == v ? er.to : er.from;
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++count;
          q.push(w);
        }
      }
    }
    if (count != vertices_.size())
      throw validation_error("disconnected", "graph is not connected");
  }

  std::vector<double> vertex_distances(int source) const {
    // Dijkstra; n is small throughout.
    std::vector<double> dist(vertices_.size(), std::numeric_limits<double>::infinity());
    dist[static_cast<std::size_t>(source)] = 0.0;
    using qe = std::pair<double, int>;
    std::priority_queue<qe, std::vector<qe>, std::greater<>> q;
    q.emplace(0.0, source);
    while (!q.empty()) {
      auto [d, v] = q.top();
      q.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      for (int e : adjacency_[static_cast<std::size_t>(v)]) {
        const auto& er = edges_[static_cast<std::size_t>(e)];
        int w = er.from == v ? er.to : er.from;
        double nd = d + er.length;
        if (nd < dist[static_cast<std::size_t>(w)]) {
          dist[static_cast<std::size_t>(w)] = nd;
          q.emplace(nd, w);
        }
      }
    }
    return dist;
  }

  std::uint64_t compute_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& v : vertices_) mix(v.data(), v.size());
    for (const auto& e : edges_) {
      mix(e.id.data(), e.id.size());
      mix(&e.from, sizeof(e.from));
      mix(&e.to, sizeof(e.to));
      mix(&e.length, sizeof(e.length));
    }
    return h;
  }

  std::vector<std::string> vertices_;
  std::vector<edge_record> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::uint64_t hash_ = 0;
};

} // namespace metricgp
