#include "ngsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_set>

#include "ngsim/errors.hpp"

namespace ngsim {

const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "free";
}

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "free") return Boundary::free;
  throw ParameterError("unknown boundary '" + s + "'");
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw ParameterError("edge endpoint out of range");
    if (u == v) throw ParameterError("self-loop on node " + std::to_string(u));
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (auto [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(2 * canon.size());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lexicographic edge order yields sorted neighbor ranges: for node x all
  // smaller neighbors arrive (as v-side) before any edge starting at x.
  for (auto [u, v] : canon) {
    g.neighbors_[fill[u]++] = v;
    g.neighbors_[fill[v]++] = u;
  }
  return g;
}

bool Graph::adjacent(NodeId u, NodeId v) const noexcept {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

void Graph::set_geometry(std::vector<Point2D> positions, double box_length, Boundary boundary) {
  if (positions.size() != node_count()) throw ParameterError("one position per node required");
  positions_ = std::move(positions);
  box_length_ = box_length;
  boundary_ = boundary;
}

void Graph::set_shortcuts(std::vector<Edge> shortcuts) {
  for (auto& e : shortcuts) {
    if (e.first == e.second) throw ParameterError("shortcut endpoints must differ");
    if (e.first > e.second) std::swap(e.first, e.second);
    if (!adjacent(e.first, e.second)) throw ParameterError("shortcut edge missing from adjacency");
  }
  std::sort(shortcuts.begin(), shortcuts.end());
  shortcuts_ = std::move(shortcuts);
}

void RggConfig::validate() const {
  if (n < 1) throw ParameterError("rgg: n must be >= 1");
  if (!(box_length > 0.0)) throw ParameterError("rgg: box length must be positive");
  if (radius.has_value() == target_avg_degree.has_value())
    throw ParameterError("rgg: give exactly one of radius or target degree");
  if (radius && !(*radius > 0.0)) throw ParameterError("rgg: radius must be positive");
  if (target_avg_degree && !(*target_avg_degree > 0.0))
    throw ParameterError("rgg: target degree must be positive");
}

double RggConfig::effective_radius() const {
  validate();
  if (radius) return *radius;
  return radius_for_degree(*target_avg_degree, static_cast<double>(n) / (box_length * box_length));
}

double radius_for_degree(double avg_degree, double density) {
  if (!(avg_degree > 0.0) || !(density > 0.0))
    throw ParameterError("radius_for_degree: degree and density must be positive");
  return std::sqrt(avg_degree / (std::numbers::pi * density));
}

namespace {

double axis_gap(double a, double b, double box_length, Boundary boundary) {
  double d = std::abs(a - b);
  if (boundary == Boundary::periodic && d > 0.5 * box_length) d = box_length - d;
  return d;
}

double distance_sq(const Point2D& a, const Point2D& b, double box_length, Boundary boundary) {
  const double dx = axis_gap(a.x, b.x, box_length, boundary);
  const double dy = axis_gap(a.y, b.y, box_length, boundary);
  return dx * dx + dy * dy;
}

double uniform_coordinate(Rng& rng, double box_length) {
  double x = box_length * uniform_unit(rng);
  return x < box_length ? x : std::nextafter(box_length, 0.0);
}

}  // namespace

double box_distance(const Point2D& a, const Point2D& b, double box_length, Boundary boundary) {
  return std::sqrt(distance_sq(a, b, box_length, boundary));
}

Graph generate_rgg(const RggConfig& config, Rng& rng) {
  const double radius = config.effective_radius();
  const double L = config.box_length;
  const std::size_t n = config.n;

  std::vector<Point2D> pos(n);
  for (auto& p : pos) {
    p.x = uniform_coordinate(rng, L);
    p.y = uniform_coordinate(rng, L);
  }

  const double r2 = radius * radius;
  std::vector<Edge> edges;
  auto consider = [&](NodeId i, NodeId j) {
    if (distance_sq(pos[i], pos[j], L, config.boundary) <= r2) edges.emplace_back(i, j);
  };

  const auto cells = static_cast<std::size_t>(std::floor(L / radius));
  if (cells < 3) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) consider(i, j);
  } else {
    // Cell side L/cells >= R, so every edge joins points in adjacent cells.
    const double cell_side = L / static_cast<double>(cells);
    auto cell_of = [&](double c) {
      return std::min(static_cast<std::size_t>(c / cell_side), cells - 1);
    };
    std::vector<std::size_t> start(cells * cells + 1, 0);
    std::vector<std::size_t> owner(n);
    for (NodeId i = 0; i < n; ++i) {
      owner[i] = cell_of(pos[i].y) * cells + cell_of(pos[i].x);
      ++start[owner[i] + 1];
    }
    for (std::size_t c = 0; c < cells * cells; ++c) start[c + 1] += start[c];
    std::vector<NodeId> members(n);
    {
      std::vector<std::size_t> fill(start.begin(), start.end() - 1);
      for (NodeId i = 0; i < n; ++i) members[fill[owner[i]]++] = i;
    }

    const bool wrap = config.boundary == Boundary::periodic;
    const auto side = static_cast<long>(cells);
    for (long cy = 0; cy < side; ++cy) {
      for (long cx = 0; cx < side; ++cx) {
        const std::size_t here = static_cast<std::size_t>(cy * side + cx);
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            long ny = cy + dy, nx = cx + dx;
            if (wrap) {
              ny = (ny + side) % side;
              nx = (nx + side) % side;
            } else if (ny < 0 || ny >= side || nx < 0 || nx >= side) {
              continue;
            }
            const std::size_t there = static_cast<std::size_t>(ny * side + nx);
            for (std::size_t a = start[here]; a < start[here + 1]; ++a)
              for (std::size_t b = start[there]; b < start[there + 1]; ++b)
                if (members[a] < members[b]) consider(members[a], members[b]);
          }
        }
      }
    }
  }

  Graph g = Graph::from_edges(n, edges);
  g.set_geometry(std::move(pos), L, config.boundary);
  return g;
}

Graph add_shortcuts(const Graph& g, const SwConfig& sw, Rng& rng) {
  if (!(sw.shortcut_density >= 0.0)) throw ParameterError("shortcut density must be >= 0");
  const std::size_t n = g.node_count();
  const auto wanted = static_cast<std::size_t>(std::llround(sw.shortcut_density * static_cast<double>(n)));
  if (wanted == 0) return g;

  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs < g.edge_count() + wanted)
    throw TopologyError("add_shortcuts: only " + std::to_string(pairs - g.edge_count()) +
                        " non-adjacent pairs for " + std::to_string(wanted) + " shortcuts");

  std::vector<Edge> added;
  added.reserve(wanted);
  std::unordered_set<std::uint64_t> taken;
  const std::size_t max_rejections = 100 * wanted;
  std::size_t rejections = 0;
  while (added.size() < wanted) {
    auto u = static_cast<NodeId>(uniform_below(rng, n));
    auto v = static_cast<NodeId>(uniform_below(rng, n));
    if (u > v) std::swap(u, v);
    const std::uint64_t key = (std::uint64_t{u} << 32) | v;
    if (u == v || g.adjacent(u, v) || taken.contains(key)) {
      if (++rejections > max_rejections)
        throw TopologyError("add_shortcuts: too many consecutive rejections");
      continue;
    }
    rejections = 0;
    taken.insert(key);
    added.emplace_back(u, v);
  }

  std::vector<Edge> all = g.edges();
  all.insert(all.end(), added.begin(), added.end());
  Graph out = Graph::from_edges(n, all);
  if (g.positions()) out.set_geometry(*g.positions(), *g.box_length(), *g.boundary());
  std::vector<Edge> shortcuts = g.shortcut_edges();
  shortcuts.insert(shortcuts.end(), added.begin(), added.end());
  out.set_shortcuts(std::move(shortcuts));
  return out;
}

Graph generate_lattice_2d(std::size_t side, bool periodic) {
  if (side < 2) throw ParameterError("lattice side must be >= 2");
  std::vector<Edge> edges;
  auto id = [side](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * side + c); };
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
      else if (periodic) edges.emplace_back(id(r, c), id(r, 0));
      if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
      else if (periodic) edges.emplace_back(id(r, c), id(0, c));
    }
  }
  return Graph::from_edges(side * side, edges);
}

Graph generate_complete(std::size_t n) {
  if (n < 1) throw ParameterError("complete graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

Components connected_components(const Graph& g) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  Components out;
  out.label.assign(g.node_count(), unset);
  std::vector<NodeId> queue;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (out.label[s] != unset) continue;
    const auto c = static_cast<std::uint32_t>(out.sizes.size());
    out.label[s] = c;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (NodeId v : g.neighbors(queue[head]))
        if (out.label[v] == unset) {
          out.label[v] = c;
          queue.push_back(v);
        }
    out.sizes.push_back(queue.size());
    if (queue.size() > out.sizes[out.giant]) out.giant = c;
  }
  return out;
}

Graph giant_component(const Graph& g) {
  const Components comps = connected_components(g);
  if (comps.count() <= 1) return g;
  constexpr auto unset = static_cast<NodeId>(-1);
  std::vector<NodeId> relabel(g.node_count(), unset);
  NodeId next = 0;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (comps.label[u] == comps.giant) relabel[u] = next++;

  std::vector<Edge> edges;
  for (auto [u, v] : g.edges())
    if (relabel[u] != unset && relabel[v] != unset) edges.emplace_back(relabel[u], relabel[v]);
  Graph out = Graph::from_edges(next, edges);
  if (g.positions()) {
    std::vector<Point2D> pos;
    pos.reserve(next);
    for (NodeId u = 0; u < g.node_count(); ++u)
      if (relabel[u] != unset) pos.push_back((*g.positions())[u]);
    out.set_geometry(std::move(pos), *g.box_length(), *g.boundary());
  }
  std::vector<Edge> shortcuts;
  for (auto [u, v] : g.shortcut_edges())
    if (relabel[u] != unset && relabel[v] != unset) shortcuts.emplace_back(relabel[u], relabel[v]);
  out.set_shortcuts(std::move(shortcuts));
  return out;
}

double measured_avg_degree(const Graph& g) {
  if (g.node_count() == 0) throw ParameterError("average degree of an empty graph");
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

ConnectedGraph generate_connected_rgg(const RggConfig& config, const std::optional<SwConfig>& sw,
                                      Rng& rng, int max_attempts) {
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    Graph g = generate_rgg(config, rng);
    if (sw) g = add_shortcuts(g, *sw, rng);
    if (connected_components(g).count() <= 1) return {std::move(g), attempt};
  }
  throw TopologyError("no connected realization in " + std::to_string(max_attempts) + " attempts");
}

}  // namespace ngsim
