#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ngsim/random.hpp"

namespace ngsim {

using NodeId = std::uint32_t;

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

enum class Boundary { periodic, free };

const char* to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph in compressed sparse row form.
///
/// Neighbor ranges are sorted and duplicate-free, the adjacency is symmetric
/// and there are no self-loops. Spatial generators attach node positions and
/// the box geometry; add_shortcuts() records the long-range edges it added.
/// Instances are immutable once built and may be shared across threads.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary undirected edge list. Self-loops are rejected
  /// and duplicate edges (in either orientation) collapse to one.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  bool adjacent(NodeId u, NodeId v) const noexcept;

  /// Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  const std::optional<std::vector<Point2D>>& positions() const noexcept { return positions_; }
  std::optional<double> box_length() const noexcept { return box_length_; }
  std::optional<Boundary> boundary() const noexcept { return boundary_; }
  const std::vector<Edge>& shortcut_edges() const noexcept { return shortcuts_; }
  bool is_spatial() const noexcept { return positions_.has_value(); }

  void set_geometry(std::vector<Point2D> positions, double box_length, Boundary boundary);
  void set_shortcuts(std::vector<Edge> shortcuts);

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::optional<std::vector<Point2D>> positions_;
  std::optional<double> box_length_;
  std::optional<Boundary> boundary_;
  std::vector<Edge> shortcuts_;
};

struct RggConfig {
  std::size_t n = 0;
  double box_length = 1.0;
  std::optional<double> radius;
  std::optional<double> target_avg_degree;
  Boundary boundary = Boundary::periodic;

  /// Throws ParameterError unless n >= 1, L > 0 and exactly one positive
  /// radius / target degree is given.
  void validate() const;
  /// Connection radius, derived from the target degree when needed.
  double effective_radius() const;
};

struct SwConfig {
  double shortcut_density = 0.0;
};

/// R such that the mean degree rho*pi*R^2 equals avg_degree.
double radius_for_degree(double avg_degree, double density);

/// Distance between two points in a box of side L, minimum-image on the torus.
double box_distance(const Point2D& a, const Point2D& b, double box_length, Boundary boundary);

Graph generate_rgg(const RggConfig& config, Rng& rng);

/// Adds round(p*n) uniformly chosen new edges between distinct non-adjacent pairs.
/// Throws TopologyError when the admissible pairs cannot host them.
Graph add_shortcuts(const Graph& g, const SwConfig& sw, Rng& rng);

/// side x side square lattice with four nearest neighbours.
Graph generate_lattice_2d(std::size_t side, bool periodic);

Graph generate_complete(std::size_t n);

struct Components {
  /// Component label per node; labels are dense, ordered by smallest member.
  std::vector<std::uint32_t> label;
  std::vector<std::size_t> sizes;
  std::uint32_t giant = 0;

  std::size_t count() const noexcept { return sizes.size(); }
};

Components connected_components(const Graph& g);

/// Induced subgraph on the largest component, nodes relabeled in increasing
/// original order. Positions and in-component shortcuts carry over.
Graph giant_component(const Graph& g);

double measured_avg_degree(const Graph& g);

/// Regenerates a (shortcut-augmented, if p > 0) RGG until it is connected.
struct ConnectedGraph {
  Graph graph;
  int attempts = 0;
};
ConnectedGraph generate_connected_rgg(const RggConfig& config, const std::optional<SwConfig>& sw,
                                      Rng& rng, int max_attempts = 1000);

// Edge-list text format.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace ngsim
