#include <istream>
#include <ostream>
#include <sstream>

#include "ngsim/errors.hpp"
#include "ngsim/format.hpp"
#include "ngsim/topology.hpp"

namespace ngsim {

// Format:
//   n=<n> L=<L|-> boundary=<periodic|free|->
//   u v [s]            one line per edge, u < v, s marks a shortcut
//   # positions        optional block
//   id x y
void write_graph(std::ostream& out, const Graph& g) {
  out << "n=" << g.node_count() << " L=" << (g.box_length() ? format_double(*g.box_length()) : "-")
      << " boundary=" << (g.boundary() ? to_string(*g.boundary()) : "-") << '\n';
  const auto& shortcuts = g.shortcut_edges();
  auto next_shortcut = shortcuts.begin();
  for (auto e : g.edges()) {
    out << e.first << ' ' << e.second;
    if (next_shortcut != shortcuts.end() && *next_shortcut == e) {
      out << " s";
      ++next_shortcut;
    }
    out << '\n';
  }
  if (const auto& pos = g.positions()) {
    out << "# positions\n";
    for (std::size_t i = 0; i < pos->size(); ++i)
      out << i << ' ' << format_double((*pos)[i].x) << ' ' << format_double((*pos)[i].y) << '\n';
  }
  if (!out) throw IoError("write_graph: stream failure");
}

namespace {

std::string field_value(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw IoError("graph header: expected '" + key + "=...'");
  return token.substr(key.size() + 1);
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("graph file: missing header");
  std::istringstream header(line);
  std::string tn, tl, tb;
  header >> tn >> tl >> tb;
  std::size_t n = 0;
  try {
    n = std::stoull(field_value(tn, "n"));
  } catch (const std::logic_error&) {
    throw IoError("graph header: bad node count");
  }
  const std::string box = field_value(tl, "L");
  const std::string boundary = field_value(tb, "boundary");

  std::vector<Edge> edges, shortcuts;
  std::vector<Point2D> positions;
  bool in_positions = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line == "# positions") {
      in_positions = true;
      positions.resize(n);
      continue;
    }
    std::istringstream row(line);
    if (in_positions) {
      std::size_t id;
      std::string x, y;
      if (!(row >> id >> x >> y) || id >= n)
        throw IoError("graph file line " + std::to_string(lineno) + ": bad position row");
      positions[id] = {parse_double(x), parse_double(y)};
    } else {
      NodeId u, v;
      std::string mark;
      if (!(row >> u >> v)) throw IoError("graph file line " + std::to_string(lineno) + ": bad edge row");
      edges.emplace_back(u, v);
      if (row >> mark) {
        if (mark != "s") throw IoError("graph file line " + std::to_string(lineno) + ": unknown edge mark");
        shortcuts.emplace_back(u, v);
      }
    }
  }

  Graph g;
  try {
    g = Graph::from_edges(n, edges);
    if (in_positions) {
      if (box == "-" || boundary == "-") throw IoError("graph file: positions without box geometry");
      g.set_geometry(std::move(positions), parse_double(box), parse_boundary(boundary));
    }
    g.set_shortcuts(std::move(shortcuts));
  } catch (const ParameterError& e) {
    throw IoError(std::string("graph file: ") + e.what());
  }
  return g;
}

}  // namespace ngsim
