#include "qgspectra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qgspectra/error.hpp"

namespace qgs {

namespace {

constexpr double kUserUnitarityTol = 1e-10;
constexpr double kInternalUnitarityTol = 1e-12;

struct Incidence {
  int bond;
  int incoming;
  int outgoing;
};

double max_unitarity_defect(const ComplexMatrix& m) {
  const ComplexMatrix d = m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

std::vector<std::vector<Incidence>> incidences(const GraphSpec& spec, const std::map<int, int>& vertex_pos) {
  std::vector<std::vector<Incidence>> inc(spec.vertices.size());
  for (std::size_t b = 0; b < spec.bonds.size(); ++b) {
    const auto& bs = spec.bonds[b];
    const int fwd = DirectedBond(static_cast<int>(b), false).index();
    const int bwd = DirectedBond(static_cast<int>(b), true).index();
    inc[vertex_pos.at(bs.from)].push_back({static_cast<int>(b), bwd, fwd});
    inc[vertex_pos.at(bs.to)].push_back({static_cast<int>(b), fwd, bwd});
  }
  return inc;
}

ComplexMatrix kirchhoff_block(const std::vector<Incidence>& inc, const std::vector<Bond>& bonds) {
  const auto d = static_cast<Eigen::Index>(inc.size());
  double total = 0.0;
  for (const auto& e : inc) total += bonds[e.bond].beta;
  ComplexMatrix t(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double bi = bonds[inc[i].bond].beta;
      const double bj = bonds[inc[j].bond].beta;
      t(i, j) = 2.0 * std::sqrt(bi * bj) / total - (i == j ? 1.0 : 0.0);
    }
  }
  return t;
}

// Orders the vertices of a path graph from one end to the other. Prefers the
// end that appears first in the declared vertex list.
std::vector<int> chain_order(const GraphSpec& spec, const std::vector<std::vector<Incidence>>& inc,
                             const std::map<int, int>& vertex_pos) {
  const std::size_t nv = spec.vertices.size();
  if (spec.bonds.size() + 1 != nv || nv < 2) {
    throw ValidationError("schema violation: chain_reflections requires a linear chain (N_B = N_V - 1)");
  }
  int start = -1;
  for (std::size_t v = 0; v < nv; ++v) {
    if (inc[v].size() > 2) throw ValidationError("schema violation: chain_reflections requires vertex degree <= 2");
    if (inc[v].size() == 1 && start < 0) start = static_cast<int>(v);
  }
  if (start < 0) throw ValidationError("schema violation: chain_reflections requires two chain ends");
  std::vector<int> order{start};
  int prev_bond = -1;
  int cur = start;
  while (order.size() < nv) {
    int next = -1;
    for (const auto& e : inc[cur]) {
      if (e.bond == prev_bond) continue;
      const auto& bs = spec.bonds[e.bond];
      next = vertex_pos.at(bs.from == spec.vertices[cur] ? bs.to : bs.from);
      prev_bond = e.bond;
      break;
    }
    if (next < 0) throw ValidationError("schema violation: chain_reflections graph is not connected");
    order.push_back(next);
    cur = next;
  }
  return order;
}

} // namespace

int Graph::origin(int directed) const {
  const auto d = DirectedBond::from_index(directed);
  const auto& b = bonds_.at(d.bond());
  return d.is_reversed() ? b.to : b.from;
}

int Graph::terminus(int directed) const {
  const auto d = DirectedBond::from_index(directed);
  const auto& b = bonds_.at(d.bond());
  return d.is_reversed() ? b.from : b.to;
}

double Graph::unitarity_defect() const { return max_unitarity_defect(transitions_); }

Graph build_graph(const GraphSpec& spec) {
  if (spec.vertices.empty()) throw ValidationError("schema violation: no vertices");
  if (spec.bonds.empty()) throw ValidationError("schema violation: no bonds");

  std::map<int, int> vertex_pos;
  for (std::size_t i = 0; i < spec.vertices.size(); ++i) {
    if (!vertex_pos.emplace(spec.vertices[i], static_cast<int>(i)).second) {
      throw ValidationError("schema violation: duplicate vertex id " + std::to_string(spec.vertices[i]));
    }
  }

  Graph g;
  g.vertices_ = spec.vertices;
  for (std::size_t b = 0; b < spec.bonds.size(); ++b) {
    const auto& bs = spec.bonds[b];
    const std::string where = " (bond " + std::to_string(b) + ")";
    if (!vertex_pos.contains(bs.from) || !vertex_pos.contains(bs.to)) {
      throw ValidationError("dangling bond: endpoint is not a declared vertex" + where);
    }
    if (bs.from == bs.to) throw ValidationError("self-loop bond: endpoints coincide" + where);
    if (!(bs.length > 0.0) || !std::isfinite(bs.length)) {
      throw ValidationError("non-positive length" + where);
    }
    if (!(bs.lambda < 1.0) || !std::isfinite(bs.lambda)) {
      throw ValidationError("lambda >= 1 (tunneling regime excluded)" + where);
    }
    g.bonds_.push_back({bs.from, bs.to, bs.length, bs.lambda, std::sqrt(1.0 - bs.lambda)});
  }

  const auto inc = incidences(spec, vertex_pos);
  const auto& sc = spec.scattering;
  std::vector<ComplexMatrix> blocks(spec.vertices.size());
  std::vector<std::vector<Incidence>> ordered = inc;

  switch (sc.mode) {
  case ScatteringMode::kirchhoff: {
    std::set<int> hard(sc.dirichlet.begin(), sc.dirichlet.end());
    for (int v : hard) {
      if (!vertex_pos.contains(v)) throw ValidationError("schema violation: unknown dirichlet vertex " + std::to_string(v));
    }
    for (std::size_t v = 0; v < inc.size(); ++v) {
      const auto d = static_cast<Eigen::Index>(inc[v].size());
      blocks[v] = hard.contains(spec.vertices[v]) ? ComplexMatrix(-ComplexMatrix::Identity(d, d))
                                                  : kirchhoff_block(inc[v], g.bonds_);
    }
    break;
  }
  case ScatteringMode::chain_reflections: {
    const auto order = chain_order(spec, inc, vertex_pos);
    if (sc.reflections.size() + 2 != order.size()) {
      throw ValidationError("schema violation: chain_reflections needs " + std::to_string(order.size() - 2) +
                            " interior reflections, got " + std::to_string(sc.reflections.size()));
    }
    if (std::abs(std::abs(sc.end_reflection) - 1.0) > kUserUnitarityTol) {
      throw ValidationError("non-unitary scattering matrix: end reflection must have unit modulus");
    }
    blocks[order.front()] = ComplexMatrix::Constant(1, 1, sc.end_reflection);
    blocks[order.back()] = ComplexMatrix::Constant(1, 1, sc.end_reflection);
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      const int v = order[i];
      const double r = sc.reflections[i - 1];
      if (!(std::abs(r) <= 1.0)) throw ValidationError("non-unitary scattering matrix: |r| > 1 at chain vertex");
      const double t = std::sqrt(1.0 - r * r);
      // Incident bonds ordered [left, right] along the chain.
      auto& e = ordered[v];
      const int prev_v = spec.vertices[order[i - 1]];
      const auto& b0 = spec.bonds[e[0].bond];
      if (b0.from != prev_v && b0.to != prev_v) std::swap(e[0], e[1]);
      ComplexMatrix m(2, 2);
      m << r, t, t, -r;
      blocks[v] = m;
    }
    break;
  }
  case ScatteringMode::explicit_matrix: {
    for (std::size_t v = 0; v < inc.size(); ++v) {
      const int vid = spec.vertices[v];
      const auto it = sc.vertices.find(vid);
      if (it == sc.vertices.end()) {
        throw ValidationError("schema violation: explicit scattering missing for vertex " + std::to_string(vid));
      }
      const auto& ev = it->second;
      const auto d = static_cast<Eigen::Index>(inc[v].size());
      if (ev.matrix.rows() != d || ev.matrix.cols() != d || static_cast<Eigen::Index>(ev.bonds.size()) != d) {
        throw ValidationError("schema violation: explicit matrix at vertex " + std::to_string(vid) +
                              " must be " + std::to_string(d) + "x" + std::to_string(d));
      }
      std::vector<Incidence> reordered;
      for (int b : ev.bonds) {
        auto f = std::find_if(inc[v].begin(), inc[v].end(), [b](const Incidence& e) { return e.bond == b; });
        if (f == inc[v].end()) {
          throw ValidationError("schema violation: bond " + std::to_string(b) + " is not incident on vertex " +
                                std::to_string(vid));
        }
        reordered.push_back(*f);
      }
      const double defect = max_unitarity_defect(ev.matrix);
      if (defect > kUserUnitarityTol) {
        std::ostringstream os;
        os << "non-unitary scattering matrix at vertex " << vid << " (max |t^dagger t - 1| = " << defect << ")";
        throw ValidationError(os.str());
      }
      ordered[v] = std::move(reordered);
      blocks[v] = ev.matrix;
    }
    break;
  }
  }

  const int nd = 2 * static_cast<int>(g.bonds_.size());
  g.transitions_ = ComplexMatrix::Zero(nd, nd);
  for (std::size_t v = 0; v < ordered.size(); ++v) {
    VertexScattering vs;
    vs.vertex = spec.vertices[v];
    for (const auto& e : ordered[v]) {
      vs.incoming.push_back(e.incoming);
      vs.outgoing.push_back(e.outgoing);
    }
    vs.amplitudes = blocks[v];
    for (std::size_t i = 0; i < vs.incoming.size(); ++i) {
      for (std::size_t j = 0; j < vs.outgoing.size(); ++j) {
        g.transitions_(vs.incoming[i], vs.outgoing[j]) = vs.amplitudes(i, j);
      }
    }
    g.scattering_.push_back(std::move(vs));
  }

  g.directed_actions_.resize(nd);
  double sum = 0.0;
  for (int i = 0; i < nd; ++i) {
    g.directed_actions_[i] = g.bonds_[i / 2].action();
    sum += g.directed_actions_[i];
  }
  g.S0_ = 0.5 * sum;

  const double defect = g.unitarity_defect();
  if (defect > (sc.mode == ScatteringMode::explicit_matrix ? kUserUnitarityTol : kInternalUnitarityTol)) {
    std::ostringstream os;
    os << "non-unitary scattering matrix (max |T^dagger T - 1| = " << defect << ")";
    throw ValidationError(os.str());
  }
  return g;
}

ComplexMatrix s_matrix(const Graph& graph, double k) {
  if (!(k > 0.0)) throw ValidationError("k <= 0: S(k) requires positive momentum");
  ComplexMatrix s = graph.transitions();
  const auto& phi = graph.directed_actions();
  for (Eigen::Index i = 0; i < s.rows(); ++i) s.row(i) *= std::polar(1.0, phi[i] * k);
  return s;
}

GraphSpec linear_chain_spec(std::span<const double> lengths, std::span<const double> reflections) {
  GraphSpec spec;
  for (std::size_t v = 0; v <= lengths.size(); ++v) spec.vertices.push_back(static_cast<int>(v));
  for (std::size_t b = 0; b < lengths.size(); ++b) {
    spec.bonds.push_back({static_cast<int>(b), static_cast<int>(b + 1), lengths[b], 0.0});
  }
  spec.scattering.mode = ScatteringMode::chain_reflections;
  spec.scattering.reflections.assign(reflections.begin(), reflections.end());
  return spec;
}

double StringNetwork::angular_frequency(double k, double mu0) const {
  if (!(mu0 > 0.0)) throw ValidationError("non-positive density: mu0 must be positive");
  return k * std::sqrt(tension / mu0);
}

StringNetwork from_string_network(std::span<const StringSegment> segments, double tension) {
  if (!(tension > 0.0)) throw ValidationError("non-positive tension");
  if (segments.empty()) throw ValidationError("schema violation: string needs at least one segment");
  GraphSpec spec;
  StringNetwork net;
  const int n = static_cast<int>(segments.size());
  for (int v = 0; v <= n; ++v) spec.vertices.push_back(v);
  for (int i = 0; i < n; ++i) {
    const auto& s = segments[i];
    if (!(s.density > 0.0)) throw ValidationError("non-positive density (segment " + std::to_string(i) + ")");
    spec.bonds.push_back({i, i + 1, s.length, 1.0 - s.density});
    net.densities.push_back(s.density);
  }
  spec.scattering.mode = ScatteringMode::kirchhoff;
  spec.scattering.dirichlet = {0, n};
  net.graph = build_graph(spec);
  net.tension = tension;
  return net;
}

} // namespace qgs
