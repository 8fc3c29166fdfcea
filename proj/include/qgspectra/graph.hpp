#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qgs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// One undirected bond carrying the scaling potential U = lambda * E.
struct Bond {
  int from = 0;
  int to = 0;
  double length = 1.0;
  double lambda = 0.0;
  double beta = 1.0;  // +sqrt(1 - lambda)

  double action() const noexcept { return beta * length; }
};

/// Directed copy of a bond. Index 2b runs from -> to, 2b + 1 runs to -> from.
class DirectedBond {
public:
  constexpr DirectedBond(int bond, bool reversed) noexcept : bond_(bond), reversed_(reversed) {}
  static constexpr DirectedBond from_index(int index) noexcept { return {index / 2, (index % 2) == 1}; }

  constexpr int index() const noexcept { return 2 * bond_ + (reversed_ ? 1 : 0); }
  constexpr int bond() const noexcept { return bond_; }
  constexpr bool is_reversed() const noexcept { return reversed_; }
  /// The time-reversed directed bond I'.
  constexpr DirectedBond reversed() const noexcept { return {bond_, !reversed_}; }

  friend constexpr bool operator==(DirectedBond, DirectedBond) = default;

private:
  int bond_;
  bool reversed_;
};

/// Scattering amplitudes at one vertex. incoming[i] and outgoing[i] belong to
/// the same bond, so the diagonal of `amplitudes` holds reflection amplitudes.
struct VertexScattering {
  int vertex = 0;
  std::vector<int> incoming;
  std::vector<int> outgoing;
  ComplexMatrix amplitudes;  // (i, j) = t(incoming[i], outgoing[j])
};

struct BondSpec {
  int from = 0;
  int to = 0;
  double length = 1.0;
  double lambda = 0.0;
};

enum class ScatteringMode { kirchhoff, chain_reflections, explicit_matrix };

struct ExplicitVertex {
  std::vector<int> bonds;  // row/column order of `matrix`
  ComplexMatrix matrix;
};

struct ScatteringSpec {
  ScatteringMode mode = ScatteringMode::kirchhoff;
  std::vector<int> dirichlet;                // kirchhoff: vertices with hard-wall reflection -1
  std::vector<double> reflections;           // chain_reflections: r at interior vertices, chain order
  double end_reflection = -1.0;              // chain_reflections: reflection at both chain ends
  std::map<int, ExplicitVertex> vertices;    // explicit_matrix
};

struct GraphSpec {
  std::vector<int> vertices;
  std::vector<BondSpec> bonds;
  ScatteringSpec scattering;
};

/// Immutable scaling quantum graph with its assembled bond-scattering amplitudes.
class Graph {
public:
  Graph() = default;

  const std::vector<int>& vertices() const noexcept { return vertices_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const std::vector<VertexScattering>& scattering() const noexcept { return scattering_; }

  int num_bonds() const noexcept { return static_cast<int>(bonds_.size()); }
  int num_directed() const noexcept { return 2 * num_bonds(); }

  /// t_IJ over directed bonds, 2N_B x 2N_B.
  const ComplexMatrix& transitions() const noexcept { return transitions_; }
  /// beta_I L_I for every directed bond.
  const std::vector<double>& directed_actions() const noexcept { return directed_actions_; }
  /// Total reduced action length, half the sum of directed actions.
  double S0() const noexcept { return S0_; }

  int origin(int directed) const;
  int terminus(int directed) const;

  /// max |T^dagger T - 1|.
  double unitarity_defect() const;

private:
  friend Graph build_graph(const GraphSpec& spec);

  std::vector<int> vertices_;
  std::vector<Bond> bonds_;
  std::vector<VertexScattering> scattering_;
  ComplexMatrix transitions_;
  std::vector<double> directed_actions_;
  double S0_ = 0.0;
};

/// Validates a spec and assembles the graph. Throws ValidationError.
Graph build_graph(const GraphSpec& spec);

/// S_IJ(k) = t_IJ exp(i beta_I L_I k). Requires k > 0.
ComplexMatrix s_matrix(const Graph& graph, double k);

/// Linear chain with bond lengths `lengths` (lambda = 0), hard-wall ends and
/// 2x2 blocks [[r, t], [t, -r]] with r = reflections[i] at interior vertices.
GraphSpec linear_chain_spec(std::span<const double> lengths, std::span<const double> reflections);

struct StringSegment {
  double length = 1.0;
  double density = 1.0;  // epsilon_i, relative to the mean mass density mu0
};

/// Clamped taut string with piecewise-constant density. The transverse modes
/// obey the scaling-graph equation with beta_i = sqrt(epsilon_i) and E = omega^2 mu0 / T.
struct StringNetwork {
  Graph graph;
  double tension = 1.0;
  std::vector<double> densities;

  /// omega for momentum k, from E = k^2 = omega^2 mu0 / T.
  double angular_frequency(double k, double mu0) const;
};

StringNetwork from_string_network(std::span<const StringSegment> segments, double tension);

} // namespace qgs
