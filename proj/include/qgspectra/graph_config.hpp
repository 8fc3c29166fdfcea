#pragma once

#include <string>

#include "qgspectra/graph.hpp"

namespace qgs {

/// Parses a YAML graph description:
///
///   vertices: [0, 1, 2]
///   bonds:
///     - {from: 0, to: 1, length: 0.3, lambda: 0.0}
///     - {from: 1, to: 2, length: 0.7, lambda: 0.5}
///   scattering:
///     mode: kirchhoff            # or chain_reflections, explicit
///     dirichlet: [0, 2]          # kirchhoff only
///     reflections: [0.17]        # chain_reflections only; end_reflection optional (-1)
///     vertices:                  # explicit only
///       - {vertex: 1, bonds: [0, 1], matrix: [[0.6, 0.8], [0.8, -0.6]]}
///
/// Matrix entries are real numbers or [re, im] pairs. Throws ValidationError
/// with a "schema violation" message on malformed input.
GraphSpec parse_graph_spec(const std::string& yaml_text);
GraphSpec load_graph_spec(const std::string& path);

} // namespace qgs
