#include "qgspectra/graph_config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qgspectra/error.hpp"

namespace qgs {

namespace {

[[noreturn]] void schema(const std::string& what) { throw ValidationError("schema violation: " + what); }

template <class T>
T scalar(const YAML::Node& node, const std::string& what) {
  if (!node || !node.IsScalar()) schema("missing or non-scalar field '" + what + "'");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    schema("field '" + what + "' has the wrong type");
  }
}

Complex complex_entry(const YAML::Node& node) {
  if (node.IsScalar()) return {scalar<double>(node, "matrix entry"), 0.0};
  if (node.IsSequence() && node.size() == 2) {
    return {scalar<double>(node[0], "matrix entry re"), scalar<double>(node[1], "matrix entry im")};
  }
  schema("matrix entry must be a number or [re, im]");
}

ComplexMatrix complex_matrix(const YAML::Node& node) {
  if (!node || !node.IsSequence() || node.size() == 0) schema("matrix must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(node.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) schema("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex_entry(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

template <class T>
std::vector<T> scalar_list(const YAML::Node& node, const std::string& what) {
  std::vector<T> out;
  if (!node) return out;
  if (!node.IsSequence()) schema("'" + what + "' must be a list");
  for (const auto& e : node) out.push_back(scalar<T>(e, what));
  return out;
}

} // namespace

GraphSpec parse_graph_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    schema(std::string("unparseable YAML: ") + e.what());
  }
  if (!root.IsMap()) schema("top level must be a mapping");

  GraphSpec spec;
  spec.vertices = scalar_list<int>(root["vertices"], "vertices");
  if (!root["bonds"] || !root["bonds"].IsSequence()) schema("'bonds' must be a list");
  for (const auto& b : root["bonds"]) {
    BondSpec bs;
    bs.from = scalar<int>(b["from"], "from");
    bs.to = scalar<int>(b["to"], "to");
    bs.length = scalar<double>(b["length"], "length");
    bs.lambda = b["lambda"] ? scalar<double>(b["lambda"], "lambda") : 0.0;
    spec.bonds.push_back(bs);
  }

  const auto sc = root["scattering"];
  const std::string mode = sc && sc["mode"] ? scalar<std::string>(sc["mode"], "mode") : "kirchhoff";
  if (mode == "kirchhoff") {
    spec.scattering.mode = ScatteringMode::kirchhoff;
    spec.scattering.dirichlet = scalar_list<int>(sc["dirichlet"], "dirichlet");
  } else if (mode == "chain_reflections") {
    spec.scattering.mode = ScatteringMode::chain_reflections;
    spec.scattering.reflections = scalar_list<double>(sc["reflections"], "reflections");
    if (sc["end_reflection"]) spec.scattering.end_reflection = scalar<double>(sc["end_reflection"], "end_reflection");
  } else if (mode == "explicit") {
    spec.scattering.mode = ScatteringMode::explicit_matrix;
    if (!sc["vertices"] || !sc["vertices"].IsSequence()) schema("explicit scattering needs a 'vertices' list");
    for (const auto& v : sc["vertices"]) {
      ExplicitVertex ev;
      const int id = scalar<int>(v["vertex"], "vertex");
      ev.bonds = scalar_list<int>(v["bonds"], "bonds");
      ev.matrix = complex_matrix(v["matrix"]);
      if (!spec.scattering.vertices.emplace(id, std::move(ev)).second) {
        schema("duplicate explicit vertex " + std::to_string(id));
      }
    }
  } else {
    schema("unknown scattering mode '" + mode + "'");
  }
  return spec;
}

GraphSpec load_graph_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_graph_spec(os.str());
}

} // namespace qgs
