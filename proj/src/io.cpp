#include "qgspectra/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qgspectra/error.hpp"

namespace qgs {

using nlohmann::json;

std::string trigpoly_to_json(const TrigPoly& p) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["S0"] = p.S0();
  j["gamma0"] = p.gamma0();
  j["level"] = p.level();
  j["scale"] = p.scale();
  j["terms"] = json::array();
  for (const auto& t : p.terms()) j["terms"].push_back({{"a", t.a}, {"S", t.S}, {"gamma", t.gamma}});
  return j.dump(2) + "\n";
}

TrigPoly trigpoly_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema violation: unparseable trigpoly JSON: ") + e.what());
  }
  try {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kSchemaVersion) {
      throw ValidationError("schema violation: unsupported trigpoly schema_version");
    }
    std::vector<TrigTerm> terms;
    for (const auto& t : j.value("terms", json::array())) {
      terms.push_back({t.at("a").get<double>(), t.at("S").get<double>(), t.at("gamma").get<double>()});
    }
    return TrigPoly(j.at("S0").get<double>(), j.at("gamma0").get<double>(), std::move(terms),
                    j.value("level", 0), j.value("scale", 1.0));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema violation: trigpoly JSON: ") + e.what());
  }
}

void save_trigpoly(const TrigPoly& p, const std::string& path) { write_file(path, trigpoly_to_json(p)); }

TrigPoly load_trigpoly(const std::string& path) { return trigpoly_from_json(read_file(path)); }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << contents;
  if (!out) throw ValidationError("cannot write file: " + path);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace qgs
