#pragma once

#include <cstdint>
#include <string>

#include "qgspectra/detpoly.hpp"

namespace qgs {

constexpr int kSchemaVersion = 1;

/// TrigPoly interchange JSON:
///   {"schema_version": 1, "S0": .., "gamma0": .., "level": 0, "scale": 1,
///    "terms": [{"a": .., "S": .., "gamma": ..}, ...]}
/// "level" and "scale" are optional on input.
std::string trigpoly_to_json(const TrigPoly& p);
TrigPoly trigpoly_from_json(const std::string& text);
void save_trigpoly(const TrigPoly& p, const std::string& path);
TrigPoly load_trigpoly(const std::string& path);

/// Shortest decimal text that round-trips the double.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

} // namespace qgs
