#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qgs::cli {

/// Runs one qgspectra command. Returns 0 on success, 2 on invalid input
/// (bad flags, missing files, schema or precondition violations), 1 otherwise.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

} // namespace qgs::cli
