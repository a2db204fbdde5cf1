#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "salso/labels.hpp"

namespace salso::cli {

// Parses H rows of comma-separated integer labels. Throws InputError naming
// the offending row (1-based, counting the header) and column.
DrawsMatrix parse_draws(std::istream& in, bool header, const std::string& source = "<input>");
DrawsMatrix read_draws(const std::string& path, bool header);

// Entry point shared by the `salso` executable and the tests. Returns the
// process exit code: 0 on success, 2 on any input or validation error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace salso::cli
