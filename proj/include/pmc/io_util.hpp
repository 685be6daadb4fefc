#pragma once

#include <string>

namespace pmc {

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// Parses a full-string double; `context` names the source in the error.
double parse_double(const std::string& text, const std::string& context);

/// Writes through a temporary file in the same directory and renames it
/// into place. Creates missing parent directories.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace pmc
