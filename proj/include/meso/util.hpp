#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace meso {

// Shortest decimal string that round-trips to the same double ("0.1", not
// "0.10000000000000001"). Used everywhere a number is serialized, so output
// files are byte-stable across runs and thread counts.
std::string format_double(double v);

// strtod with full-string validation; throws std::invalid_argument.
double parse_double(const std::string& s);
int parse_int(const std::string& s);

// FNV-1a 64-bit content hash, for manifest checksums.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace meso
