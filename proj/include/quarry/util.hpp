#ifndef QUARRY_UTIL_HPP
#define QUARRY_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace quarry {

inline std::uint64_t ceil_div(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("ceil_div: zero divisor");
    return num / den + (num % den != 0 ? 1 : 0);
}

// Storage footprint of `entries` values of `bits` each, rounded up to whole bytes.
inline std::uint64_t bytes_for_bits(std::uint64_t entries, std::uint64_t bits) {
    return ceil_div(entries * bits, 8);
}

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// FNV-1a 64-bit, used for input/payload provenance digests.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_string(std::string_view data);

}  // namespace quarry

#endif
