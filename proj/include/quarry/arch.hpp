#ifndef QUARRY_ARCH_HPP
#define QUARRY_ARCH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quarry/workload.hpp"

namespace quarry {

// Processing element flavors. LIGHT1/LIGHT2 are the shift-add PEs with 8-bit
// activations and 4-/8-bit weights; all types accumulate into 32-bit psums.
enum class PEType { FP32, INT16, LIGHT1, LIGHT2 };

inline constexpr std::array<PEType, 4> kAllPETypes = {
    PEType::FP32, PEType::INT16, PEType::LIGHT1, PEType::LIGHT2};

std::uint64_t act_bits(PEType t);   // 32 / 16 / 8 / 8
std::uint64_t wgt_bits(PEType t);   // 32 / 16 / 4 / 8
std::uint64_t psum_bits(PEType t);  // 32 for every type

std::string pe_type_name(PEType t);
PEType parse_pe_type(const std::string& token);

// One hardware design point.
struct AcceleratorConfig {
    std::uint64_t pe_rows = 1;
    std::uint64_t pe_cols = 1;
    std::uint64_t glb_bytes = 1;
    std::uint64_t ifmap_spad_bytes = 1;
    std::uint64_t filter_spad_bytes = 1;
    std::uint64_t psum_spad_bytes = 1;
    std::uint64_t dram_bw = 1;  // bytes per cycle
    double clock_hz = 200e6;
    PEType pe_type = PEType::INT16;

    bool operator==(const AcceleratorConfig&) const = default;
};

// Entries of `entry_bits` each that fit in a spad: floor(bytes*8 / bits).
std::uint64_t spad_capacity_entries(std::uint64_t spad_bytes, std::uint64_t entry_bits);

// Base invariants only. Empty result means ok.
std::vector<std::string> validate_config(const AcceleratorConfig& cfg);

// Base invariants plus per-layer capacity: the filter spad must hold one
// filter row (S entries), the ifmap spad one padded input row (W + 2*pad
// entries), and the psum spad one output row (F entries), at the config's
// bit widths.
std::vector<std::string> validate_config(const AcceleratorConfig& cfg, const Network& net);

AcceleratorConfig parse_arch(const std::string& text);
AcceleratorConfig load_arch_file(const std::string& path);
std::string arch_to_json_text(const AcceleratorConfig& cfg);

}  // namespace quarry

#endif
