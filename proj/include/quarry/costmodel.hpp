#ifndef QUARRY_COSTMODEL_HPP
#define QUARRY_COSTMODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quarry/arch.hpp"
#include "quarry/dataflow.hpp"
#include "quarry/workload.hpp"

namespace quarry {

// Per-PE-type cost primitives. Energies are picojoules, areas square
// micrometers, leakage milliwatts per square millimeter. These replace the
// synthesis flow: values come from public 45 nm per-operation references and
// can be recalibrated through the cost-table file.
struct PETypeCost {
    double e_mac_pj = 0.0;        // energy per MAC (or shift-add) op
    double a_pe_logic_um2 = 0.0;  // MAC + control area, scratchpads excluded

    bool operator==(const PETypeCost&) const = default;
};

struct CostTable {
    std::array<PETypeCost, 4> pe = {};  // indexed by PEType enum order

    double e_spad_bit_pj = 0.0;   // scratchpad access energy per bit
    double e_glb_bit_pj = 0.0;    // global buffer access energy per bit
    double e_dram_bit_pj = 0.0;   // DRAM transfer energy per bit
    double a_spad_byte_um2 = 0.0; // scratchpad area per byte
    double a_glb_byte_um2 = 0.0;  // global buffer area per byte
    double p_leak_mw_per_mm2 = 0.0;
    double overhead_factor = 1.0; // NoC/control area multiplier, >= 1

    const PETypeCost& cost_of(PEType t) const { return pe[static_cast<std::size_t>(t)]; }
    PETypeCost& cost_of(PEType t) { return pe[static_cast<std::size_t>(t)]; }

    bool operator==(const CostTable&) const = default;
};

// Checks positivity and the PE-type ordering constraints
// (e_mac and a_pe_logic: FP32 > INT16 > LIGHT2 > LIGHT1). Empty means ok.
std::vector<std::string> validate_cost_table(const CostTable& table);

struct PPAResult {
    double latency_s = 0.0;
    double energy_j = 0.0;      // mac + spad + glb + dram + leak, exactly
    double avg_power_w = 0.0;
    double area_mm2 = 0.0;
    double throughput_macs_s = 0.0;
    double perf_per_area = 0.0; // MACs/s per mm^2

    double mac_j = 0.0;
    double spad_j = 0.0;
    double glb_j = 0.0;
    double dram_j = 0.0;
    double leak_j = 0.0;

    bool operator==(const PPAResult&) const = default;
};

// area = overhead * [rows*cols*(a_pe_logic + spad_bytes*a_spad_byte) + glb*a_glb_byte]
double accelerator_area_um2(const AcceleratorConfig& cfg, const CostTable& table);

PPAResult evaluate_ppa(const Network& net, const AcceleratorConfig& cfg, const CostTable& table);

// PPA from pre-computed network stats; evaluate_ppa is this plus network_stats.
PPAResult evaluate_ppa(const AccessStats& stats, const AcceleratorConfig& cfg, const CostTable& table);

// The bundled 45 nm-class calibration table (embedded copy of
// data/cost_table_default.json). Throws if the bundled data is invalid.
CostTable default_cost_table();

CostTable parse_cost_table(const std::string& text);
CostTable load_cost_table_file(const std::string& path);
std::string cost_table_to_json_text(const CostTable& table);

// Digest of the bundled table text, reported by `quarry --version`.
std::string default_cost_table_digest();

}  // namespace quarry

#endif
