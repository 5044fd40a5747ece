#ifndef QUARRY_DATAFLOW_HPP
#define QUARRY_DATAFLOW_HPP

#include <cstdint>

#include "quarry/arch.hpp"
#include "quarry/workload.hpp"

namespace quarry {

// Row-stationary mapping geometry for one layer on one PE array.
//
// A PE set is a set_rows x strip_width block: each PE keeps one filter row
// stationary and runs 1-D convolutions for one output row, psums accumulate
// spatially down the set's columns. One set pass covers one
// (n, m, c, strip, vfold) assignment and takes F*S cycles; K sets run
// concurrently. Layers taller than the array fold vertically, output rows
// beyond the array width are processed in strips.
struct Mapping {
    std::uint64_t set_rows = 0;         // filter rows resident per set: min(R, pe_rows)
    std::uint64_t strip_width = 0;      // output rows per set: min(E, pe_cols)
    std::uint64_t sets_fitting = 0;     // K = floor(rows/set_rows) * floor(cols/strip_width)
    std::uint64_t vertical_folds = 0;   // ceil(R / pe_rows)
    std::uint64_t strips = 0;           // ceil(E / strip_width)
    std::uint64_t set_passes_total = 0; // N*M*C*strips*vertical_folds
    double utilization = 0.0;           // occupied PEs / (pe_rows*pe_cols)

    bool operator==(const Mapping&) const = default;
};

// Cycle and access counts for a (layer, config) pair. Spad counts are per
// entry, GLB counts per entry, DRAM traffic in bytes.
struct AccessStats {
    std::uint64_t macs = 0;
    std::uint64_t compute_cycles = 0;
    std::uint64_t dram_cycles = 0;
    std::uint64_t latency_cycles = 0;  // max(compute, dram) per layer; summed per network

    std::uint64_t spad_ifmap_reads = 0;
    std::uint64_t spad_filter_reads = 0;
    std::uint64_t spad_psum_reads = 0;
    std::uint64_t spad_psum_writes = 0;

    std::uint64_t glb_ifmap_reads = 0;
    std::uint64_t glb_filter_reads = 0;
    std::uint64_t glb_ofmap_writes = 0;

    std::uint64_t dram_ifmap_bytes = 0;
    std::uint64_t dram_filter_bytes = 0;
    std::uint64_t dram_ofmap_bytes = 0;

    std::uint64_t refetch_factor = 0;
    double utilization = 0.0;

    bool operator==(const AccessStats&) const = default;
};

// Throws std::invalid_argument when validate_config(cfg, layer) fails.
Mapping map_layer(const LayerConfig& layer, const AcceleratorConfig& cfg);

// Closed-form cycle/access model for one layer under the mapping above.
AccessStats layer_stats(const LayerConfig& layer, const AcceleratorConfig& cfg);

// Sequential execution over all layers: counts sum field-wise, latency is
// the sum of per-layer latencies, utilization is the MAC-weighted mean.
AccessStats network_stats(const Network& net, const AcceleratorConfig& cfg);

// Brute-force verification oracle: walks the full seven-deep (n,m,c,e,f,r,s)
// loop nest, tags every MAC with its PE assignment under the documented
// schedule and counts each scratchpad/GLB event individually. Must produce
// output identical to layer_stats, field for field.
inline constexpr std::uint64_t kOracleMacGuard = 10'000'000;
AccessStats simulate_layer_oracle(const LayerConfig& layer, const AcceleratorConfig& cfg);

}  // namespace quarry

#endif
