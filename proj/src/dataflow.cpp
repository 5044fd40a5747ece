#include "quarry/dataflow.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "quarry/util.hpp"

namespace quarry {

namespace {

void require_valid(const LayerConfig& layer, const AcceleratorConfig& cfg) {
    Network single{layer.name, {layer}};
    auto v = validate_config(cfg, single);
    auto lv = validate_layer(layer);
    v.insert(v.end(), lv.begin(), lv.end());
    if (!v.empty()) {
        std::ostringstream oss;
        oss << "layer/config precondition failed:";
        for (const auto& msg : v) oss << "\n  " << msg;
        throw std::invalid_argument(oss.str());
    }
}

}  // namespace

Mapping map_layer(const LayerConfig& layer, const AcceleratorConfig& cfg) {
    require_valid(layer, cfg);

    const std::uint64_t R = layer.filter_height;
    const std::uint64_t E = layer.out_height();

    Mapping m;
    m.set_rows = std::min(R, cfg.pe_rows);
    m.vertical_folds = ceil_div(R, cfg.pe_rows);
    m.strip_width = std::min(E, cfg.pe_cols);
    m.strips = ceil_div(E, m.strip_width);
    m.sets_fitting = (cfg.pe_rows / m.set_rows) * (cfg.pe_cols / m.strip_width);
    m.set_passes_total =
        layer.batch * layer.out_channels * layer.in_channels * m.strips * m.vertical_folds;

    // Occupancy, not per-MAC activity: a pass reserves its full set footprint
    // even when a partial strip or fold leaves PEs of the set idle.
    std::uint64_t occupied =
        m.set_rows * m.strip_width * std::min(m.sets_fitting, m.set_passes_total);
    m.utilization = static_cast<double>(occupied) /
                    static_cast<double>(cfg.pe_rows * cfg.pe_cols);
    return m;
}

AccessStats layer_stats(const LayerConfig& layer, const AcceleratorConfig& cfg) {
    const Mapping m = map_layer(layer, cfg);

    const std::uint64_t N = layer.batch;
    const std::uint64_t C = layer.in_channels;
    const std::uint64_t M = layer.out_channels;
    const std::uint64_t R = layer.filter_height;
    const std::uint64_t S = layer.filter_width;
    const std::uint64_t E = layer.out_height();
    const std::uint64_t F = layer.out_width();
    const std::uint64_t padded_w = layer.in_width + 2 * layer.padding;

    AccessStats st;
    st.macs = layer_macs(layer);
    st.utilization = m.utilization;

    // One set pass is a 1-D convolution pass of F*S MACs per PE, all sets in
    // lockstep at 1 MAC/cycle.
    st.compute_cycles = ceil_div(m.set_passes_total, m.sets_fitting) * F * S;

    // Every MAC reads one ifmap entry, one weight, and does a psum
    // read-modify-write in the local scratchpads.
    st.spad_ifmap_reads = st.macs;
    st.spad_filter_reads = st.macs;
    st.spad_psum_reads = st.macs;
    st.spad_psum_writes = st.macs;

    // GLB traffic: each active PE streams its padded ifmap row per pass (no
    // reuse across filters), filter rows are fetched once per layer, ofmap
    // rows spill once after psum accumulation completes.
    st.glb_ifmap_reads = N * M * C * E * R * padded_w;
    st.glb_filter_reads = M * C * R * S;
    st.glb_ofmap_writes = N * M * E * F;

    const std::uint64_t a_bits = act_bits(cfg.pe_type);
    const std::uint64_t w_bits = wgt_bits(cfg.pe_type);
    const std::uint64_t ifmap_bytes = bytes_for_bits(N * C * layer.in_height * layer.in_width, a_bits);
    const std::uint64_t filter_bytes = bytes_for_bits(M * C * R * S, w_bits);

    st.refetch_factor = std::max<std::uint64_t>(1, ceil_div(ifmap_bytes + filter_bytes, cfg.glb_bytes));
    st.dram_ifmap_bytes = st.refetch_factor * ifmap_bytes;
    st.dram_filter_bytes = st.refetch_factor * filter_bytes;
    st.dram_ofmap_bytes = bytes_for_bits(N * M * E * F, a_bits);

    st.dram_cycles =
        ceil_div(st.dram_ifmap_bytes + st.dram_filter_bytes + st.dram_ofmap_bytes, cfg.dram_bw);
    st.latency_cycles = std::max(st.compute_cycles, st.dram_cycles);
    return st;
}

AccessStats network_stats(const Network& net, const AcceleratorConfig& cfg) {
    auto nv = validate_network(net);
    if (!nv.empty()) throw std::invalid_argument("network_stats: invalid network: " + nv.front());

    AccessStats total;
    double util_weighted = 0.0;
    for (const auto& layer : net.layers) {
        AccessStats st = layer_stats(layer, cfg);
        total.macs += st.macs;
        total.compute_cycles += st.compute_cycles;
        total.dram_cycles += st.dram_cycles;
        total.latency_cycles += st.latency_cycles;  // layers run sequentially
        total.spad_ifmap_reads += st.spad_ifmap_reads;
        total.spad_filter_reads += st.spad_filter_reads;
        total.spad_psum_reads += st.spad_psum_reads;
        total.spad_psum_writes += st.spad_psum_writes;
        total.glb_ifmap_reads += st.glb_ifmap_reads;
        total.glb_filter_reads += st.glb_filter_reads;
        total.glb_ofmap_writes += st.glb_ofmap_writes;
        total.dram_ifmap_bytes += st.dram_ifmap_bytes;
        total.dram_filter_bytes += st.dram_filter_bytes;
        total.dram_ofmap_bytes += st.dram_ofmap_bytes;
        total.refetch_factor += st.refetch_factor;
        util_weighted += st.utilization * static_cast<double>(st.macs);
    }
    total.utilization = util_weighted / static_cast<double>(total.macs);
    return total;
}

}  // namespace quarry
