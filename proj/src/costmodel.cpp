#include "quarry/costmodel.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quarry/bundled_data.hpp"
#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

std::vector<std::string> validate_cost_table(const CostTable& t) {
    std::vector<std::string> v;
    auto positive = [&](double x, const std::string& name) {
        if (!(x > 0) || !std::isfinite(x)) v.push_back(name + " must be > 0");
    };
    for (PEType pt : kAllPETypes) {
        positive(t.cost_of(pt).e_mac_pj, "e_mac(" + pe_type_name(pt) + ")");
        positive(t.cost_of(pt).a_pe_logic_um2, "a_pe_logic(" + pe_type_name(pt) + ")");
    }
    positive(t.e_spad_bit_pj, "e_spad_bit");
    positive(t.e_glb_bit_pj, "e_glb_bit");
    positive(t.e_dram_bit_pj, "e_dram_bit");
    positive(t.a_spad_byte_um2, "a_spad_byte");
    positive(t.a_glb_byte_um2, "a_glb_byte");
    positive(t.p_leak_mw_per_mm2, "p_leak_density");
    if (!(t.overhead_factor >= 1.0)) v.push_back("overhead_factor must be >= 1");

    // FP32 > INT16 > LIGHT2 > LIGHT1 on both energy-per-op and logic area.
    auto ordered = [&](double (*field)(const CostTable&, PEType), const std::string& name) {
        const PEType order[4] = {PEType::FP32, PEType::INT16, PEType::LIGHT2, PEType::LIGHT1};
        for (int i = 0; i + 1 < 4; ++i) {
            if (!(field(t, order[i]) > field(t, order[i + 1])))
                v.push_back(name + " ordering violated: " + pe_type_name(order[i]) +
                            " must exceed " + pe_type_name(order[i + 1]));
        }
    };
    ordered([](const CostTable& tb, PEType p) { return tb.cost_of(p).e_mac_pj; }, "e_mac");
    ordered([](const CostTable& tb, PEType p) { return tb.cost_of(p).a_pe_logic_um2; },
            "a_pe_logic");
    return v;
}

double accelerator_area_um2(const AcceleratorConfig& cfg, const CostTable& table) {
    double spad_bytes = static_cast<double>(cfg.ifmap_spad_bytes + cfg.filter_spad_bytes +
                                            cfg.psum_spad_bytes);
    double pe_area = table.cost_of(cfg.pe_type).a_pe_logic_um2 +
                     spad_bytes * table.a_spad_byte_um2;
    double array_area = static_cast<double>(cfg.pe_rows * cfg.pe_cols) * pe_area;
    double glb_area = static_cast<double>(cfg.glb_bytes) * table.a_glb_byte_um2;
    return table.overhead_factor * (array_area + glb_area);
}

PPAResult evaluate_ppa(const AccessStats& stats, const AcceleratorConfig& cfg,
                       const CostTable& table) {
    constexpr double kPjToJ = 1e-12;
    constexpr double kUm2ToMm2 = 1e-6;

    const std::uint64_t a_bits = act_bits(cfg.pe_type);
    const std::uint64_t w_bits = wgt_bits(cfg.pe_type);
    const std::uint64_t p_bits = psum_bits(cfg.pe_type);

    PPAResult r;
    r.latency_s = static_cast<double>(stats.latency_cycles) / cfg.clock_hz;
    r.area_mm2 = accelerator_area_um2(cfg, table) * kUm2ToMm2;

    r.mac_j = static_cast<double>(stats.macs) * table.cost_of(cfg.pe_type).e_mac_pj * kPjToJ;

    double spad_bits = static_cast<double>(stats.spad_ifmap_reads * a_bits) +
                       static_cast<double>(stats.spad_filter_reads * w_bits) +
                       static_cast<double>((stats.spad_psum_reads + stats.spad_psum_writes) * p_bits);
    r.spad_j = spad_bits * table.e_spad_bit_pj * kPjToJ;

    double glb_bits = static_cast<double>(stats.glb_ifmap_reads * a_bits) +
                      static_cast<double>(stats.glb_filter_reads * w_bits) +
                      static_cast<double>(stats.glb_ofmap_writes * a_bits);
    r.glb_j = glb_bits * table.e_glb_bit_pj * kPjToJ;

    double dram_bytes = static_cast<double>(stats.dram_ifmap_bytes + stats.dram_filter_bytes +
                                            stats.dram_ofmap_bytes);
    r.dram_j = dram_bytes * 8.0 * table.e_dram_bit_pj * kPjToJ;

    r.leak_j = table.p_leak_mw_per_mm2 * 1e-3 * r.area_mm2 * r.latency_s;

    r.energy_j = r.mac_j + r.spad_j + r.glb_j + r.dram_j + r.leak_j;
    r.avg_power_w = r.energy_j / r.latency_s;
    r.throughput_macs_s = static_cast<double>(stats.macs) / r.latency_s;
    r.perf_per_area = r.throughput_macs_s / r.area_mm2;
    return r;
}

PPAResult evaluate_ppa(const Network& net, const AcceleratorConfig& cfg, const CostTable& table) {
    auto v = validate_config(cfg, net);
    if (!v.empty()) {
        std::ostringstream oss;
        oss << "evaluate_ppa precondition failed:";
        for (const auto& msg : v) oss << "\n  " << msg;
        throw std::invalid_argument(oss.str());
    }
    return evaluate_ppa(network_stats(net, cfg), cfg, table);
}

namespace {

double get_positive(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw std::runtime_error(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

CostTable parse_cost_table(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed cost table: ") + e.what());
    }

    CostTable t;
    try {
        // Units are part of the schema; reject tables claiming anything else.
        const json& units = j.at("units");
        if (units.at("energy") != "pJ" || units.at("area") != "um^2" ||
            units.at("leakage") != "mW/mm^2")
            throw std::runtime_error(
                "cost table units must be {energy: pJ, area: um^2, leakage: mW/mm^2}");

        const json& types = j.at("pe_types");
        for (PEType pt : kAllPETypes) {
            const json& jt = types.at(pe_type_name(pt));
            t.cost_of(pt).e_mac_pj = get_positive(jt, "e_mac", pe_type_name(pt));
            t.cost_of(pt).a_pe_logic_um2 = get_positive(jt, "a_pe_logic", pe_type_name(pt));
        }
        const json& shared = j.at("shared");
        t.e_spad_bit_pj = get_positive(shared, "e_spad_bit", "shared");
        t.e_glb_bit_pj = get_positive(shared, "e_glb_bit", "shared");
        t.e_dram_bit_pj = get_positive(shared, "e_dram_bit", "shared");
        t.a_spad_byte_um2 = get_positive(shared, "a_spad_byte", "shared");
        t.a_glb_byte_um2 = get_positive(shared, "a_glb_byte", "shared");
        t.p_leak_mw_per_mm2 = get_positive(shared, "p_leak_density", "shared");
        t.overhead_factor = get_positive(shared, "overhead_factor", "shared");
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed cost table: ") + e.what());
    }

    auto v = validate_cost_table(t);
    if (!v.empty()) {
        std::ostringstream oss;
        oss << "invalid cost table:";
        for (const auto& msg : v) oss << "\n  " << msg;
        throw std::runtime_error(oss.str());
    }
    return t;
}

CostTable load_cost_table_file(const std::string& path) {
    return parse_cost_table(read_file(path));
}

std::string cost_table_to_json_text(const CostTable& t) {
    json j;
    j["units"] = {{"energy", "pJ"}, {"area", "um^2"}, {"leakage", "mW/mm^2"}};
    for (PEType pt : kAllPETypes) {
        j["pe_types"][pe_type_name(pt)] = {
            {"e_mac", t.cost_of(pt).e_mac_pj},
            {"a_pe_logic", t.cost_of(pt).a_pe_logic_um2},
        };
    }
    j["shared"] = {
        {"e_spad_bit", t.e_spad_bit_pj},
        {"e_glb_bit", t.e_glb_bit_pj},
        {"e_dram_bit", t.e_dram_bit_pj},
        {"a_spad_byte", t.a_spad_byte_um2},
        {"a_glb_byte", t.a_glb_byte_um2},
        {"p_leak_density", t.p_leak_mw_per_mm2},
        {"overhead_factor", t.overhead_factor},
    };
    return j.dump(2) + "\n";
}

CostTable default_cost_table() {
    return parse_cost_table(bundled::kCostTableJson);
}

std::string default_cost_table_digest() {
    return digest_string(bundled::kCostTableJson);
}

}  // namespace quarry
