#include "quarry/arch.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

std::uint64_t act_bits(PEType t) {
    switch (t) {
        case PEType::FP32: return 32;
        case PEType::INT16: return 16;
        case PEType::LIGHT1: return 8;
        case PEType::LIGHT2: return 8;
    }
    throw std::logic_error("bad PEType");
}

std::uint64_t wgt_bits(PEType t) {
    switch (t) {
        case PEType::FP32: return 32;
        case PEType::INT16: return 16;
        case PEType::LIGHT1: return 4;
        case PEType::LIGHT2: return 8;
    }
    throw std::logic_error("bad PEType");
}

// 32-bit accumulators for every type: overflow headroom for the integer
// types, native width for FP32.
std::uint64_t psum_bits(PEType) { return 32; }

std::string pe_type_name(PEType t) {
    switch (t) {
        case PEType::FP32: return "FP32";
        case PEType::INT16: return "INT16";
        case PEType::LIGHT1: return "LIGHT1";
        case PEType::LIGHT2: return "LIGHT2";
    }
    throw std::logic_error("bad PEType");
}

PEType parse_pe_type(const std::string& token) {
    for (PEType t : kAllPETypes)
        if (token == pe_type_name(t)) return t;
    throw std::runtime_error("unknown PE type '" + token +
                             "' (expected FP32|INT16|LIGHT1|LIGHT2)");
}

std::uint64_t spad_capacity_entries(std::uint64_t spad_bytes, std::uint64_t entry_bits) {
    if (spad_bytes < 1 || entry_bits < 1)
        throw std::invalid_argument("spad_capacity_entries: bytes and bits must be >= 1");
    return spad_bytes * 8 / entry_bits;
}

std::vector<std::string> validate_config(const AcceleratorConfig& cfg) {
    std::vector<std::string> v;
    if (cfg.pe_rows < 1) v.push_back("pe_rows must be >= 1");
    if (cfg.pe_cols < 1) v.push_back("pe_cols must be >= 1");
    if (cfg.glb_bytes < 1) v.push_back("glb_bytes must be >= 1");
    if (cfg.ifmap_spad_bytes < 1) v.push_back("ifmap_spad_bytes must be >= 1");
    if (cfg.filter_spad_bytes < 1) v.push_back("filter_spad_bytes must be >= 1");
    if (cfg.psum_spad_bytes < 1) v.push_back("psum_spad_bytes must be >= 1");
    if (cfg.dram_bw < 1) v.push_back("dram_bw must be > 0");
    if (!(cfg.clock_hz > 0)) v.push_back("clock_hz must be > 0");
    return v;
}

std::vector<std::string> validate_config(const AcceleratorConfig& cfg, const Network& net) {
    std::vector<std::string> v = validate_config(cfg);
    if (!v.empty()) return v;

    std::uint64_t ifmap_cap = spad_capacity_entries(cfg.ifmap_spad_bytes, act_bits(cfg.pe_type));
    std::uint64_t filter_cap = spad_capacity_entries(cfg.filter_spad_bytes, wgt_bits(cfg.pe_type));
    std::uint64_t psum_cap = spad_capacity_entries(cfg.psum_spad_bytes, psum_bits(cfg.pe_type));

    for (const auto& layer : net.layers) {
        std::uint64_t padded_row = layer.in_width + 2 * layer.padding;
        if (filter_cap < layer.filter_width) {
            std::ostringstream oss;
            oss << "layer '" << layer.name << "': filter spad holds " << filter_cap
                << " weights, needs " << layer.filter_width;
            v.push_back(oss.str());
        }
        if (ifmap_cap < padded_row) {
            std::ostringstream oss;
            oss << "layer '" << layer.name << "': ifmap spad holds " << ifmap_cap
                << " entries, needs one padded row (" << padded_row << ")";
            v.push_back(oss.str());
        }
        if (psum_cap < layer.out_width()) {
            std::ostringstream oss;
            oss << "layer '" << layer.name << "': psum spad holds " << psum_cap
                << " entries, needs one output row (" << layer.out_width() << ")";
            v.push_back(oss.str());
        }
    }
    return v;
}

namespace {

std::uint64_t get_count(const json& obj, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw std::runtime_error("arch: field '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

}  // namespace

AcceleratorConfig parse_arch(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed arch document: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("arch document must be a JSON object");

    static const std::set<std::string> kKeys = {
        "pe_rows", "pe_cols", "glb_bytes", "ifmap_spad_bytes", "filter_spad_bytes",
        "psum_spad_bytes", "dram_bw", "clock_hz", "pe_type"};
    for (const auto& [key, _] : j.items())
        if (!kKeys.contains(key)) throw std::runtime_error("arch: unknown key '" + key + "'");

    AcceleratorConfig cfg;
    try {
        cfg.pe_rows = get_count(j, "pe_rows");
        cfg.pe_cols = get_count(j, "pe_cols");
        cfg.glb_bytes = get_count(j, "glb_bytes");
        cfg.ifmap_spad_bytes = get_count(j, "ifmap_spad_bytes");
        cfg.filter_spad_bytes = get_count(j, "filter_spad_bytes");
        cfg.psum_spad_bytes = get_count(j, "psum_spad_bytes");
        cfg.dram_bw = get_count(j, "dram_bw");
        cfg.clock_hz = j.at("clock_hz").get<double>();
        cfg.pe_type = parse_pe_type(j.at("pe_type").get<std::string>());
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed arch document: ") + e.what());
    }
    return cfg;
}

AcceleratorConfig load_arch_file(const std::string& path) {
    return parse_arch(read_file(path));
}

std::string arch_to_json_text(const AcceleratorConfig& cfg) {
    json j;
    j["pe_rows"] = cfg.pe_rows;
    j["pe_cols"] = cfg.pe_cols;
    j["glb_bytes"] = cfg.glb_bytes;
    j["ifmap_spad_bytes"] = cfg.ifmap_spad_bytes;
    j["filter_spad_bytes"] = cfg.filter_spad_bytes;
    j["psum_spad_bytes"] = cfg.psum_spad_bytes;
    j["dram_bw"] = cfg.dram_bw;
    j["clock_hz"] = cfg.clock_hz;
    j["pe_type"] = pe_type_name(cfg.pe_type);
    return j.dump(2) + "\n";
}

}  // namespace quarry
