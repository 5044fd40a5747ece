#include "quarry/workload.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

std::string layer_kind_name(LayerKind kind) {
    return kind == LayerKind::Conv ? "conv" : "fc";
}

LayerKind parse_layer_kind(const std::string& token) {
    if (token == "conv") return LayerKind::Conv;
    if (token == "fc") return LayerKind::Fc;
    throw std::runtime_error("unknown layer kind '" + token + "' (expected conv|fc)");
}

std::uint64_t LayerConfig::out_height() const {
    std::uint64_t padded = in_height + 2 * padding;
    if (padded < filter_height) return 0;
    return (padded - filter_height) / stride + 1;
}

std::uint64_t LayerConfig::out_width() const {
    std::uint64_t padded = in_width + 2 * padding;
    if (padded < filter_width) return 0;
    return (padded - filter_width) / stride + 1;
}

std::vector<std::string> validate_layer(const LayerConfig& layer) {
    std::vector<std::string> v;
    auto bad = [&](const std::string& msg) { v.push_back("layer '" + layer.name + "': " + msg); };

    if (layer.name.empty()) v.push_back("layer has empty name");
    if (layer.batch < 1) bad("batch must be >= 1");
    if (layer.in_channels < 1) bad("in_channels must be >= 1");
    if (layer.out_channels < 1) bad("out_channels must be >= 1");
    if (layer.in_height < 1) bad("in_height must be >= 1");
    if (layer.in_width < 1) bad("in_width must be >= 1");
    if (layer.filter_height < 1) bad("filter_height must be >= 1");
    if (layer.filter_width < 1) bad("filter_width must be >= 1");
    if (layer.stride < 1) bad("stride must be >= 1");

    if (layer.kind == LayerKind::Fc) {
        if (layer.in_height != 1 || layer.in_width != 1)
            bad("FC layer must have H=W=1");
        if (layer.filter_height != 1 || layer.filter_width != 1)
            bad("FC layer must have R=S=1");
        if (layer.stride != 1) bad("FC layer must have stride=1");
        if (layer.padding != 0) bad("FC layer must have padding=0");
    }

    if (layer.stride >= 1 && layer.in_height >= 1 && layer.filter_height >= 1) {
        if (layer.out_height() < 1) bad("output height is < 1 (filter larger than padded input)");
        if (layer.out_width() < 1) bad("output width is < 1 (filter larger than padded input)");
    }
    return v;
}

std::vector<std::string> validate_network(const Network& net) {
    std::vector<std::string> v;
    if (net.layers.empty()) v.push_back("network '" + net.name + "' has no layers");
    std::set<std::string> seen;
    for (const auto& layer : net.layers) {
        auto lv = validate_layer(layer);
        v.insert(v.end(), lv.begin(), lv.end());
        if (!seen.insert(layer.name).second)
            v.push_back("duplicate layer name '" + layer.name + "'");
    }
    return v;
}

std::uint64_t layer_macs(const LayerConfig& layer) {
    return layer.batch * layer.out_channels * layer.in_channels * layer.out_height() *
           layer.out_width() * layer.filter_height * layer.filter_width;
}

std::uint64_t network_macs(const Network& net) {
    std::uint64_t total = 0;
    for (const auto& layer : net.layers) total += layer_macs(layer);
    return total;
}

namespace {

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw std::runtime_error(where + ": field '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key))
            throw std::runtime_error(where + ": unknown key '" + key + "'");
    }
}

LayerConfig layer_from_json(const json& jl) {
    static const std::set<std::string> kKeys = {
        "name", "kind", "batch", "in_channels", "out_channels", "in_height",
        "in_width", "filter_height", "filter_width", "stride", "padding"};
    if (!jl.is_object()) throw std::runtime_error("layer entry must be an object");
    std::string where = jl.contains("name") && jl["name"].is_string()
                            ? "layer '" + jl["name"].get<std::string>() + "'"
                            : "layer";
    check_keys(jl, kKeys, where);

    LayerConfig layer;
    layer.name = jl.at("name").get<std::string>();
    where = "layer '" + layer.name + "'";
    layer.kind = parse_layer_kind(jl.at("kind").get<std::string>());
    if (jl.contains("batch")) layer.batch = get_count(jl, "batch", where);

    layer.in_channels = get_count(jl, "in_channels", where);
    layer.out_channels = get_count(jl, "out_channels", where);

    if (layer.kind == LayerKind::Conv) {
        layer.in_height = get_count(jl, "in_height", where);
        layer.in_width = get_count(jl, "in_width", where);
        layer.filter_height = get_count(jl, "filter_height", where);
        layer.filter_width = get_count(jl, "filter_width", where);
        layer.stride = get_count(jl, "stride", where);
        layer.padding = jl.contains("padding") ? get_count(jl, "padding", where) : 0;
    } else {
        // FC: spatial fields may be omitted; when present they must match the
        // mandated 1x1 shape, which validate_layer enforces.
        if (jl.contains("in_height")) layer.in_height = get_count(jl, "in_height", where);
        if (jl.contains("in_width")) layer.in_width = get_count(jl, "in_width", where);
        if (jl.contains("filter_height")) layer.filter_height = get_count(jl, "filter_height", where);
        if (jl.contains("filter_width")) layer.filter_width = get_count(jl, "filter_width", where);
        if (jl.contains("stride")) layer.stride = get_count(jl, "stride", where);
        if (jl.contains("padding")) layer.padding = get_count(jl, "padding", where);
    }
    return layer;
}

}  // namespace

Network parse_network(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed network document: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("network document must be a JSON object");
    check_keys(j, {"name", "layers"}, "network");

    Network net;
    try {
        net.name = j.at("name").get<std::string>();
        if (!j.at("layers").is_array())
            throw std::runtime_error("network: 'layers' must be an array");
        for (const auto& jl : j["layers"]) net.layers.push_back(layer_from_json(jl));
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed network document: ") + e.what());
    }

    auto violations = validate_network(net);
    if (!violations.empty()) {
        std::ostringstream oss;
        oss << "invalid network:";
        for (const auto& msg : violations) oss << "\n  " << msg;
        throw std::runtime_error(oss.str());
    }
    return net;
}

Network load_network_file(const std::string& path) {
    return parse_network(read_file(path));
}

std::string network_to_json_text(const Network& net) {
    json j;
    j["name"] = net.name;
    j["layers"] = json::array();
    for (const auto& layer : net.layers) {
        json jl;
        jl["name"] = layer.name;
        jl["kind"] = layer_kind_name(layer.kind);
        jl["batch"] = layer.batch;
        jl["in_channels"] = layer.in_channels;
        jl["out_channels"] = layer.out_channels;
        jl["in_height"] = layer.in_height;
        jl["in_width"] = layer.in_width;
        jl["filter_height"] = layer.filter_height;
        jl["filter_width"] = layer.filter_width;
        jl["stride"] = layer.stride;
        jl["padding"] = layer.padding;
        j["layers"].push_back(std::move(jl));
    }
    return j.dump(2) + "\n";
}

Network resolve_network(const std::string& preset_or_path) {
    if (is_builtin_network(preset_or_path)) return builtin_network(preset_or_path);
    return load_network_file(preset_or_path);
}

}  // namespace quarry
