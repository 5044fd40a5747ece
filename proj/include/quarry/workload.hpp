#ifndef QUARRY_WORKLOAD_HPP
#define QUARRY_WORKLOAD_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace quarry {

enum class LayerKind { Conv, Fc };

std::string layer_kind_name(LayerKind kind);
LayerKind parse_layer_kind(const std::string& token);

// One compute layer. An FC layer is a 1x1 convolution on a 1x1 spatial grid
// (in_channels = fan-in, out_channels = fan-out), so the whole toolchain sees
// a single layer shape.
struct LayerConfig {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    std::uint64_t batch = 1;
    std::uint64_t in_channels = 1;
    std::uint64_t out_channels = 1;
    std::uint64_t in_height = 1;
    std::uint64_t in_width = 1;
    std::uint64_t filter_height = 1;
    std::uint64_t filter_width = 1;
    std::uint64_t stride = 1;
    std::uint64_t padding = 0;

    std::uint64_t out_height() const;  // floor((H + 2*pad - R) / stride) + 1
    std::uint64_t out_width() const;

    bool operator==(const LayerConfig&) const = default;
};

struct Network {
    std::string name;
    std::vector<LayerConfig> layers;

    bool operator==(const Network&) const = default;
};

// Empty result means the layer is well formed. Violations name the layer and
// the offending field.
std::vector<std::string> validate_layer(const LayerConfig& layer);
std::vector<std::string> validate_network(const Network& net);

// MACs needed for one layer: N*M*C*E*F*R*S.
std::uint64_t layer_macs(const LayerConfig& layer);
std::uint64_t network_macs(const Network& net);

// Parses the JSON network document (strict: unknown keys are an error).
// Throws std::runtime_error with the layer name and offending field on any
// invariant violation.
Network parse_network(const std::string& text);
Network load_network_file(const std::string& path);
std::string network_to_json_text(const Network& net);

// Built-in layer tables for the stock workloads. CIFAR variants use 32x32
// inputs, ImageNet variants 224x224.
Network builtin_network(const std::string& preset);
const std::vector<std::string>& builtin_network_names();
bool is_builtin_network(const std::string& name);

// Resolves either a preset name or a path to a network file.
Network resolve_network(const std::string& preset_or_path);

}  // namespace quarry

#endif
