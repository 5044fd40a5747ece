#include <doctest.h>

#include <stdexcept>

#include "quarry/workload.hpp"

using namespace quarry;

namespace {

// Output-size oracle: count the positions where the filter fits inside the
// padded input, one by one.
std::uint64_t enumerate_outputs(std::uint64_t in, std::uint64_t filter, std::uint64_t stride,
                                std::uint64_t pad) {
    std::uint64_t padded = in + 2 * pad;
    std::uint64_t count = 0;
    for (std::uint64_t start = 0; start + filter <= padded; start += stride) ++count;
    return count;
}

LayerConfig conv(std::uint64_t c, std::uint64_t m, std::uint64_t hw, std::uint64_t rs,
                 std::uint64_t stride, std::uint64_t pad) {
    LayerConfig l;
    l.name = "conv";
    l.in_channels = c;
    l.out_channels = m;
    l.in_height = l.in_width = hw;
    l.filter_height = l.filter_width = rs;
    l.stride = stride;
    l.padding = pad;
    return l;
}

}  // namespace

TEST_CASE("output dims match exhaustive enumeration") {
    for (std::uint64_t h = 1; h <= 8; ++h)
        for (std::uint64_t pad = 0; pad <= 2; ++pad)
            for (std::uint64_t r = 1; r <= h + 2 * pad && r <= 5; ++r)
                for (std::uint64_t stride = 1; stride <= 2; ++stride) {
                    LayerConfig l = conv(1, 1, h, 1, stride, pad);
                    l.filter_height = l.filter_width = r;
                    CAPTURE(h);
                    CAPTURE(r);
                    CAPTURE(stride);
                    CAPTURE(pad);
                    CHECK(l.out_height() == enumerate_outputs(h, r, stride, pad));
                    CHECK(l.out_width() == enumerate_outputs(h, r, stride, pad));
                }
}

TEST_CASE("layer_macs identity and transcription checks") {
    LayerConfig unit = conv(1, 1, 1, 1, 1, 0);
    CHECK(layer_macs(unit) == 1);

    LayerConfig r20_first = conv(3, 16, 32, 3, 1, 1);
    CHECK(layer_macs(r20_first) == 442368);  // 32*32*3*3*3*16

    LayerConfig vgg_first = conv(3, 64, 224, 3, 1, 1);
    CHECK(layer_macs(vgg_first) == 86704128);  // 224*224*3*3*3*64
}

TEST_CASE("parse_network echoes fields and computes output dims") {
    const char* doc = R"({
      "name": "toy",
      "layers": [
        {"name": "c1", "kind": "conv", "batch": 1, "in_channels": 3, "out_channels": 16,
         "in_height": 32, "in_width": 32, "filter_height": 3, "filter_width": 3,
         "stride": 1, "padding": 1}
      ]
    })";
    Network net = parse_network(doc);
    REQUIRE(net.layers.size() == 1);
    CHECK(net.layers[0].in_channels == 3);
    CHECK(net.layers[0].out_channels == 16);
    CHECK(net.layers[0].out_height() == 32);
    CHECK(net.layers[0].out_width() == 32);
}

TEST_CASE("parse_network rejects FC with spatial filters") {
    const char* doc = R"({
      "name": "bad",
      "layers": [
        {"name": "fc", "kind": "fc", "in_channels": 64, "out_channels": 10,
         "filter_height": 3, "filter_width": 3}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_network(doc),
                         doctest::Contains("FC layer must have R=S=1"), std::runtime_error);
}

TEST_CASE("parse_network rejects unknown keys and malformed documents") {
    CHECK_THROWS_AS(parse_network("not json"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_network(R"({"name":"x","layers":[],"extra":1})"),
                         doctest::Contains("unknown key"), std::runtime_error);
    const char* unknown_layer_key = R"({
      "name": "x",
      "layers": [{"name": "c", "kind": "conv", "in_channels": 1, "out_channels": 1,
                  "in_height": 4, "in_width": 4, "filter_height": 1, "filter_width": 1,
                  "stride": 1, "padding": 0, "mystery": 2}]
    })";
    CHECK_THROWS_WITH_AS(parse_network(unknown_layer_key), doctest::Contains("mystery"),
                         std::runtime_error);
    CHECK_THROWS_AS(parse_network(R"({"name":"e","layers":[]})"), std::runtime_error);
}

TEST_CASE("parse_network: full VGG-16 document round trip") {
    Network vgg = builtin_network("vgg16-imagenet");
    CHECK(vgg.layers.size() == 16);  // 13 conv + 3 fc
    Network reparsed = parse_network(network_to_json_text(vgg));
    CHECK(reparsed == vgg);
}

TEST_CASE("builtin networks have the published shapes") {
    Network r20 = builtin_network("resnet20");
    CHECK(r20.layers.size() == 21);
    CHECK(r20.layers[0].in_channels == 3);
    CHECK(r20.layers[0].out_channels == 16);
    CHECK(r20.layers[0].filter_height == 3);
    CHECK(r20.layers[0].in_height == 32);

    Network vgg = builtin_network("vgg16-imagenet");
    CHECK(vgg.layers[0].in_channels == 3);
    CHECK(vgg.layers[0].out_channels == 64);
    CHECK(vgg.layers[0].in_height == 224);
    CHECK(vgg.layers[0].padding == 1);

    CHECK(builtin_network("resnet56").layers.size() == 57);
    CHECK(builtin_network("resnet34").layers.size() == 36);
    CHECK(builtin_network("resnet50").layers.size() == 53);
    CHECK(builtin_network("vgg16-cifar").layers.size() == 16);

    for (const auto& name : builtin_network_names()) {
        Network net = builtin_network(name);
        CHECK(validate_network(net).empty());
        CHECK(net.name == name);
    }
}

TEST_CASE("builtin_network rejects unknown presets") {
    CHECK_THROWS_WITH_AS(builtin_network("alexnet"), doctest::Contains("unknown network preset"),
                         std::runtime_error);
}

TEST_CASE("batch defaults to 1 and scales MACs linearly") {
    LayerConfig l = conv(2, 4, 8, 3, 1, 1);
    CHECK(l.batch == 1);
    std::uint64_t one = layer_macs(l);
    l.batch = 3;
    CHECK(layer_macs(l) == 3 * one);
}
