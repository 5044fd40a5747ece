#include <doctest.h>

#include <stdexcept>

#include "quarry/arch.hpp"

using namespace quarry;

namespace {

AcceleratorConfig valid_cfg() {
    AcceleratorConfig cfg;
    cfg.pe_rows = 4;
    cfg.pe_cols = 4;
    cfg.glb_bytes = 65536;
    cfg.ifmap_spad_bytes = 256;
    cfg.filter_spad_bytes = 32;
    cfg.psum_spad_bytes = 128;
    cfg.dram_bw = 16;
    cfg.clock_hz = 200e6;
    cfg.pe_type = PEType::INT16;
    return cfg;
}

Network single_layer_net(std::uint64_t w, std::uint64_t s, std::uint64_t pad) {
    LayerConfig l;
    l.name = "l0";
    l.in_channels = 1;
    l.out_channels = 1;
    l.in_height = l.in_width = w;
    l.filter_height = l.filter_width = s;
    l.stride = 1;
    l.padding = pad;
    return Network{"n", {l}};
}

}  // namespace

TEST_CASE("PE type bit widths") {
    CHECK(act_bits(PEType::FP32) == 32);
    CHECK(wgt_bits(PEType::FP32) == 32);
    CHECK(act_bits(PEType::INT16) == 16);
    CHECK(wgt_bits(PEType::INT16) == 16);
    CHECK(act_bits(PEType::LIGHT1) == 8);
    CHECK(wgt_bits(PEType::LIGHT1) == 4);
    CHECK(act_bits(PEType::LIGHT2) == 8);
    CHECK(wgt_bits(PEType::LIGHT2) == 8);
    for (PEType t : kAllPETypes) {
        CHECK(psum_bits(t) == 32);
        CHECK(parse_pe_type(pe_type_name(t)) == t);
    }
    CHECK_THROWS_AS(parse_pe_type("INT8"), std::runtime_error);
}

TEST_CASE("spad_capacity_entries arithmetic") {
    CHECK(spad_capacity_entries(224, 16) == 112);
    CHECK(spad_capacity_entries(224, 4) == 448);
    CHECK(spad_capacity_entries(1, 32) == 0);
}

TEST_CASE("spad capacity monotonicity and bit-width ratios") {
    for (std::uint64_t bytes = 1; bytes <= 64; ++bytes) {
        for (std::uint64_t bits : {1, 4, 8, 16, 32}) {
            CHECK(spad_capacity_entries(bytes + 1, bits) >= spad_capacity_entries(bytes, bits));
            if (bits > 1)
                CHECK(spad_capacity_entries(bytes, bits - 1) >= spad_capacity_entries(bytes, bits));
        }
        // 4:8:16-bit filter capacities are 4x:2x:1x for a fixed budget; the
        // 16-bit comparison needs an even budget or the floor breaks the ratio.
        CHECK(spad_capacity_entries(bytes, 4) == 2 * spad_capacity_entries(bytes, 8));
        if (bytes % 2 == 0) {
            CHECK(spad_capacity_entries(bytes, 8) == 2 * spad_capacity_entries(bytes, 16));
            CHECK(spad_capacity_entries(bytes, 4) == 4 * spad_capacity_entries(bytes, 16));
        }
    }
}

TEST_CASE("validate_config base invariants") {
    AcceleratorConfig cfg = valid_cfg();
    CHECK(validate_config(cfg).empty());

    cfg.pe_rows = 0;
    auto v = validate_config(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "pe_rows must be >= 1");
}

TEST_CASE("validate_config capacity checks against a network") {
    // S=3 at INT16 needs 3x16 bit = 6 bytes of filter spad.
    AcceleratorConfig cfg = valid_cfg();
    cfg.filter_spad_bytes = 1;
    Network net = single_layer_net(5, 3, 0);
    auto v = validate_config(cfg, net);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("filter spad") != std::string::npos);

    // S=3 at LIGHT1 (4-bit weights) fits in 2 bytes.
    cfg.filter_spad_bytes = 2;
    cfg.pe_type = PEType::LIGHT1;
    CHECK(validate_config(cfg, net).empty());

    // One padded ifmap row: W + 2*pad entries.
    AcceleratorConfig row_cfg = valid_cfg();
    row_cfg.ifmap_spad_bytes = 8;  // holds 4 INT16 entries
    CHECK(!validate_config(row_cfg, single_layer_net(5, 3, 0)).empty());
    row_cfg.ifmap_spad_bytes = 10;  // holds 5
    CHECK(validate_config(row_cfg, single_layer_net(5, 3, 0)).empty());
    // Padding widens the required row.
    CHECK(!validate_config(row_cfg, single_layer_net(5, 3, 1)).empty());
}

TEST_CASE("arch file round trip and errors") {
    AcceleratorConfig cfg = valid_cfg();
    AcceleratorConfig reparsed = parse_arch(arch_to_json_text(cfg));
    CHECK(reparsed == cfg);

    CHECK_THROWS_AS(parse_arch("{"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_arch(R"({"pe_rows": 1})"), doctest::Contains("pe_cols"),
                         std::runtime_error);
    std::string text = arch_to_json_text(cfg);
    text.insert(text.find("\"pe_rows\""), "\"bogus\": 1, ");
    CHECK_THROWS_WITH_AS(parse_arch(text), doctest::Contains("unknown key"), std::runtime_error);
}
