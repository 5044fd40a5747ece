#include <doctest.h>

#include <stdexcept>

#include <random>
#include <set>

#include "quarry/dse.hpp"

using namespace quarry;

namespace {

GridSpec tiny_grid() {
    GridSpec g;
    g.pe_rows = {4, 8};
    g.pe_cols = {4, 8, 16};
    g.glb_bytes = {65536};
    g.ifmap_spad_bytes = {256};
    g.filter_spad_bytes = {32};
    g.psum_spad_bytes = {128};
    g.dram_bw = {16};
    g.clock_hz = {200e6};
    g.pe_types = {PEType::INT16};
    return g;
}

DesignPoint synthetic_point(double ppa, double energy, double latency = 1.0,
                            PEType t = PEType::INT16) {
    DesignPoint p;
    p.cfg.pe_type = t;
    p.feasible = true;
    PPAResult r;
    r.perf_per_area = ppa;
    r.energy_j = energy;
    r.latency_s = latency;
    r.area_mm2 = 1.0;
    r.avg_power_w = energy / latency;
    r.throughput_macs_s = ppa;
    r.mac_j = energy;
    p.ppa = r;
    return p;
}

// All-pairs dominance oracle, independent of the production sweep.
std::set<std::size_t> brute_force_front(const std::vector<DesignPoint>& points,
                                        const std::vector<Objective>& objectives) {
    auto better_eq = [&](const DesignPoint& a, const DesignPoint& b) {
        for (const auto& obj : objectives) {
            double va = *point_metric(a, obj.metric);
            double vb = *point_metric(b, obj.metric);
            if (obj.maximize ? va < vb : va > vb) return false;
        }
        return true;
    };
    auto strictly_better_somewhere = [&](const DesignPoint& a, const DesignPoint& b) {
        for (const auto& obj : objectives) {
            double va = *point_metric(a, obj.metric);
            double vb = *point_metric(b, obj.metric);
            if (obj.maximize ? va > vb : va < vb) return true;
        }
        return false;
    };
    std::set<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].feasible) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j || !points[j].feasible) continue;
            dominated = better_eq(points[j], points[i]) &&
                        strictly_better_somewhere(points[j], points[i]);
        }
        if (!dominated) front.insert(i);
    }
    return front;
}

// Points carry synthetic unique (ppa, energy) values, so front identity can
// be matched through the metric pair.
std::set<std::size_t> front_as_indices(const std::vector<DesignPoint>& all,
                                       const std::vector<DesignPoint>& front) {
    std::set<std::size_t> out;
    for (const auto& f : front) {
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (all[i].feasible && all[i].ppa->perf_per_area == f.ppa->perf_per_area &&
                all[i].ppa->energy_j == f.ppa->energy_j && all[i].ppa->latency_s == f.ppa->latency_s)
                out.insert(i);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("enumerate_space: product counts and order") {
    GridSpec g = tiny_grid();
    auto configs = enumerate_space(g);
    REQUIRE(configs.size() == 6);
    // pe_rows outermost, pe_cols next.
    CHECK(configs[0].pe_rows == 4);
    CHECK(configs[0].pe_cols == 4);
    CHECK(configs[1].pe_cols == 8);
    CHECK(configs[2].pe_cols == 16);
    CHECK(configs[3].pe_rows == 8);

    GridSpec single = tiny_grid();
    single.pe_rows = {8};
    single.pe_cols = {8};
    CHECK(enumerate_space(single).size() == 1);
}

TEST_CASE("enumerate_space: cap exceeded names the cap") {
    GridSpec g = tiny_grid();
    g.max_points = 5;
    CHECK_THROWS_WITH_AS(enumerate_space(g), doctest::Contains("cap"), std::invalid_argument);
}

TEST_CASE("explore: single feasible INT16 config normalizes to itself") {
    GridSpec g = tiny_grid();
    g.pe_rows = {8};
    g.pe_cols = {8};
    ExploreResult res = explore(builtin_network("resnet20"), g, default_cost_table());
    REQUIRE(res.points.size() == 1);
    REQUIRE(res.points[0].feasible);
    CHECK(!res.normalization_error);
    CHECK(res.baseline == 0);
    CHECK(*res.points[0].norm_perf_per_area == 1.0);
    CHECK(*res.points[0].norm_energy == 1.0);
}

TEST_CASE("explore: no feasible INT16 point reports the normalization error") {
    GridSpec g = tiny_grid();
    g.pe_types = {PEType::LIGHT1};
    ExploreResult res = explore(builtin_network("resnet20"), g, default_cost_table());
    CHECK(res.normalization_error);
    CHECK(!res.points.empty());
    for (const auto& p : res.points) {
        CHECK(p.feasible);
        CHECK(p.ppa);
        CHECK(!p.norm_perf_per_area);
    }
}

TEST_CASE("explore marks infeasible configs and keeps them in order") {
    GridSpec g = tiny_grid();
    g.ifmap_spad_bytes = {16};  // too small for a 34-entry padded row at INT16
    ExploreResult res = explore(builtin_network("resnet20"), g, default_cost_table());
    CHECK(res.normalization_error);
    for (const auto& p : res.points) {
        CHECK(!p.feasible);
        CHECK(!p.ppa);
        CHECK(!p.violations.empty());
    }
}

TEST_CASE("normalize: baseline selection and ratios") {
    std::vector<DesignPoint> pts;
    pts.push_back(synthetic_point(2.0, 4.0));
    pts.push_back(synthetic_point(8.0, 2.0));            // best INT16 perf/area
    pts.push_back(synthetic_point(8.0, 2.0));            // duplicate ppa, equal area -> first wins
    pts.push_back(synthetic_point(16.0, 1.0, 1.0, PEType::LIGHT1));
    std::size_t baseline = normalize(pts);
    CHECK(baseline == 1);
    CHECK(*pts[1].norm_perf_per_area == 1.0);
    CHECK(*pts[1].norm_energy == 1.0);
    CHECK(*pts[0].norm_perf_per_area == doctest::Approx(0.25));
    CHECK(*pts[0].norm_energy == doctest::Approx(2.0));
    CHECK(*pts[3].norm_energy == doctest::Approx(0.5));  // half the baseline energy
}

TEST_CASE("normalize: ties broken toward smaller area") {
    std::vector<DesignPoint> pts;
    pts.push_back(synthetic_point(8.0, 2.0));
    pts.push_back(synthetic_point(8.0, 2.0));
    pts[0].ppa->area_mm2 = 2.0;
    pts[1].ppa->area_mm2 = 1.0;
    CHECK(normalize(pts) == 1);

    std::vector<DesignPoint> none;
    none.push_back(synthetic_point(1.0, 1.0, 1.0, PEType::LIGHT1));
    CHECK_THROWS_AS(normalize(none), std::runtime_error);
}

TEST_CASE("normalization is invariant under a common energy rescale") {
    std::mt19937_64 rng(0xee);
    std::vector<DesignPoint> pts;
    for (int i = 0; i < 50; ++i) {
        double ppa = 1.0 + static_cast<double>(rng() % 1000);
        double e = 1.0 + static_cast<double>(rng() % 1000);
        pts.push_back(synthetic_point(ppa, e, 1.0, i % 2 ? PEType::INT16 : PEType::LIGHT2));
    }
    std::vector<DesignPoint> scaled = pts;
    for (auto& p : scaled) p.ppa->energy_j *= 7.25;

    CHECK(normalize(pts) == normalize(scaled));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(*pts[i].norm_energy == doctest::Approx(*scaled[i].norm_energy).epsilon(1e-12));
        CHECK(*pts[i].norm_perf_per_area == *scaled[i].norm_perf_per_area);
    }
}

TEST_CASE("pareto_front: three-point example") {
    std::vector<DesignPoint> pts;
    pts.push_back(synthetic_point(1.0, 1.0));
    pts.push_back(synthetic_point(2.0, 2.0));
    pts.push_back(synthetic_point(1.5, 0.5));
    auto objectives = parse_objectives("perf_per_area:max,energy:min");
    auto front = pareto_front(pts, objectives);
    REQUIRE(front.size() == 2);
    // Sorted best-first by the first objective.
    CHECK(front[0].ppa->perf_per_area == 2.0);
    CHECK(front[1].ppa->perf_per_area == 1.5);
}

TEST_CASE("pareto_front: single point and exact duplicates") {
    auto objectives = parse_objectives("perf_per_area:max,energy:min");
    std::vector<DesignPoint> one{synthetic_point(1.0, 1.0)};
    CHECK(pareto_front(one, objectives).size() == 1);

    std::vector<DesignPoint> dup{synthetic_point(1.0, 1.0), synthetic_point(1.0, 1.0)};
    CHECK(pareto_front(dup, objectives).size() == 2);  // neither strictly better
}

TEST_CASE("pareto_front equals the brute-force dominance oracle") {
    std::mt19937_64 rng(0x9a);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + rng() % 200;
        std::vector<DesignPoint> pts;
        for (std::size_t i = 0; i < n; ++i) {
            // Small value range forces plenty of exact ties and duplicates.
            double ppa = static_cast<double>(rng() % 12);
            double e = static_cast<double>(rng() % 12);
            double lat = static_cast<double>(rng() % 12);
            pts.push_back(synthetic_point(ppa, e, lat));
        }
        std::vector<Objective> objectives =
            trial % 2 ? parse_objectives("perf_per_area:max,energy:min,latency:min")
                      : parse_objectives("perf_per_area:max,energy:min");
        auto front = pareto_front(pts, objectives);
        CHECK(front_as_indices(pts, front) == brute_force_front(pts, objectives));
    }
}

TEST_CASE("pareto_front: front members are mutually non-dominated, others dominated") {
    std::mt19937_64 rng(0x9b);
    std::vector<DesignPoint> pts;
    for (int i = 0; i < 120; ++i)
        pts.push_back(synthetic_point(static_cast<double>(rng() % 40),
                                      static_cast<double>(rng() % 40)));
    auto objectives = parse_objectives("perf_per_area:max,energy:min");
    auto front_idx = brute_force_front(pts, objectives);
    auto front = pareto_front(pts, objectives);
    CHECK(front.size() == front_idx.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool on_front = front_idx.contains(i);
        bool dominated = false;
        for (std::size_t j : front_idx) {
            if (i == j) continue;
            bool beq = pts[j].ppa->perf_per_area >= pts[i].ppa->perf_per_area &&
                       pts[j].ppa->energy_j <= pts[i].ppa->energy_j;
            bool strict = pts[j].ppa->perf_per_area > pts[i].ppa->perf_per_area ||
                          pts[j].ppa->energy_j < pts[i].ppa->energy_j;
            dominated |= beq && strict;
        }
        if (on_front)
            CHECK(!dominated);
        else
            CHECK(dominated);
    }
}

TEST_CASE("pareto_front errors: missing metric, no objectives") {
    std::vector<DesignPoint> pts{synthetic_point(1.0, 1.0)};
    CHECK_THROWS_WITH_AS(pareto_front(pts, parse_objectives("top1:max,energy:min")),
                         doctest::Contains("absent"), std::runtime_error);
    CHECK_THROWS_AS(parse_objectives(""), std::runtime_error);
    CHECK_THROWS_AS(parse_objectives("energy:sideways"), std::runtime_error);
    CHECK_THROWS_AS(pareto_front(pts, parse_objectives("volume:min")), std::runtime_error);
}

TEST_CASE("join_accuracy attaches values and names missing pairs") {
    AccuracyTable acc;
    acc.top1[{"net", PEType::INT16}] = 0.92;
    std::vector<DesignPoint> pts{synthetic_point(1.0, 1.0)};
    auto joined = join_accuracy(pts, acc, "net");
    CHECK(*joined[0].accuracy == 0.92);

    std::vector<DesignPoint> light{synthetic_point(1.0, 1.0, 1.0, PEType::LIGHT1)};
    CHECK_THROWS_WITH_AS(join_accuracy(light, acc, "net"), doctest::Contains("(net, LIGHT1)"),
                         std::runtime_error);

    std::vector<DesignPoint> empty;
    CHECK(join_accuracy(empty, acc, "net").empty());
}

TEST_CASE("accuracy CSV parsing") {
    AccuracyTable acc = parse_accuracy_csv("network,pe_type,top1\nresnet20,INT16,0.92\n");
    CHECK(acc.top1.at({"resnet20", PEType::INT16}) == 0.92);
    CHECK_THROWS_AS(parse_accuracy_csv("bogus header\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_accuracy_csv("network,pe_type,top1\nn,INT16,1.5\n"), std::runtime_error);
}

TEST_CASE("grid file round trip and default grid") {
    GridSpec g = default_grid();
    CHECK(validate_grid(g).empty());
    CHECK(g.pe_types.size() == 4);
    CHECK(g.spad_presets.size() == 3);
    CHECK(g.point_count() == 4 * 4 * 4 * 3 * 3 * 1 * 4);

    CHECK_THROWS_AS(parse_grid(R"({"pe_rows": []})"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_grid(R"({"pe_rows": [1], "wat": 2})"),
                         doctest::Contains("unknown key"), std::runtime_error);
}

TEST_CASE("explore is deterministic across repeated runs") {
    GridSpec g = tiny_grid();
    g.pe_types = {PEType::INT16, PEType::LIGHT1};
    Network net = builtin_network("resnet20");
    CostTable table = default_cost_table();
    ExploreResult a = explore(net, g, table);
    ExploreResult b = explore(net, g, table);
    REQUIRE(a.points.size() == b.points.size());
    CHECK(a.points == b.points);
    CHECK(a.baseline == b.baseline);
}
