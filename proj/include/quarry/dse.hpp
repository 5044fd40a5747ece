#ifndef QUARRY_DSE_HPP
#define QUARRY_DSE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quarry/arch.hpp"
#include "quarry/costmodel.hpp"
#include "quarry/workload.hpp"

namespace quarry {

struct SpadPreset {
    std::string name;
    std::uint64_t ifmap_bytes = 1;
    std::uint64_t filter_bytes = 1;
    std::uint64_t psum_bytes = 1;

    bool operator==(const SpadPreset&) const = default;
};

// Value lists for every AcceleratorConfig field. When spad_presets is
// non-empty it replaces the three independent spad lists (the bundled grid
// pairs them to keep the product tractable).
struct GridSpec {
    std::vector<std::uint64_t> pe_rows;
    std::vector<std::uint64_t> pe_cols;
    std::vector<std::uint64_t> glb_bytes;
    std::vector<std::uint64_t> ifmap_spad_bytes;
    std::vector<std::uint64_t> filter_spad_bytes;
    std::vector<std::uint64_t> psum_spad_bytes;
    std::vector<SpadPreset> spad_presets;
    std::vector<std::uint64_t> dram_bw;
    std::vector<double> clock_hz;
    std::vector<PEType> pe_types;
    std::uint64_t max_points = 1'000'000;

    std::uint64_t point_count() const;
};

std::vector<std::string> validate_grid(const GridSpec& grid);
GridSpec parse_grid(const std::string& text);
GridSpec load_grid_file(const std::string& path);
GridSpec default_grid();

// Full Cartesian product in lexicographic order of the field lists
// (pe_rows outermost ... pe_type innermost). Throws when the product
// exceeds grid.max_points.
std::vector<AcceleratorConfig> enumerate_space(const GridSpec& grid);

struct DesignPoint {
    AcceleratorConfig cfg;
    bool feasible = false;
    std::vector<std::string> violations;
    std::optional<PPAResult> ppa;
    std::optional<double> norm_perf_per_area;
    std::optional<double> norm_energy;
    std::optional<double> accuracy;

    bool operator==(const DesignPoint&) const = default;
};

struct ExploreResult {
    std::vector<DesignPoint> points;           // enumeration order
    std::optional<std::size_t> baseline;       // index of the INT16 normalization baseline
    std::optional<std::string> normalization_error;
};

// Evaluates every enumerated config against the workload. Infeasible configs
// are kept (feasible=false, no PPA). Normalization against the best-INT16
// baseline is attempted; if no feasible INT16 point exists the error is
// recorded and raw values are still returned.
ExploreResult explore(const Network& net, const GridSpec& grid, const CostTable& table);

// Baseline: feasible INT16 point with maximal perf_per_area (ties: smaller
// area, then enumeration order). Fills normalized fields of every feasible
// point; returns the baseline index. Throws when no feasible INT16 exists.
std::size_t normalize(std::vector<DesignPoint>& points);

struct Objective {
    std::string metric;   // perf_per_area | energy | latency | area | power |
                          // throughput | norm_perf_per_area | norm_energy | top1
    bool maximize = true;
};

std::vector<Objective> parse_objectives(const std::string& spec);

// Metric accessor used by pareto_front; empty when the metric is missing on
// the point (infeasible, or normalization/accuracy not attached).
std::optional<double> point_metric(const DesignPoint& p, const std::string& metric);

// Exactly the non-dominated subset of the feasible points: p dominates q iff
// p is >= on every maximize-objective, <= on every minimize-objective, and
// strictly better on at least one. Duplicates are mutually non-dominating and
// both survive. Output sorted best-first by the first objective. Throws when
// a requested metric is absent from any feasible point.
std::vector<DesignPoint> pareto_front(const std::vector<DesignPoint>& points,
                                      const std::vector<Objective>& objectives);

// (network name, PE type) -> top-1 accuracy fraction in [0,1].
struct AccuracyTable {
    std::map<std::pair<std::string, PEType>, double> top1;

    bool operator==(const AccuracyTable&) const = default;
};

AccuracyTable parse_accuracy_csv(const std::string& text);
AccuracyTable load_accuracy_file(const std::string& path);

// Attaches accuracy to every feasible point; throws naming the missing
// (network, pe_type) pair if the table has no entry for it.
std::vector<DesignPoint> join_accuracy(std::vector<DesignPoint> points,
                                       const AccuracyTable& acc,
                                       const std::string& network);

}  // namespace quarry

#endif
