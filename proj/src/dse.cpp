#include "quarry/dse.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "quarry/bundled_data.hpp"
#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

std::uint64_t GridSpec::point_count() const {
    auto mul = [](std::uint64_t acc, std::size_t n) { return acc * static_cast<std::uint64_t>(n); };
    std::uint64_t spads = spad_presets.empty()
                              ? static_cast<std::uint64_t>(ifmap_spad_bytes.size()) *
                                    filter_spad_bytes.size() * psum_spad_bytes.size()
                              : spad_presets.size();
    std::uint64_t count = 1;
    count = mul(count, pe_rows.size());
    count = mul(count, pe_cols.size());
    count = mul(count, glb_bytes.size());
    count *= spads;
    count = mul(count, dram_bw.size());
    count = mul(count, clock_hz.size());
    count = mul(count, pe_types.size());
    return count;
}

std::vector<std::string> validate_grid(const GridSpec& grid) {
    std::vector<std::string> v;
    auto nonempty = [&](std::size_t n, const std::string& name) {
        if (n == 0) v.push_back("grid: '" + name + "' list is empty");
    };
    nonempty(grid.pe_rows.size(), "pe_rows");
    nonempty(grid.pe_cols.size(), "pe_cols");
    nonempty(grid.glb_bytes.size(), "glb_bytes");
    if (grid.spad_presets.empty()) {
        nonempty(grid.ifmap_spad_bytes.size(), "ifmap_spad_bytes");
        nonempty(grid.filter_spad_bytes.size(), "filter_spad_bytes");
        nonempty(grid.psum_spad_bytes.size(), "psum_spad_bytes");
    }
    nonempty(grid.dram_bw.size(), "dram_bw");
    nonempty(grid.clock_hz.size(), "clock_hz");
    nonempty(grid.pe_types.size(), "pe_types");
    if (grid.max_points < 1) v.push_back("grid: max_points must be >= 1");
    if (v.empty() && grid.point_count() > grid.max_points) {
        std::ostringstream oss;
        oss << "grid: Cartesian product has " << grid.point_count()
            << " points, exceeding the cap of " << grid.max_points;
        v.push_back(oss.str());
    }
    return v;
}

std::vector<AcceleratorConfig> enumerate_space(const GridSpec& grid) {
    auto v = validate_grid(grid);
    if (!v.empty()) {
        std::ostringstream oss;
        oss << "invalid grid:";
        for (const auto& msg : v) oss << "\n  " << msg;
        throw std::invalid_argument(oss.str());
    }

    std::vector<SpadPreset> spads;
    if (!grid.spad_presets.empty()) {
        spads = grid.spad_presets;
    } else {
        for (std::uint64_t i : grid.ifmap_spad_bytes)
            for (std::uint64_t f : grid.filter_spad_bytes)
                for (std::uint64_t p : grid.psum_spad_bytes)
                    spads.push_back(SpadPreset{"", i, f, p});
    }

    std::vector<AcceleratorConfig> out;
    out.reserve(grid.point_count());
    for (std::uint64_t rows : grid.pe_rows)
        for (std::uint64_t cols : grid.pe_cols)
            for (std::uint64_t glb : grid.glb_bytes)
                for (const SpadPreset& sp : spads)
                    for (std::uint64_t bw : grid.dram_bw)
                        for (double clock : grid.clock_hz)
                            for (PEType pt : grid.pe_types) {
                                AcceleratorConfig cfg;
                                cfg.pe_rows = rows;
                                cfg.pe_cols = cols;
                                cfg.glb_bytes = glb;
                                cfg.ifmap_spad_bytes = sp.ifmap_bytes;
                                cfg.filter_spad_bytes = sp.filter_bytes;
                                cfg.psum_spad_bytes = sp.psum_bytes;
                                cfg.dram_bw = bw;
                                cfg.clock_hz = clock;
                                cfg.pe_type = pt;
                                out.push_back(cfg);
                            }
    return out;
}

std::size_t normalize(std::vector<DesignPoint>& points) {
    std::size_t baseline = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!p.feasible || p.cfg.pe_type != PEType::INT16) continue;
        if (baseline == points.size()) {
            baseline = i;
            continue;
        }
        const auto& b = points[baseline];
        if (p.ppa->perf_per_area > b.ppa->perf_per_area ||
            (p.ppa->perf_per_area == b.ppa->perf_per_area && p.ppa->area_mm2 < b.ppa->area_mm2))
            baseline = i;
    }
    if (baseline == points.size())
        throw std::runtime_error(
            "normalization impossible: no feasible INT16 point in the result set");

    const double base_ppa = points[baseline].ppa->perf_per_area;
    const double base_energy = points[baseline].ppa->energy_j;
    for (auto& p : points) {
        if (!p.feasible) continue;
        p.norm_perf_per_area = p.ppa->perf_per_area / base_ppa;
        p.norm_energy = p.ppa->energy_j / base_energy;
    }
    return baseline;
}

namespace {

DesignPoint evaluate_point(const Network& net, const AcceleratorConfig& cfg,
                           const CostTable& table) {
    DesignPoint p;
    p.cfg = cfg;
    p.violations = validate_config(cfg, net);
    p.feasible = p.violations.empty();
    if (p.feasible) p.ppa = evaluate_ppa(net, cfg, table);
    return p;
}

}  // namespace

ExploreResult explore(const Network& net, const GridSpec& grid, const CostTable& table) {
    auto nv = validate_network(net);
    if (!nv.empty()) throw std::invalid_argument("explore: invalid network: " + nv.front());
    auto tv = validate_cost_table(table);
    if (!tv.empty()) throw std::invalid_argument("explore: invalid cost table: " + tv.front());

    const std::vector<AcceleratorConfig> configs = enumerate_space(grid);

    ExploreResult result;
    result.points.resize(configs.size());

    // Independent point evaluations; each task fills its own slice so the
    // output keeps enumeration order no matter how the chunks are scheduled.
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t chunk = std::max<std::size_t>(64, configs.size() / (hw * 4) + 1);
    std::vector<std::future<void>> tasks;
    for (std::size_t lo = 0; lo < configs.size(); lo += chunk) {
        const std::size_t hi = std::min(configs.size(), lo + chunk);
        tasks.push_back(std::async(std::launch::async, [&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i)
                result.points[i] = evaluate_point(net, configs[i], table);
        }));
    }
    for (auto& t : tasks) t.get();

    try {
        result.baseline = normalize(result.points);
    } catch (const std::exception& e) {
        result.normalization_error = e.what();
    }
    return result;
}

std::vector<Objective> parse_objectives(const std::string& spec) {
    std::vector<Objective> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("objective '" + item + "' must be <metric>:max or <metric>:min");
        Objective obj;
        obj.metric = item.substr(0, colon);
        std::string dir = item.substr(colon + 1);
        if (dir == "max")
            obj.maximize = true;
        else if (dir == "min")
            obj.maximize = false;
        else
            throw std::runtime_error("objective direction '" + dir + "' must be max or min");
        out.push_back(obj);
    }
    if (out.empty()) throw std::runtime_error("no objectives given");
    return out;
}

std::optional<double> point_metric(const DesignPoint& p, const std::string& metric) {
    if (metric == "top1") return p.accuracy;
    if (metric == "norm_perf_per_area") return p.norm_perf_per_area;
    if (metric == "norm_energy") return p.norm_energy;
    if (!p.ppa) return std::nullopt;
    if (metric == "perf_per_area") return p.ppa->perf_per_area;
    if (metric == "energy") return p.ppa->energy_j;
    if (metric == "latency") return p.ppa->latency_s;
    if (metric == "area") return p.ppa->area_mm2;
    if (metric == "power") return p.ppa->avg_power_w;
    if (metric == "throughput") return p.ppa->throughput_macs_s;
    throw std::runtime_error("unknown metric '" + metric + "'");
}

std::vector<DesignPoint> pareto_front(const std::vector<DesignPoint>& points,
                                      const std::vector<Objective>& objectives) {
    if (objectives.empty()) throw std::runtime_error("pareto_front: no objectives");

    struct Entry {
        std::size_t index;
        std::vector<double> keys;  // orientation-adjusted: larger is better
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].feasible) continue;
        Entry e;
        e.index = i;
        for (const auto& obj : objectives) {
            auto v = point_metric(points[i], obj.metric);
            if (!v) {
                std::ostringstream oss;
                oss << "metric '" << obj.metric << "' is absent on a feasible point (index " << i
                    << ")";
                throw std::runtime_error(oss.str());
            }
            e.keys.push_back(obj.maximize ? *v : -*v);
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw std::runtime_error("pareto_front: no feasible points");

    // Lexicographic best-first sort: any dominator of a point sorts before
    // it, so one sweep against the kept set suffices.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        for (std::size_t k = 0; k < a.keys.size(); ++k) {
            if (a.keys[k] != b.keys[k]) return a.keys[k] > b.keys[k];
        }
        return a.index < b.index;
    });

    auto dominates = [](const Entry& p, const Entry& q) {
        bool strict = false;
        for (std::size_t k = 0; k < p.keys.size(); ++k) {
            if (p.keys[k] < q.keys[k]) return false;
            if (p.keys[k] > q.keys[k]) strict = true;
        }
        return strict;
    };

    std::vector<const Entry*> kept;
    for (const Entry& e : entries) {
        bool dominated = false;
        for (const Entry* k : kept) {
            if (dominates(*k, e)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(&e);
    }

    std::vector<DesignPoint> front;
    front.reserve(kept.size());
    for (const Entry* e : kept) front.push_back(points[e->index]);
    return front;
}

AccuracyTable parse_accuracy_csv(const std::string& text) {
    AccuracyTable table;
    std::stringstream ss(text);
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (header) {
            if (cells != std::vector<std::string>{"network", "pe_type", "top1"})
                throw std::runtime_error(
                    "accuracy file must start with header 'network,pe_type,top1'");
            header = false;
            continue;
        }
        if (cells.size() != 3) {
            std::ostringstream oss;
            oss << "accuracy file line " << line_no << ": expected 3 columns, got " << cells.size();
            throw std::runtime_error(oss.str());
        }
        PEType pt = parse_pe_type(cells[1]);
        double top1 = std::stod(cells[2]);
        if (!(top1 >= 0.0 && top1 <= 1.0)) {
            std::ostringstream oss;
            oss << "accuracy file line " << line_no << ": top1 " << cells[2]
                << " outside [0,1]";
            throw std::runtime_error(oss.str());
        }
        table.top1[{cells[0], pt}] = top1;
    }
    if (header) throw std::runtime_error("accuracy file is empty");
    return table;
}

AccuracyTable load_accuracy_file(const std::string& path) {
    return parse_accuracy_csv(read_file(path));
}

std::vector<DesignPoint> join_accuracy(std::vector<DesignPoint> points, const AccuracyTable& acc,
                                       const std::string& network) {
    for (auto& p : points) {
        if (!p.feasible) continue;
        auto it = acc.top1.find({network, p.cfg.pe_type});
        if (it == acc.top1.end()) {
            std::ostringstream oss;
            oss << "no accuracy entry for (" << network << ", " << pe_type_name(p.cfg.pe_type)
                << ")";
            throw std::runtime_error(oss.str());
        }
        p.accuracy = it->second;
    }
    return points;
}

namespace {

std::vector<std::uint64_t> get_count_list(const json& j, const std::string& key) {
    std::vector<std::uint64_t> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_unsigned())
            throw std::runtime_error("grid: '" + key + "' entries must be non-negative integers");
        out.push_back(v.get<std::uint64_t>());
    }
    return out;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed grid document: ") + e.what());
    }

    static const std::set<std::string> kKeys = {
        "pe_rows", "pe_cols", "glb_bytes", "ifmap_spad_bytes", "filter_spad_bytes",
        "psum_spad_bytes", "spad_presets", "dram_bw", "clock_hz", "pe_types", "max_points"};
    for (const auto& [key, _] : j.items())
        if (!kKeys.contains(key)) throw std::runtime_error("grid: unknown key '" + key + "'");

    GridSpec grid;
    try {
        grid.pe_rows = get_count_list(j, "pe_rows");
        grid.pe_cols = get_count_list(j, "pe_cols");
        grid.glb_bytes = get_count_list(j, "glb_bytes");
        if (j.contains("spad_presets")) {
            for (const auto& jp : j.at("spad_presets")) {
                SpadPreset sp;
                if (jp.contains("name")) sp.name = jp.at("name").get<std::string>();
                sp.ifmap_bytes = jp.at("ifmap").get<std::uint64_t>();
                sp.filter_bytes = jp.at("filter").get<std::uint64_t>();
                sp.psum_bytes = jp.at("psum").get<std::uint64_t>();
                grid.spad_presets.push_back(sp);
            }
        } else {
            grid.ifmap_spad_bytes = get_count_list(j, "ifmap_spad_bytes");
            grid.filter_spad_bytes = get_count_list(j, "filter_spad_bytes");
            grid.psum_spad_bytes = get_count_list(j, "psum_spad_bytes");
        }
        grid.dram_bw = get_count_list(j, "dram_bw");
        for (const auto& v : j.at("clock_hz")) grid.clock_hz.push_back(v.get<double>());
        for (const auto& v : j.at("pe_types")) grid.pe_types.push_back(parse_pe_type(v.get<std::string>()));
        if (j.contains("max_points")) grid.max_points = j.at("max_points").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed grid document: ") + e.what());
    }

    auto v = validate_grid(grid);
    if (!v.empty()) {
        std::ostringstream oss;
        oss << "invalid grid:";
        for (const auto& msg : v) oss << "\n  " << msg;
        throw std::runtime_error(oss.str());
    }
    return grid;
}

GridSpec load_grid_file(const std::string& path) {
    return parse_grid(read_file(path));
}

GridSpec default_grid() {
    return parse_grid(bundled::kGridJson);
}

}  // namespace quarry
