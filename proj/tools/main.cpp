#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quarry/bundled_data.hpp"
#include "quarry/costmodel.hpp"
#include "quarry/dse.hpp"
#include "quarry/regression.hpp"
#include "quarry/report.hpp"
#include "quarry/util.hpp"
#include "quarry/version.hpp"

namespace {

using namespace quarry;

// Exit codes (stable contract):
//   0 success
//   1 parse/validation failure
//   2 infeasible config (evaluate)
//   3 normalization requested but no feasible INT16 point (explore)
//   4 rank-deficient fit with ridge fallback disabled (fit)
//   5 analytical/simulated stats mismatch (oracle)
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoBaseline = 3;
constexpr int kExitRankDeficient = 4;
constexpr int kExitOracleMismatch = 5;

struct TableSource {
    CostTable table;
    std::string text;  // for the input digest
    std::string name;
};

TableSource load_table(const std::string& arg) {
    TableSource src;
    if (arg == "default") {
        src.text = bundled::kCostTableJson;
        src.name = "cost_table(default)";
    } else {
        src.text = read_file(arg);
        src.name = arg;
    }
    src.table = parse_cost_table(src.text);
    return src;
}

struct GridSource {
    GridSpec grid;
    std::string text;
    std::string name;
};

GridSource load_grid(const std::string& arg) {
    GridSource src;
    if (arg == "default") {
        src.text = bundled::kGridJson;
        src.name = "grid(default)";
    } else {
        src.text = read_file(arg);
        src.name = arg;
    }
    src.grid = parse_grid(src.text);
    return src;
}

struct NetworkSource {
    Network net;
    std::string digest_text;
    std::string name;
};

NetworkSource load_net(const std::string& arg) {
    NetworkSource src;
    if (is_builtin_network(arg)) {
        src.net = builtin_network(arg);
        src.digest_text = network_to_json_text(src.net);
        src.name = "network(" + arg + ")";
    } else {
        src.digest_text = read_file(arg);
        src.net = parse_network(src.digest_text);
        src.name = arg;
    }
    return src;
}

int cmd_evaluate(const std::string& net_arg, const std::string& arch_arg,
                 const std::string& table_arg, const std::string& out_path) {
    NetworkSource net;
    std::string arch_text;
    AcceleratorConfig cfg;
    TableSource table;
    try {
        net = load_net(net_arg);
        arch_text = read_file(arch_arg);
        cfg = parse_arch(arch_text);
        table = load_table(table_arg);
        auto base = validate_config(cfg);
        if (!base.empty()) {
            for (const auto& v : base) std::cerr << "error: " << v << "\n";
            return kExitInput;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    auto violations = validate_config(cfg, net.net);
    if (!violations.empty()) {
        std::cerr << "infeasible config for network '" << net.net.name << "':\n";
        for (const auto& v : violations) std::cerr << "  " << v << "\n";
        return kExitInfeasible;
    }

    AccessStats stats = network_stats(net.net, cfg);
    PPAResult ppa = evaluate_ppa(stats, cfg, table.table);

    RunReport report;
    report.version = kVersion;
    report.input_digests = {{net.name, digest_string(net.digest_text)},
                            {arch_arg, digest_string(arch_text)},
                            {table.name, digest_string(table.text)}};
    report.units = required_units("ppa");
    report.payload_kind = "ppa";
    report.payload = ppa_to_json(ppa);
    if (!out_path.empty()) write_report(report, out_path);

    std::cout << "network " << net.net.name << ": " << stats.macs << " MACs, "
              << stats.latency_cycles << " cycles\n"
              << "  latency      " << format_double(ppa.latency_s) << " s\n"
              << "  energy       " << format_double(ppa.energy_j) << " J\n"
              << "  avg power    " << format_double(ppa.avg_power_w) << " W\n"
              << "  area         " << format_double(ppa.area_mm2) << " mm^2\n"
              << "  throughput   " << format_double(ppa.throughput_macs_s) << " MAC/s\n"
              << "  perf/area    " << format_double(ppa.perf_per_area) << " MAC/s/mm^2\n";
    if (!out_path.empty()) std::cout << "report written to " << out_path << "\n";
    return kExitOk;
}

int cmd_explore(const std::string& net_arg, const std::string& grid_arg,
                const std::string& table_arg, bool do_normalize, const std::string& out_path) {
    try {
        NetworkSource net = load_net(net_arg);
        GridSource grid = load_grid(grid_arg);
        TableSource table = load_table(table_arg);

        ExploreResult result = explore(net.net, grid.grid, table.table);
        if (do_normalize && result.normalization_error) {
            std::cerr << "error: " << *result.normalization_error << "\n";
            return kExitNoBaseline;
        }
        if (!do_normalize) {
            for (auto& p : result.points) {
                p.norm_perf_per_area.reset();
                p.norm_energy.reset();
            }
        }
        write_points_csv(result.points, out_path);

        std::size_t feasible = 0;
        for (const auto& p : result.points) feasible += p.feasible ? 1 : 0;
        std::cout << "explored " << result.points.size() << " design points (" << feasible
                  << " feasible) for " << net.net.name << "\n";
        if (do_normalize && result.baseline) {
            const auto& b = result.points[*result.baseline];
            std::cout << "INT16 baseline: " << b.cfg.pe_rows << "x" << b.cfg.pe_cols << " PEs, "
                      << b.cfg.glb_bytes << " B GLB, perf/area "
                      << format_double(b.ppa->perf_per_area) << " MAC/s/mm^2\n";
        }
        std::cout << "points written to " << out_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

// Samples file: header row names the feature columns plus exactly one target
// column (power|latency|area); every non-target column is a feature.
struct SamplesFile {
    std::vector<std::string> feature_names;
    std::vector<Sample> samples;
};

SamplesFile parse_samples_csv(const std::string& text, const std::string& target) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("samples file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> cols;
    {
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cols.push_back(cell);
    }
    auto target_it = std::find(cols.begin(), cols.end(), target);
    if (target_it == cols.end())
        throw std::runtime_error("samples file has no column named '" + target + "'");
    std::size_t target_idx = static_cast<std::size_t>(target_it - cols.begin());

    SamplesFile out;
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (i != target_idx) out.feature_names.push_back(cols[i]);
    if (out.feature_names.empty())
        throw std::runtime_error("samples file has no feature columns");

    std::size_t line_no = 1;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != cols.size()) {
            std::ostringstream oss;
            oss << "samples file line " << line_no << ": expected " << cols.size()
                << " columns, got " << cells.size();
            throw std::runtime_error(oss.str());
        }
        Sample s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(cells[i], &used);
                if (used != cells[i].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                std::ostringstream oss;
                oss << "samples file line " << line_no << ": bad number '" << cells[i] << "'";
                throw std::runtime_error(oss.str());
            }
            if (i == target_idx)
                s.target = v;
            else
                s.features.push_back(v);
        }
        out.samples.push_back(std::move(s));
    }
    return out;
}

int cmd_fit(const std::string& samples_path, const std::string& target,
            std::uint32_t max_degree, std::uint32_t folds, std::uint64_t seed,
            bool no_ridge, const std::string& out_path) {
    SamplesFile samples;
    try {
        samples = parse_samples_csv(read_file(samples_path), target);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    PolynomialModel model;
    try {
        model = fit_poly(samples.samples, max_degree, folds, seed, !no_ridge);
    } catch (const RankDeficiencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRankDeficient;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    model.feature_names = samples.feature_names;
    model.target_name = target;

    if (!out_path.empty()) write_file(out_path, model_to_json_text(model));
    std::cout << "selected degree " << model.degree << ", cv_rmse " << format_double(model.cv_rmse)
              << (model.ridge_used ? " (ridge fallback used)"
                                   : (model.degenerate ? " (rank-deficient design matrix)" : ""))
              << "\n";
    if (!out_path.empty()) std::cout << "model written to " << out_path << "\n";
    return kExitOk;
}

int cmd_pareto(const std::string& points_path, const std::string& objectives_arg,
               const std::string& accuracy_path, const std::string& network,
               const std::string& out_path) {
    try {
        std::vector<DesignPoint> points = load_points_csv(points_path);
        std::vector<Objective> objectives = parse_objectives(objectives_arg);

        bool wants_top1 = false;
        for (const auto& obj : objectives) wants_top1 |= obj.metric == "top1";
        if (wants_top1) {
            if (accuracy_path.empty())
                throw std::runtime_error("objective 'top1' requires --accuracy");
            if (network.empty())
                throw std::runtime_error("objective 'top1' requires --network");
            points = join_accuracy(points, load_accuracy_file(accuracy_path), network);
        }

        std::vector<DesignPoint> front = pareto_front(points, objectives);
        write_points_csv(front, out_path);
        std::cout << "pareto front: " << front.size() << " of " << points.size()
                  << " points, written to " << out_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

int cmd_oracle(const std::string& net_arg, const std::string& arch_arg, bool perturb) {
    Network net;
    AcceleratorConfig cfg;
    try {
        net = load_net(net_arg).net;
        cfg = parse_arch(read_file(arch_arg));
        auto v = validate_config(cfg, net);
        if (!v.empty()) {
            for (const auto& msg : v) std::cerr << "error: " << msg << "\n";
            return kExitInput;
        }
        for (const auto& layer : net.layers) {
            if (layer_macs(layer) > kOracleMacGuard) {
                std::cerr << "error: layer '" << layer.name << "' exceeds the oracle guard ("
                          << layer_macs(layer) << " > " << kOracleMacGuard << " MACs)\n";
                return kExitInput;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    struct Field {
        const char* name;
        std::uint64_t AccessStats::*member;
    };
    static const Field kFields[] = {
        {"macs", &AccessStats::macs},
        {"compute_cycles", &AccessStats::compute_cycles},
        {"dram_cycles", &AccessStats::dram_cycles},
        {"latency_cycles", &AccessStats::latency_cycles},
        {"spad_ifmap_reads", &AccessStats::spad_ifmap_reads},
        {"spad_filter_reads", &AccessStats::spad_filter_reads},
        {"spad_psum_reads", &AccessStats::spad_psum_reads},
        {"spad_psum_writes", &AccessStats::spad_psum_writes},
        {"glb_ifmap_reads", &AccessStats::glb_ifmap_reads},
        {"glb_filter_reads", &AccessStats::glb_filter_reads},
        {"glb_ofmap_writes", &AccessStats::glb_ofmap_writes},
        {"dram_ifmap_bytes", &AccessStats::dram_ifmap_bytes},
        {"dram_filter_bytes", &AccessStats::dram_filter_bytes},
        {"dram_ofmap_bytes", &AccessStats::dram_ofmap_bytes},
        {"refetch_factor", &AccessStats::refetch_factor},
    };

    int rc = kExitOk;
    for (const auto& layer : net.layers) {
        AccessStats analytical = layer_stats(layer, cfg);
        if (perturb) analytical.compute_cycles += 1;
        AccessStats simulated = simulate_layer_oracle(layer, cfg);

        std::cout << "layer " << layer.name << " (analytical vs simulated)\n";
        for (const auto& f : kFields) {
            std::uint64_t a = analytical.*(f.member);
            std::uint64_t s = simulated.*(f.member);
            std::cout << "  " << f.name << ": " << a << " vs " << s
                      << (a == s ? "" : "   <-- MISMATCH") << "\n";
        }
        std::cout << "  utilization: " << format_double(analytical.utilization) << " vs "
                  << format_double(simulated.utilization)
                  << (analytical.utilization == simulated.utilization ? "" : "   <-- MISMATCH")
                  << "\n";

        if (rc == kExitOk) {
            for (const auto& f : kFields) {
                if (analytical.*(f.member) != simulated.*(f.member)) {
                    std::cerr << "mismatch in layer '" << layer.name << "', field '" << f.name
                              << "'\n";
                    rc = kExitOracleMismatch;
                    break;
                }
            }
            if (rc == kExitOk && analytical.utilization != simulated.utilization) {
                std::cerr << "mismatch in layer '" << layer.name << "', field 'utilization'\n";
                rc = kExitOracleMismatch;
            }
        }
    }
    if (rc == kExitOk) std::cout << "all layers match exactly\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quarry: quantization-aware PPA modeling and design-space exploration "
                 "for spatial DNN accelerators"};
    app.require_subcommand(0, 1);
    std::ostringstream version;
    version << "quarry " << quarry::kVersion << " (bundled cost table "
            << quarry::default_cost_table_digest() << ")";
    app.set_version_flag("--version", version.str());

    std::string net_arg, arch_arg, out_path;
    std::string table_arg = "default";

    auto* evaluate = app.add_subcommand("evaluate", "Estimate PPA of one design point");
    evaluate->add_option("--network", net_arg, "Network preset name or network file")->required();
    evaluate->add_option("--arch", arch_arg, "Accelerator config file")->required();
    evaluate->add_option("--cost-table", table_arg, "Cost table file, or 'default'");
    evaluate->add_option("--out", out_path, "Report output path (JSON)");

    std::string grid_arg = "default";
    bool do_normalize = false;
    auto* explore_cmd = app.add_subcommand("explore", "Evaluate every point of a design grid");
    explore_cmd->add_option("--network", net_arg, "Network preset name or network file")->required();
    explore_cmd->add_option("--grid", grid_arg, "Grid file, or 'default'");
    explore_cmd->add_option("--cost-table", table_arg, "Cost table file, or 'default'");
    explore_cmd->add_flag("--normalize", do_normalize,
                          "Populate columns normalized to the best-INT16 baseline");
    explore_cmd->add_option("--out", out_path, "Design-point CSV output path")->required();

    std::string samples_path, target;
    std::uint32_t max_degree = 3, folds = 5;
    std::uint64_t seed = 12345;
    bool no_ridge = false;
    auto* fit = app.add_subcommand("fit", "Fit a polynomial surrogate model");
    fit->add_option("--samples", samples_path, "Samples CSV (features + one target column)")
        ->required();
    fit->add_option("--target", target, "Target column: power|latency|area")
        ->required()
        ->check(CLI::IsMember({"power", "latency", "area"}));
    fit->add_option("--max-degree", max_degree, "Highest polynomial degree to try");
    fit->add_option("--folds", folds, "Cross-validation folds");
    fit->add_option("--seed", seed, "Fold-shuffle seed");
    fit->add_flag("--no-ridge", no_ridge, "Fail instead of using the ridge fallback");
    fit->add_option("--out", out_path, "Model output path (JSON)");

    std::string points_path, objectives_arg, accuracy_path, pareto_network;
    auto* pareto = app.add_subcommand("pareto", "Extract the Pareto front from a points CSV");
    pareto->add_option("--points", points_path, "Design-point CSV from 'explore'")->required();
    pareto->add_option("--objectives", objectives_arg,
                       "Objective spec, e.g. perf_per_area:max,energy:min")
        ->required();
    pareto->add_option("--accuracy", accuracy_path, "Accuracy CSV (network,pe_type,top1)");
    pareto->add_option("--network", pareto_network, "Network name for the accuracy join");
    pareto->add_option("--out", out_path, "Front CSV output path")->required();

    bool perturb = false;
    auto* oracle = app.add_subcommand("oracle",
                                      "Check the analytical model against the loop-nest simulator");
    oracle->add_option("--network", net_arg, "Network preset name or network file")->required();
    oracle->add_option("--arch", arch_arg, "Accelerator config file")->required();
    oracle->add_flag("--perturb-analytical", perturb)->group("");  // test hook, hidden

    CLI11_PARSE(app, argc, argv);

    if (evaluate->parsed()) return cmd_evaluate(net_arg, arch_arg, table_arg, out_path);
    if (explore_cmd->parsed())
        return cmd_explore(net_arg, grid_arg, table_arg, do_normalize, out_path);
    if (fit->parsed())
        return cmd_fit(samples_path, target, max_degree, folds, seed, no_ridge, out_path);
    if (pareto->parsed())
        return cmd_pareto(points_path, objectives_arg, accuracy_path, pareto_network, out_path);
    if (oracle->parsed()) return cmd_oracle(net_arg, arch_arg, perturb);

    std::cout << app.help();
    return kExitOk;
}
