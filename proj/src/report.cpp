#include "quarry/report.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

const std::vector<std::string> kPointsCsvColumns = {
    "pe_rows", "pe_cols", "glb_bytes", "ifmap_spad_bytes", "filter_spad_bytes",
    "psum_spad_bytes", "dram_bw", "clock_hz", "pe_type", "feasible",
    "latency_s", "energy_j", "avg_power_w", "area_mm2", "throughput_macs_s",
    "perf_per_area", "mac_j", "spad_j", "glb_j", "dram_j", "leak_j",
    "norm_perf_per_area", "norm_energy", "top1"};

const std::map<std::string, std::string> kPointsCsvUnits = {
    {"pe_rows", "count"}, {"pe_cols", "count"}, {"glb_bytes", "byte"},
    {"ifmap_spad_bytes", "byte"}, {"filter_spad_bytes", "byte"}, {"psum_spad_bytes", "byte"},
    {"dram_bw", "byte/cycle"}, {"clock_hz", "Hz"}, {"feasible", "flag"},
    {"latency_s", "s"}, {"energy_j", "J"}, {"avg_power_w", "W"}, {"area_mm2", "mm^2"},
    {"throughput_macs_s", "MAC/s"}, {"perf_per_area", "MAC/s/mm^2"},
    {"mac_j", "J"}, {"spad_j", "J"}, {"glb_j", "J"}, {"dram_j", "J"}, {"leak_j", "J"},
    {"norm_perf_per_area", "ratio"}, {"norm_energy", "ratio"}, {"top1", "fraction"}};

std::string points_to_csv(const std::vector<DesignPoint>& points) {
    std::ostringstream oss;
    for (std::size_t i = 0; i < kPointsCsvColumns.size(); ++i) {
        if (i) oss << ',';
        oss << kPointsCsvColumns[i];
    }
    oss << '\n';

    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& p : points) {
        oss << p.cfg.pe_rows << ',' << p.cfg.pe_cols << ',' << p.cfg.glb_bytes << ','
            << p.cfg.ifmap_spad_bytes << ',' << p.cfg.filter_spad_bytes << ','
            << p.cfg.psum_spad_bytes << ',' << p.cfg.dram_bw << ','
            << format_double(p.cfg.clock_hz) << ',' << pe_type_name(p.cfg.pe_type) << ','
            << (p.feasible ? 1 : 0) << ',';
        if (p.ppa) {
            const PPAResult& r = *p.ppa;
            oss << format_double(r.latency_s) << ',' << format_double(r.energy_j) << ','
                << format_double(r.avg_power_w) << ',' << format_double(r.area_mm2) << ','
                << format_double(r.throughput_macs_s) << ',' << format_double(r.perf_per_area)
                << ',' << format_double(r.mac_j) << ',' << format_double(r.spad_j) << ','
                << format_double(r.glb_j) << ',' << format_double(r.dram_j) << ','
                << format_double(r.leak_j);
        } else {
            oss << ",,,,,,,,,,";
        }
        oss << ',' << opt(p.norm_perf_per_area) << ',' << opt(p.norm_energy) << ','
            << opt(p.accuracy) << '\n';
    }
    return oss.str();
}

namespace {

double parse_double_cell(const std::string& cell, std::size_t line_no) {
    double v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        std::ostringstream oss;
        oss << "points CSV line " << line_no << ": bad number '" << cell << "'";
        throw std::runtime_error(oss.str());
    }
    return v;
}

std::uint64_t parse_count_cell(const std::string& cell, std::size_t line_no) {
    std::uint64_t v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        std::ostringstream oss;
        oss << "points CSV line " << line_no << ": bad count '" << cell << "'";
        throw std::runtime_error(oss.str());
    }
    return v;
}

}  // namespace

std::vector<DesignPoint> parse_points_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("points CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::ostringstream expect;
        for (std::size_t i = 0; i < kPointsCsvColumns.size(); ++i) {
            if (i) expect << ',';
            expect << kPointsCsvColumns[i];
        }
        if (line != expect.str())
            throw std::runtime_error("points CSV header does not match the schema");
    }

    std::vector<DesignPoint> points;
    std::size_t line_no = 1;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < kPointsCsvColumns.size()) cells.push_back("");
        if (cells.size() != kPointsCsvColumns.size()) {
            std::ostringstream oss;
            oss << "points CSV line " << line_no << ": expected " << kPointsCsvColumns.size()
                << " columns, got " << cells.size();
            throw std::runtime_error(oss.str());
        }

        DesignPoint p;
        p.cfg.pe_rows = parse_count_cell(cells[0], line_no);
        p.cfg.pe_cols = parse_count_cell(cells[1], line_no);
        p.cfg.glb_bytes = parse_count_cell(cells[2], line_no);
        p.cfg.ifmap_spad_bytes = parse_count_cell(cells[3], line_no);
        p.cfg.filter_spad_bytes = parse_count_cell(cells[4], line_no);
        p.cfg.psum_spad_bytes = parse_count_cell(cells[5], line_no);
        p.cfg.dram_bw = parse_count_cell(cells[6], line_no);
        p.cfg.clock_hz = parse_double_cell(cells[7], line_no);
        p.cfg.pe_type = parse_pe_type(cells[8]);
        p.feasible = parse_count_cell(cells[9], line_no) != 0;

        bool has_ppa = !cells[10].empty();
        if (has_ppa) {
            PPAResult r;
            r.latency_s = parse_double_cell(cells[10], line_no);
            r.energy_j = parse_double_cell(cells[11], line_no);
            r.avg_power_w = parse_double_cell(cells[12], line_no);
            r.area_mm2 = parse_double_cell(cells[13], line_no);
            r.throughput_macs_s = parse_double_cell(cells[14], line_no);
            r.perf_per_area = parse_double_cell(cells[15], line_no);
            r.mac_j = parse_double_cell(cells[16], line_no);
            r.spad_j = parse_double_cell(cells[17], line_no);
            r.glb_j = parse_double_cell(cells[18], line_no);
            r.dram_j = parse_double_cell(cells[19], line_no);
            r.leak_j = parse_double_cell(cells[20], line_no);
            p.ppa = r;
        }
        if (!cells[21].empty()) p.norm_perf_per_area = parse_double_cell(cells[21], line_no);
        if (!cells[22].empty()) p.norm_energy = parse_double_cell(cells[22], line_no);
        if (!cells[23].empty()) p.accuracy = parse_double_cell(cells[23], line_no);
        points.push_back(std::move(p));
    }
    return points;
}

void write_points_csv(const std::vector<DesignPoint>& points, const std::string& path) {
    write_file(path, points_to_csv(points));
}

std::vector<DesignPoint> load_points_csv(const std::string& path) {
    return parse_points_csv(read_file(path));
}

const std::map<std::string, std::string>& required_units(const std::string& payload_kind) {
    static const std::map<std::string, std::string> kPpaUnits = {
        {"latency_s", "s"},     {"energy_j", "J"},  {"avg_power_w", "W"},
        {"area_mm2", "mm^2"},   {"throughput_macs_s", "MAC/s"},
        {"perf_per_area", "MAC/s/mm^2"}, {"mac_j", "J"}, {"spad_j", "J"},
        {"glb_j", "J"},         {"dram_j", "J"},    {"leak_j", "J"}};
    static const std::map<std::string, std::string> kModelUnits = {
        {"degree", "count"}, {"coefficients", "target-unit"}, {"cv_rmse", "target-unit"}};

    if (payload_kind == "ppa") return kPpaUnits;
    if (payload_kind == "points") return kPointsCsvUnits;
    if (payload_kind == "model") return kModelUnits;
    throw std::runtime_error("unknown report payload kind '" + payload_kind + "'");
}

std::string report_to_json_text(const RunReport& report) {
    const auto& needed = required_units(report.payload_kind);
    for (const auto& [field, _] : needed) {
        if (!report.units.contains(field))
            throw std::runtime_error("report units metadata is missing entry for '" + field + "'");
    }
    if (report.input_digests.empty())
        throw std::runtime_error("report must carry at least one input digest");

    json j;
    j["tool"] = "quarry";
    j["version"] = report.version;
    j["inputs"] = report.input_digests;
    j["units"] = report.units;
    j["payload_kind"] = report.payload_kind;
    j["payload"] = report.payload;
    j["payload_digest"] = digest_string(report.payload.dump());
    return j.dump(2) + "\n";
}

void write_report(const RunReport& report, const std::string& path) {
    write_file(path, report_to_json_text(report));
}

ParsedReport parse_report(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed report document: ") + e.what());
    }

    ParsedReport out;
    try {
        out.report.version = j.at("version").get<std::string>();
        out.report.input_digests =
            j.at("inputs").get<std::map<std::string, std::string>>();
        out.report.units = j.at("units").get<std::map<std::string, std::string>>();
        out.report.payload_kind = j.at("payload_kind").get<std::string>();
        out.report.payload = j.at("payload");

        std::string recorded = j.at("payload_digest").get<std::string>();
        std::string actual = digest_string(out.report.payload.dump());
        if (recorded != actual) {
            out.warnings.push_back("payload digest mismatch: recorded " + recorded +
                                   ", computed " + actual);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed report document: ") + e.what());
    }
    return out;
}

ParsedReport load_report_file(const std::string& path) {
    return parse_report(read_file(path));
}

nlohmann::json ppa_to_json(const PPAResult& ppa) {
    json j;
    j["latency_s"] = ppa.latency_s;
    j["energy_j"] = ppa.energy_j;
    j["avg_power_w"] = ppa.avg_power_w;
    j["area_mm2"] = ppa.area_mm2;
    j["throughput_macs_s"] = ppa.throughput_macs_s;
    j["perf_per_area"] = ppa.perf_per_area;
    j["mac_j"] = ppa.mac_j;
    j["spad_j"] = ppa.spad_j;
    j["glb_j"] = ppa.glb_j;
    j["dram_j"] = ppa.dram_j;
    j["leak_j"] = ppa.leak_j;
    return j;
}

PPAResult ppa_from_json(const nlohmann::json& j) {
    PPAResult r;
    r.latency_s = j.at("latency_s").get<double>();
    r.energy_j = j.at("energy_j").get<double>();
    r.avg_power_w = j.at("avg_power_w").get<double>();
    r.area_mm2 = j.at("area_mm2").get<double>();
    r.throughput_macs_s = j.at("throughput_macs_s").get<double>();
    r.perf_per_area = j.at("perf_per_area").get<double>();
    r.mac_j = j.at("mac_j").get<double>();
    r.spad_j = j.at("spad_j").get<double>();
    r.glb_j = j.at("glb_j").get<double>();
    r.dram_j = j.at("dram_j").get<double>();
    r.leak_j = j.at("leak_j").get<double>();
    return r;
}

}  // namespace quarry
