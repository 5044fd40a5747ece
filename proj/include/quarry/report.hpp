#ifndef QUARRY_REPORT_HPP
#define QUARRY_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "quarry/dse.hpp"

namespace quarry {

// Fixed column order of the design-point CSV. Part of the format contract;
// golden-file tests pin it.
extern const std::vector<std::string> kPointsCsvColumns;
extern const std::map<std::string, std::string> kPointsCsvUnits;

std::string points_to_csv(const std::vector<DesignPoint>& points);
std::vector<DesignPoint> parse_points_csv(const std::string& text);

void write_points_csv(const std::vector<DesignPoint>& points, const std::string& path);
std::vector<DesignPoint> load_points_csv(const std::string& path);

// Machine-readable run record: tool version, digests of every input file,
// one results payload, and units for every numeric column of the payload.
struct RunReport {
    std::string version;
    std::map<std::string, std::string> input_digests;  // input name -> digest
    std::map<std::string, std::string> units;          // numeric field -> unit
    std::string payload_kind;                          // "ppa" | "points" | "model"
    nlohmann::json payload;

    bool operator==(const RunReport&) const = default;
};

// Units every payload kind must document; write_report rejects reports whose
// units map does not cover its payload's numeric fields.
const std::map<std::string, std::string>& required_units(const std::string& payload_kind);

std::string report_to_json_text(const RunReport& report);
void write_report(const RunReport& report, const std::string& path);

struct ParsedReport {
    RunReport report;
    std::vector<std::string> warnings;  // e.g. payload digest mismatch
};

ParsedReport parse_report(const std::string& text);
ParsedReport load_report_file(const std::string& path);

// Payload builders.
nlohmann::json ppa_to_json(const PPAResult& ppa);
PPAResult ppa_from_json(const nlohmann::json& j);

}  // namespace quarry

#endif
