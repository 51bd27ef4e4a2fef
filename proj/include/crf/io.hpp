#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "crf/distributions.hpp"
#include "crf/dynamics.hpp"
#include "crf/params.hpp"

namespace crf {

// %.15g — shortest representation that round-trips doubles in practice
std::string format_double(double v);

// RFC-4180 escaping: quote fields containing comma, quote, CR or LF; double
// any embedded quotes
std::string csv_escape(const std::string& field);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// CRLF line endings, written in binary mode so the bytes are identical on
// every platform
void write_csv(const std::string& path, const CsvTable& table);

CsvTable read_csv(const std::string& path);

// columns: t_s, re_alpha, im_alpha, jz_weighted, transmission,
// re_jminus_weighted, im_jminus_weighted (needs states kept in the trajectory)
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// columns: eta, delta_centered_2pi_hz, weight
void write_grid_csv(const std::string& path, const EnsembleGrid& grid);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// JSON parameter documents carry a mandatory "units": "2pi_hz" tag and
// frequency fields suffixed _2pi_hz (values in plain Hz, converted to angular
// frequency on parse). Missing fields keep their defaults; unknown keys are
// rejected so typos never silently fall back to a default.
nlohmann::json params_to_json(const PhysicalParams& p);
PhysicalParams params_from_json(const nlohmann::json& doc);

nlohmann::json protocol_to_json(const DriveProtocol& proto);
DriveProtocol protocol_from_json(const nlohmann::json& doc);

} // namespace crf
