#include "crf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crf/errors.hpp"
#include "crf/state.hpp"
#include "crf/units.hpp"

namespace crf {

std::string format_double(double v) {
    // shortest representation that parses back to the same bits
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_csv: cannot open " + path);
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ',';
            f << csv_escape(row[i]);
        }
        f << "\r\n";
    };
    emit_row(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw IoError("write_csv: row width differs from header in " + path);
        emit_row(row);
    }
    if (!f) throw IoError("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_csv: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();

    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        if (table.header.empty()) table.header = row;
        else table.rows.push_back(row);
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; the newline ends the record
        } else if (c == '\n') {
            end_row();
        } else {
            field += c;
        }
    }
    if (quoted) throw IoError("read_csv: unterminated quoted field in " + path);
    if (!field.empty() || !row.empty()) end_row();
    for (const auto& r : table.rows)
        if (r.size() != table.header.size())
            throw IoError("read_csv: ragged row in " + path);
    return table;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    if (traj.states.size() != traj.times.size())
        throw IoError(
            "write_trajectory_csv: trajectory was integrated without states");
    CsvTable table;
    table.header = {"t_s",          "re_alpha",
                    "im_alpha",     "jz_weighted",
                    "transmission", "re_jminus_weighted",
                    "im_jminus_weighted"};
    table.rows.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const Observables& obs = traj.observables[i];
        table.rows.push_back({format_double(traj.times[i]),
                              format_double(traj.states[i].alpha.real()),
                              format_double(traj.states[i].alpha.imag()),
                              format_double(obs.j_z_weighted),
                              format_double(obs.transmission),
                              format_double(obs.j_minus_weighted.real()),
                              format_double(obs.j_minus_weighted.imag())});
    }
    write_csv(path, table);
}

void write_grid_csv(const std::string& path, const EnsembleGrid& grid) {
    CsvTable table;
    table.header = {"eta", "delta_centered_2pi_hz", "weight"};
    table.rows.reserve(grid.nodes.size());
    for (const GridNode& node : grid.nodes)
        table.rows.push_back({format_double(node.eta),
                              format_double(to_2pi_hz(node.delta_centered)),
                              format_double(node.weight)});
    write_csv(path, table);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_text_file: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_text_file: cannot open " + path);
    f << content;
    if (!f) throw IoError("write_text_file: write failed for " + path);
}

namespace {

double get_number(const nlohmann::json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number())
        throw SpecError(std::string("expected a number for \"") + key + "\"");
    return v.get<double>();
}

void reject_unknown(const nlohmann::json& doc,
                    const std::vector<std::string>& known, const char* what) {
    for (const auto& item : doc.items()) {
        bool ok = false;
        for (const auto& k : known)
            if (item.key() == k) ok = true;
        if (!ok)
            throw SpecError(std::string("unknown key \"") + item.key() + "\" in " +
                            what);
    }
}

} // namespace

nlohmann::json params_to_json(const PhysicalParams& p) {
    nlohmann::json doc;
    doc["units"] = "2pi_hz";
    doc["kappa_2pi_hz"] = to_2pi_hz(p.kappa);
    doc["gamma_2pi_hz"] = to_2pi_hz(p.gamma);
    doc["g_rms_2pi_hz"] = to_2pi_hz(p.g_rms);
    doc["delta_ca_2pi_hz"] = to_2pi_hz(p.delta_ca);
    doc["delta_max_2pi_hz"] = to_2pi_hz(p.delta_max);
    doc["n_atoms"] = p.n_atoms;
    doc["trap_depth_ratio"] = p.trap_depth_ratio;
    return doc;
}

PhysicalParams params_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SpecError("params must be a JSON object");
    if (!doc.contains("units") || !doc.at("units").is_string() ||
        doc.at("units").get<std::string>() != "2pi_hz")
        throw SpecError("params needs \"units\": \"2pi_hz\" (frequencies are"
                        " plain Hz, converted to angular frequency on parse)");
    reject_unknown(doc,
                   {"units", "kappa_2pi_hz", "gamma_2pi_hz", "g_rms_2pi_hz",
                    "delta_ca_2pi_hz", "delta_max_2pi_hz", "n_atoms",
                    "trap_depth_ratio"},
                   "params");
    PhysicalParams defaults;
    PhysicalParams p;
    p.kappa = from_2pi_hz(get_number(doc, "kappa_2pi_hz", to_2pi_hz(defaults.kappa)));
    p.gamma = from_2pi_hz(get_number(doc, "gamma_2pi_hz", to_2pi_hz(defaults.gamma)));
    p.g_rms = from_2pi_hz(get_number(doc, "g_rms_2pi_hz", to_2pi_hz(defaults.g_rms)));
    p.delta_ca =
        from_2pi_hz(get_number(doc, "delta_ca_2pi_hz", to_2pi_hz(defaults.delta_ca)));
    p.delta_max = from_2pi_hz(
        get_number(doc, "delta_max_2pi_hz", to_2pi_hz(defaults.delta_max)));
    p.n_atoms = get_number(doc, "n_atoms", defaults.n_atoms);
    p.trap_depth_ratio =
        get_number(doc, "trap_depth_ratio", defaults.trap_depth_ratio);
    try {
        validate(p);
    } catch (const DomainError& e) {
        throw SpecError(std::string("invalid parameter values: ") + e.what());
    }
    return p;
}

nlohmann::json protocol_to_json(const DriveProtocol& proto) {
    nlohmann::json doc;
    doc["shape"] = to_string(proto.shape);
    doc["omega_d_2pi_hz"] = to_2pi_hz(proto.omega_d);
    doc["t_ramp_s"] = proto.t_ramp;
    doc["t_hold_s"] = proto.t_hold;
    return doc;
}

DriveProtocol protocol_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SpecError("protocol must be a JSON object");
    reject_unknown(doc, {"shape", "omega_d_2pi_hz", "t_ramp_s", "t_hold_s"},
                   "protocol");
    DriveProtocol defaults;
    DriveProtocol proto;
    if (doc.contains("shape")) {
        if (!doc.at("shape").is_string())
            throw SpecError("protocol shape must be a string");
        proto.shape = drive_shape_from_string(doc.at("shape").get<std::string>());
    }
    proto.omega_d =
        from_2pi_hz(get_number(doc, "omega_d_2pi_hz", to_2pi_hz(defaults.omega_d)));
    proto.t_ramp = get_number(doc, "t_ramp_s", defaults.t_ramp);
    proto.t_hold = get_number(doc, "t_hold_s", defaults.t_hold);
    try {
        validate(proto);
    } catch (const DomainError& e) {
        throw SpecError(std::string("invalid protocol values: ") + e.what());
    }
    return proto;
}

} // namespace crf
