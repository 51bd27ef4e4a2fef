#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "crf/distributions.hpp"
#include "crf/dynamics.hpp"
#include "crf/io.hpp"
#include "crf/params.hpp"

namespace crf {

enum class SweepAxis { OmegaD, AtomNumber, DetuningCa, DriveDuration, DeltaMax };
SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis axis);

// Unit of the sweep values on the OmegaD axis: plain Hz, fractions of the
// homogeneous critical drive Ω_c^h, or fractions of the finite-time critical
// drive Ω_c = 0.70·Ω_c^h (the convention the measured phase diagrams use).
enum class ValuesUnit { TwoPiHz, OmegaCH, OmegaC };
ValuesUnit values_unit_from_string(const std::string& s);
std::string to_string(ValuesUnit unit);

inline constexpr double omega_c_over_omega_c_h = 0.70;

struct SweepOutputs {
    bool jz = true;
    bool transmission = true;
    bool trajectory = false;
    bool steady_state = false;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::OmegaD;
    std::vector<double> values;
    ValuesUnit values_unit = ValuesUnit::OmegaCH;
    PhysicalParams base_params;
    DriveProtocol protocol;
    SweepOutputs outputs;
    int n_phi = 20;
    int n_delta = 40;
    double tail_fraction = 0.5;
    int n_samples = 1200;
    // when >= 0 the drive is re-derived per point as this fraction of the
    // point's Ω_c^h (so e.g. atom-number sweeps hold Ω_d/Ω_c^h fixed);
    // negative keeps protocol.omega_d as given
    double omega_d_ratio = -1.0;
    ExecMode mode = ExecMode::Auto;
};

struct SweepRow {
    double value = 0.0;
    double omega_d = 0.0;  // resolved drive, angular frequency
    bool ok = false;
    std::string error;
    double jz_final = 0.0;
    double jz_tail = 0.0;
    double transmission_tail = 0.0;
    bool ss_exists = false;
    double ss_jz = 0.0;
    std::string trajectory_file;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// One full-model integration per value, dispatched over a worker pool of
// `jobs` threads (0 → hardware default, 1 → serial). Results land in input
// order and are identical regardless of the thread count. Per-point failures
// are recorded in the row, not thrown. When outputs.trajectory is set and
// trajectory_dir is non-empty, each point writes trajectory_NNN.csv there.
SweepResult run_sweep(const SweepSpec& spec, const std::string& trajectory_dir = "",
                      int jobs = 0);

// Single full-model trajectory on the standard grid, uniformly sampled.
Trajectory run_trace(const PhysicalParams& p, const DriveProtocol& proto, int n_phi,
                     int n_delta, int n_samples, ExecMode mode = ExecMode::Auto);

// A trace manifest may pin its drive (or any swept quantity) through a
// single-value sweep group; fold that value into base_params/protocol and
// clear the values. More than one value is an error — that is a sweep.
void resolve_single_point(SweepSpec& spec);

enum class OracleSuite {
    GeneratorResidual,
    AdiabaticEquivalence,
    MeanfieldConvergence,
    HpSqueezing
};
OracleSuite oracle_suite_from_string(const std::string& s);
std::string to_string(OracleSuite suite);

struct OracleCheckItem {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct OracleCheckReport {
    OracleSuite suite = OracleSuite::GeneratorResidual;
    std::vector<OracleCheckItem> items;
    bool all_pass = false;
};

OracleCheckReport run_oracle_check(OracleSuite suite);
nlohmann::json oracle_report_to_json(const OracleCheckReport& report);

// Parse a sweep manifest: {"params": {...}, "protocol": {...},
// "grid": {"n_phi", "n_delta"}, "sweep": {"axis", "values", "values_unit",
// "outputs", "tail_fraction", "n_samples", "omega_d_ratio"}}.
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);

CsvTable sweep_result_to_csv(const SweepResult& result);

} // namespace crf
