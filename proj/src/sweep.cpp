#include "crf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "crf/errors.hpp"
#include "crf/fluctuations.hpp"
#include "crf/oracle.hpp"
#include "crf/steady_state.hpp"

namespace crf {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> known,
                    const char* section) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok)
            throw SpecError("unknown key \"" + it.key() + "\" in " + section +
                            " section");
    }
}

double get_number(const nlohmann::json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number())
        throw SpecError(std::string("key \"") + key + "\" must be a number");
    return v.get<double>();
}

bool get_bool(const nlohmann::json& doc, const char* key, bool fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_boolean())
        throw SpecError(std::string("key \"") + key + "\" must be a boolean");
    return v.get<bool>();
}

std::string get_string(const nlohmann::json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_string())
        throw SpecError(std::string("key \"") + key + "\" must be a string");
    return v.get<std::string>();
}

} // namespace

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "omega_d") return SweepAxis::OmegaD;
    if (s == "atom_number") return SweepAxis::AtomNumber;
    if (s == "detuning_ca") return SweepAxis::DetuningCa;
    if (s == "drive_duration") return SweepAxis::DriveDuration;
    if (s == "delta_max") return SweepAxis::DeltaMax;
    throw SpecError("unknown sweep axis \"" + s +
                    "\" (expected omega_d, atom_number, detuning_ca, "
                    "drive_duration or delta_max)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::OmegaD: return "omega_d";
        case SweepAxis::AtomNumber: return "atom_number";
        case SweepAxis::DetuningCa: return "detuning_ca";
        case SweepAxis::DriveDuration: return "drive_duration";
        case SweepAxis::DeltaMax: return "delta_max";
    }
    return "omega_d";
}

ValuesUnit values_unit_from_string(const std::string& s) {
    if (s == "2pi_hz") return ValuesUnit::TwoPiHz;
    if (s == "omega_c_h") return ValuesUnit::OmegaCH;
    if (s == "omega_c") return ValuesUnit::OmegaC;
    throw SpecError("unknown values unit \"" + s +
                    "\" (expected 2pi_hz, omega_c_h or omega_c)");
}

std::string to_string(ValuesUnit unit) {
    switch (unit) {
        case ValuesUnit::TwoPiHz: return "2pi_hz";
        case ValuesUnit::OmegaCH: return "omega_c_h";
        case ValuesUnit::OmegaC: return "omega_c";
    }
    return "omega_c_h";
}

namespace {

// Resolve one sweep point into parameters, protocol and drive.
struct Point {
    PhysicalParams p;
    DriveProtocol proto;
    bool rebuild_grid = false;
};

Point resolve_point(const SweepSpec& spec, double value) {
    Point pt{spec.base_params, spec.protocol, false};
    switch (spec.axis) {
        case SweepAxis::OmegaD:
            break;  // handled below, after params are final
        case SweepAxis::AtomNumber:
            pt.p.n_atoms = value;
            break;
        case SweepAxis::DetuningCa:
            pt.p.delta_ca = from_2pi_hz(value);
            break;
        case SweepAxis::DriveDuration:
            pt.proto.t_hold = value;
            break;
        case SweepAxis::DeltaMax:
            pt.p.delta_max = from_2pi_hz(value);
            pt.rebuild_grid = true;
            break;
    }
    validate(pt.p);
    const double omega_c_h = derive_params(pt.p).omega_c_h;
    if (spec.axis == SweepAxis::OmegaD) {
        switch (spec.values_unit) {
            case ValuesUnit::TwoPiHz: pt.proto.omega_d = from_2pi_hz(value); break;
            case ValuesUnit::OmegaCH: pt.proto.omega_d = value * omega_c_h; break;
            case ValuesUnit::OmegaC:
                pt.proto.omega_d = value * omega_c_over_omega_c_h * omega_c_h;
                break;
        }
    } else if (spec.omega_d_ratio >= 0.0) {
        pt.proto.omega_d = spec.omega_d_ratio * omega_c_h;
    }
    validate(pt.proto);
    return pt;
}

} // namespace

void resolve_single_point(SweepSpec& spec) {
    if (spec.values.empty()) return;
    if (spec.values.size() > 1)
        throw SpecError("trace takes a single sweep value; got " +
                        std::to_string(spec.values.size()) + " (use sweep)");
    if (spec.axis == SweepAxis::OmegaD && spec.omega_d_ratio >= 0.0)
        throw SpecError("omega_d_ratio conflicts with sweeping omega_d directly");
    Point pt = resolve_point(spec, spec.values[0]);
    spec.base_params = pt.p;
    spec.protocol = pt.proto;
    spec.values.clear();
}

SweepResult run_sweep(const SweepSpec& spec, const std::string& trajectory_dir,
                      int jobs) {
    if (spec.values.empty()) throw SpecError("sweep has no values");
    for (double v : spec.values)
        if (!std::isfinite(v)) throw SpecError("sweep values must be finite");
    if (!(spec.tail_fraction > 0.0 && spec.tail_fraction <= 1.0))
        throw SpecError("tail_fraction must be in (0, 1]");
    if (spec.n_samples < 2) throw SpecError("n_samples must be at least 2");
    if (spec.axis == SweepAxis::OmegaD && spec.omega_d_ratio >= 0.0)
        throw SpecError("omega_d_ratio conflicts with sweeping omega_d directly");
    if (spec.outputs.trajectory && trajectory_dir.empty())
        throw SpecError("trajectory output requested without a trajectory directory");
    validate(spec.base_params);

    if (spec.outputs.trajectory)
        std::filesystem::create_directories(trajectory_dir);

    // One grid serves every point unless the sweep changes the broadening cap.
    EnsembleGrid base_grid = ensemble_grid(spec.n_phi, spec.n_delta, spec.base_params);

    const std::size_t n = spec.values.size();
    SweepResult result;
    result.rows.resize(n);

    auto work = [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.value = spec.values[i];
        try {
            Point pt = resolve_point(spec, spec.values[i]);
            row.omega_d = pt.proto.omega_d;
            const EnsembleGrid grid =
                pt.rebuild_grid ? ensemble_grid(spec.n_phi, spec.n_delta, pt.p)
                                : base_grid;

            IntegrateOptions opt;
            opt.mode = spec.mode;
            opt.keep_states = spec.outputs.trajectory;
            Trajectory traj =
                integrate(ground_state(grid), pt.p, pt.proto,
                          linspace(0.0, pt.proto.t_hold, spec.n_samples), opt);

            row.jz_final = traj.observables.back().j_z_weighted;
            Observables tail = tail_average(traj, spec.tail_fraction);
            row.jz_tail = tail.j_z_weighted;
            row.transmission_tail = tail.transmission;

            if (spec.outputs.steady_state) {
                const double r =
                    pt.proto.omega_d / derive_params(pt.p).omega_c_h;
                SteadyStateSolution sol = pt.p.gamma > 0.0
                                              ? ss_broadened(r, grid, pt.p)
                                              : ss_ideal_inhomog(r, pt.p);
                row.ss_exists = sol.exists;
                row.ss_jz = sol.j_z_weighted.value_or(0.0);
            }

            if (spec.outputs.trajectory) {
                char name[64];
                std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
                row.trajectory_file =
                    (std::filesystem::path(trajectory_dir) / name).string();
                write_trajectory_csv(row.trajectory_file, traj);
            }
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

#ifdef CRF_HAVE_OPENMP
    if (jobs != 1 && n > 1) {
        const int nt = jobs > 0 ? jobs : max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
            work(static_cast<std::size_t>(i));
        return result;
    }
#else
    (void)jobs;
#endif
    for (std::size_t i = 0; i < n; ++i) work(i);
    return result;
}

Trajectory run_trace(const PhysicalParams& p, const DriveProtocol& proto, int n_phi,
                     int n_delta, int n_samples, ExecMode mode) {
    validate(p);
    validate(proto);
    if (n_samples < 2) throw SpecError("n_samples must be at least 2");
    EnsembleGrid grid = ensemble_grid(n_phi, n_delta, p);
    IntegrateOptions opt;
    opt.mode = mode;
    return integrate(ground_state(grid), p, proto,
                     linspace(0.0, proto.t_hold, n_samples), opt);
}

OracleSuite oracle_suite_from_string(const std::string& s) {
    if (s == "generator_residual") return OracleSuite::GeneratorResidual;
    if (s == "adiabatic_equivalence") return OracleSuite::AdiabaticEquivalence;
    if (s == "meanfield_convergence") return OracleSuite::MeanfieldConvergence;
    if (s == "hp_squeezing") return OracleSuite::HpSqueezing;
    throw SpecError("unknown oracle suite \"" + s +
                    "\" (expected generator_residual, adiabatic_equivalence, "
                    "meanfield_convergence or hp_squeezing)");
}

std::string to_string(OracleSuite suite) {
    switch (suite) {
        case OracleSuite::GeneratorResidual: return "generator_residual";
        case OracleSuite::AdiabaticEquivalence: return "adiabatic_equivalence";
        case OracleSuite::MeanfieldConvergence: return "meanfield_convergence";
        case OracleSuite::HpSqueezing: return "hp_squeezing";
    }
    return "generator_residual";
}

namespace {

OracleCheckItem make_item(const std::string& name, double measured, double threshold,
                          const std::string& detail) {
    OracleCheckItem item;
    item.name = name;
    item.measured = measured;
    item.threshold = threshold;
    item.detail = detail;
    item.pass = std::isfinite(measured) && measured < threshold;
    return item;
}

void check_generator_residual(OracleCheckReport& report) {
    const struct {
        int n;
        double r;
    } cases[] = {{2, 0.2}, {10, 0.5}, {30, 0.5}, {20, 2.0}};
    for (const auto& c : cases) {
        CrfSolution sol = crf_exact_steady_state(c.n, c.r);
        double res = crf_generator_residual(c.n, c.r, sol.rho);
        char name[96], detail[128];
        std::snprintf(name, sizeof name, "generator residual N=%d r=%g", c.n, c.r);
        std::snprintf(detail, sizeof detail, "||drho/dt||_F / ||rho||_F, rcond=%.2e",
                      sol.rcond);
        report.items.push_back(make_item(name, res, 1e-9, detail));

        DensityDiagnostics diag = check_density_matrix(sol.rho);
        std::snprintf(name, sizeof name, "density defects N=%d r=%g", c.n, c.r);
        double worst = std::max({diag.hermiticity_defect, diag.trace_defect,
                                 -diag.min_eigenvalue});
        report.items.push_back(
            make_item(name, worst, 1e-10,
                      "max of hermiticity defect, trace defect, negative weight"));
    }
}

void check_adiabatic_equivalence(OracleCheckReport& report) {
    // Deep adiabatic regime: g*sqrt(N)/kappa = 0.025, so eliminating the
    // cavity should reproduce the collective-emission steady state.
    PhysicalParams p;
    p.n_atoms = 2;
    p.gamma = 0.0;
    p.delta_ca = 0.0;
    p.g_rms = from_2pi_hz(1e3);
    p.kappa = 2.0 * p.g_rms * std::sqrt(2.0) / 0.05;
    const double r = 0.5;
    const double omega_d = r * derive_params(p).omega_c_h;

    LiouvillianSolution liou = liouvillian_steady_state(2, 6, p, omega_d);
    CrfSolution crf_sol = crf_exact_steady_state(2, r);

    double dist = trace_distance(liou.rho_atoms, crf_sol.rho);
    report.items.push_back(make_item("atomic state trace distance", dist, 0.01,
                                     "cavity model vs adiabatic collective model"));
    report.items.push_back(make_item("inversion mismatch",
                                     std::abs(liou.jz_norm - crf_sol.jz_norm), 0.01,
                                     "2<Jz>/N from both models"));
    report.items.push_back(make_item("top Fock population",
                                     liou.top_fock_population, 1e-6,
                                     "photon-space truncation control"));
}

void check_meanfield_convergence(OracleCheckReport& report) {
    const double r = 0.5;
    const double jz_mf = -std::sqrt(1.0 - r * r);
    const int sizes[] = {10, 30, 100};
    std::vector<double> devs;
    for (int n : sizes) {
        CrfSolution sol = crf_exact_steady_state(n, r);
        double dev = std::abs(sol.jz_norm - jz_mf);
        devs.push_back(dev);
        char name[96];
        std::snprintf(name, sizeof name, "mean-field deviation N=%d", n);
        report.items.push_back(
            make_item(name, dev, 0.02, "|2<Jz>/N - jz_meanfield| at r=0.5"));
    }
    bool monotone = devs[0] > devs[1] && devs[1] > devs[2];
    OracleCheckItem item;
    item.name = "deviation shrinks with N";
    item.measured = devs[2];
    item.threshold = devs[0];
    item.detail = "1/N scaling of the exact-vs-mean-field gap";
    item.pass = monotone;
    report.items.push_back(item);
}

void check_hp_squeezing(OracleCheckReport& report) {
    const double r = 0.6;
    const int sizes[] = {20, 60, 100};
    std::vector<double> devs;
    for (int n : sizes) {
        CrfSolution sol = crf_exact_steady_state(n, r);
        double hp = hp_squeezing(r, n);
        double rel = std::abs(sol.jx2 - hp) / hp;
        devs.push_back(rel);
        char name[96], detail[128];
        std::snprintf(name, sizeof name, "squeezing deviation N=%d", n);
        std::snprintf(detail, sizeof detail, "<Jx^2> exact %.6g vs linearized %.6g",
                      sol.jx2, hp);
        report.items.push_back(make_item(name, rel, 0.10, detail));
    }
    bool monotone = devs[0] > devs[1] && devs[1] > devs[2];
    OracleCheckItem item;
    item.name = "deviation shrinks with N";
    item.measured = devs[2];
    item.threshold = devs[0];
    item.detail = "linearized variance becomes exact for large N";
    item.pass = monotone;
    report.items.push_back(item);
}

} // namespace

OracleCheckReport run_oracle_check(OracleSuite suite) {
    OracleCheckReport report;
    report.suite = suite;
    switch (suite) {
        case OracleSuite::GeneratorResidual: check_generator_residual(report); break;
        case OracleSuite::AdiabaticEquivalence: check_adiabatic_equivalence(report); break;
        case OracleSuite::MeanfieldConvergence: check_meanfield_convergence(report); break;
        case OracleSuite::HpSqueezing: check_hp_squeezing(report); break;
    }
    report.all_pass = std::all_of(report.items.begin(), report.items.end(),
                                  [](const OracleCheckItem& i) { return i.pass; });
    return report;
}

nlohmann::json oracle_report_to_json(const OracleCheckReport& report) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : report.items) {
        items.push_back({{"name", item.name},
                         {"pass", item.pass},
                         {"measured", item.measured},
                         {"threshold", item.threshold},
                         {"detail", item.detail}});
    }
    return {{"suite", to_string(report.suite)},
            {"all_pass", report.all_pass},
            {"items", items}};
}

SweepSpec sweep_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SpecError("manifest must be a JSON object");
    reject_unknown(doc, {"params", "protocol", "grid", "sweep"}, "manifest");

    SweepSpec spec;
    if (doc.contains("params")) spec.base_params = params_from_json(doc.at("params"));
    if (doc.contains("protocol"))
        spec.protocol = protocol_from_json(doc.at("protocol"));

    if (doc.contains("grid")) {
        const auto& grid = doc.at("grid");
        reject_unknown(grid, {"n_phi", "n_delta"}, "grid");
        spec.n_phi = static_cast<int>(get_number(grid, "n_phi", spec.n_phi));
        spec.n_delta = static_cast<int>(get_number(grid, "n_delta", spec.n_delta));
    }

    if (doc.contains("sweep")) {
        const auto& sw = doc.at("sweep");
        reject_unknown(sw,
                       {"axis", "values", "values_unit", "outputs", "tail_fraction",
                        "n_samples", "omega_d_ratio"},
                       "sweep");
        if (!sw.contains("axis")) throw SpecError("sweep section needs an axis");
        spec.axis = sweep_axis_from_string(get_string(sw, "axis"));
        if (!sw.contains("values") || !sw.at("values").is_array())
            throw SpecError("sweep section needs a values array");
        for (const auto& v : sw.at("values")) {
            if (!v.is_number()) throw SpecError("sweep values must be numbers");
            spec.values.push_back(v.get<double>());
        }
        if (sw.contains("values_unit"))
            spec.values_unit = values_unit_from_string(get_string(sw, "values_unit"));
        if (sw.contains("outputs")) {
            const auto& out = sw.at("outputs");
            reject_unknown(out, {"jz", "transmission", "trajectory", "steady_state"},
                           "outputs");
            spec.outputs.jz = get_bool(out, "jz", spec.outputs.jz);
            spec.outputs.transmission =
                get_bool(out, "transmission", spec.outputs.transmission);
            spec.outputs.trajectory =
                get_bool(out, "trajectory", spec.outputs.trajectory);
            spec.outputs.steady_state =
                get_bool(out, "steady_state", spec.outputs.steady_state);
        }
        spec.tail_fraction = get_number(sw, "tail_fraction", spec.tail_fraction);
        spec.n_samples = static_cast<int>(get_number(sw, "n_samples", spec.n_samples));
        spec.omega_d_ratio = get_number(sw, "omega_d_ratio", spec.omega_d_ratio);
    }
    return spec;
}

CsvTable sweep_result_to_csv(const SweepResult& result) {
    CsvTable table;
    table.header = {"value",   "omega_d_2pi_hz",    "ok",
                    "error",   "jz_final",          "jz_tail",
                    "transmission_tail", "ss_exists", "ss_jz", "trajectory_file"};
    for (const auto& row : result.rows) {
        table.rows.push_back({format_double(row.value),
                              format_double(to_2pi_hz(row.omega_d)),
                              row.ok ? "1" : "0", row.error,
                              format_double(row.jz_final),
                              format_double(row.jz_tail),
                              format_double(row.transmission_tail),
                              row.ss_exists ? "1" : "0", format_double(row.ss_jz),
                              row.trajectory_file});
    }
    return table;
}

} // namespace crf
