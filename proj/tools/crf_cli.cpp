// Command-line front end: sweeps, single traces, the critical-drive table,
// oracle cross-checks and SVG plots, all driven by JSON manifests with
// dotted-flag overrides (--params.kappa_2pi_hz 160e3 rewrites params.kappa_2pi_hz
// before the manifest is parsed).
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crf/errors.hpp"
#include "crf/io.hpp"
#include "crf/steady_state.hpp"
#include "crf/svg.hpp"
#include "crf/sweep.hpp"

namespace {

using nlohmann::json;

void apply_overrides(json& doc, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string tok = extras[i];
        if (tok.rfind("--", 0) != 0)
            throw crf::SpecError("unexpected argument \"" + tok + "\"");
        tok = tok.substr(2);
        std::string value;
        auto eq = tok.find('=');
        if (eq != std::string::npos) {
            value = tok.substr(eq + 1);
            tok = tok.substr(0, eq);
        } else {
            if (++i >= extras.size())
                throw crf::SpecError("override --" + tok + " needs a value");
            value = extras[i];
        }
        json* node = &doc;
        std::size_t start = 0;
        for (;;) {
            auto dot = tok.find('.', start);
            std::string key = tok.substr(
                start, dot == std::string::npos ? std::string::npos : dot - start);
            if (key.empty()) throw crf::SpecError("bad override path --" + tok);
            if (dot == std::string::npos) {
                json parsed;
                try {
                    parsed = json::parse(value);
                } catch (const json::exception&) {
                    parsed = value;  // bare strings (e.g. ramp) stay strings
                }
                (*node)[key] = parsed;
                break;
            }
            node = &(*node)[key];
            start = dot + 1;
        }
    }
}

json load_config(const std::string& path, const std::vector<std::string>& extras) {
    json doc = json::object();
    if (!path.empty()) doc = json::parse(crf::read_text_file(path));
    const bool params_from_file = doc.contains("params");
    apply_overrides(doc, extras);
    // flag names already carry the _2pi_hz suffix, so a params group built
    // purely from --params.* overrides gets the units tag for free; a config
    // file must still declare it itself
    if (!params_from_file && doc.contains("params") &&
        !doc["params"].contains("units"))
        doc["params"]["units"] = "2pi_hz";
    return doc;
}

int col_index(const crf::CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return static_cast<int>(i);
    throw crf::SpecError("input table has no column \"" + name + "\"");
}

std::vector<crf::PlotPoint> table_points(const crf::CsvTable& table,
                                         const std::string& xcol,
                                         const std::string& ycol, double xscale) {
    const int xi = col_index(table, xcol);
    const int yi = col_index(table, ycol);
    std::vector<crf::PlotPoint> pts;
    for (const auto& row : table.rows) {
        double x = std::stod(row[static_cast<std::size_t>(xi)]);
        double y = std::stod(row[static_cast<std::size_t>(yi)]);
        if (std::isfinite(x) && std::isfinite(y)) pts.push_back({x * xscale, y});
    }
    return pts;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& extras,
              const std::string& out, std::string trajectory_dir, int jobs) {
    crf::SweepSpec spec = crf::sweep_spec_from_json(load_config(config, extras));
    if (spec.outputs.trajectory && trajectory_dir.empty())
        trajectory_dir =
            std::filesystem::path(out).replace_extension("").string() + "_traj";
    crf::SweepResult result = crf::run_sweep(spec, trajectory_dir, jobs);
    crf::write_csv(out, crf::sweep_result_to_csv(result));

    std::size_t failed = 0;
    for (const auto& row : result.rows)
        if (!row.ok) {
            ++failed;
            std::fprintf(stderr, "point %.6g failed: %s\n", row.value,
                         row.error.c_str());
        }
    std::printf("wrote %s (%zu points, %zu failed)\n", out.c_str(),
                result.rows.size(), failed);
    if (failed == result.rows.size()) {
        std::fprintf(stderr, "every sweep point failed\n");
        return 2;
    }
    return 0;
}

int cmd_trace(const std::string& config, const std::vector<std::string>& extras,
              const std::string& out, int samples, int jobs) {
    if (jobs > 0) crf::set_threads(jobs);
    crf::SweepSpec spec = crf::sweep_spec_from_json(load_config(config, extras));
    crf::resolve_single_point(spec);  // a one-value sweep group pins the drive
    const int n_samples = samples > 0 ? samples : spec.n_samples;
    crf::Trajectory traj = crf::run_trace(spec.base_params, spec.protocol,
                                          spec.n_phi, spec.n_delta, n_samples);
    crf::write_trajectory_csv(out, traj);
    const crf::Observables& last = traj.observables.back();
    std::printf("wrote %s (%zu samples)\n", out.c_str(), traj.times.size());
    std::printf("final: jz_weighted = %+.6f, transmission = %.6g\n",
                last.j_z_weighted, last.transmission);
    return 0;
}

int cmd_table(const std::string& config, const std::vector<std::string>& extras,
              const std::string& out, bool no_dynamic) {
    crf::SweepSpec spec = crf::sweep_spec_from_json(load_config(config, extras));
    crf::EnsembleGrid grid =
        crf::ensemble_grid(spec.n_phi, spec.n_delta, spec.base_params);
    std::vector<crf::CriticalTableRow> rows =
        crf::critical_table(spec.base_params, grid, !no_dynamic);

    std::printf("critical drive thresholds (units of the uniform-coupling "
                "lossless value)\n");
    std::printf("  %-36s %9s %10s\n", "regime", "computed", "reference");
    for (const auto& row : rows)
        std::printf("  %-36s %9.4f %10.2f\n", row.label.c_str(), row.value,
                    row.reference);

    if (!out.empty()) {
        crf::CsvTable table;
        table.header = {"regime", "value", "reference"};
        for (const auto& row : rows)
            table.rows.push_back({row.label, crf::format_double(row.value),
                                  crf::format_double(row.reference)});
        crf::write_csv(out, table);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_oracle(const std::string& suite_name, const std::string& out) {
    std::vector<crf::OracleSuite> suites;
    if (suite_name == "all") {
        suites = {crf::OracleSuite::GeneratorResidual,
                  crf::OracleSuite::AdiabaticEquivalence,
                  crf::OracleSuite::MeanfieldConvergence,
                  crf::OracleSuite::HpSqueezing};
    } else {
        suites = {crf::oracle_suite_from_string(suite_name)};
    }

    bool all_pass = true;
    json reports = json::array();
    for (crf::OracleSuite suite : suites) {
        crf::OracleCheckReport report = crf::run_oracle_check(suite);
        reports.push_back(crf::oracle_report_to_json(report));
        all_pass = all_pass && report.all_pass;
        std::printf("%s:\n", crf::to_string(suite).c_str());
        for (const auto& item : report.items)
            std::printf("  [%s] %s (measured %.3e, threshold %.3e)\n",
                        item.pass ? "PASS" : "FAIL", item.name.c_str(),
                        item.measured, item.threshold);
    }
    std::printf("oracle checks: %s\n", all_pass ? "all passed" : "FAILED");

    if (!out.empty()) {
        json doc = {{"all_pass", all_pass}, {"reports", reports}};
        crf::write_text_file(out, doc.dump(2) + "\n");
        std::printf("wrote %s\n", out.c_str());
    }
    return all_pass ? 0 : 3;
}

int cmd_plot(const std::string& input, const std::string& out, std::string style) {
    crf::CsvTable table = crf::read_csv(input);
    if (style == "auto") {
        bool has_time = false;
        for (const auto& h : table.header)
            if (h == "t_s") has_time = true;
        style = has_time ? "trace" : "sweep";
    }

    crf::PlotSpec spec;
    std::vector<crf::Series> series;
    if (style == "trace") {
        spec.title = "drive-and-hold trajectory";
        spec.xlabel = "time (us)";
        spec.ylabel = "weighted inversion 2Jz/N";
        series.push_back({"2Jz/N", table_points(table, "t_s", "jz_weighted", 1e6),
                          "#1f6fb2", true, false});
    } else if (style == "sweep") {
        spec.title = "drive sweep";
        spec.xlabel = "drive (sweep units)";
        spec.ylabel = "tail-averaged 2Jz/N";
        series.push_back({"simulation", table_points(table, "value", "jz_tail", 1.0),
                          "#1f6fb2", true, true});
    } else if (style == "transmission") {
        spec.title = "cavity transmission";
        spec.xlabel = "drive (sweep units)";
        spec.ylabel = "tail-averaged transmission";
        series.push_back({"simulation",
                          table_points(table, "value", "transmission_tail", 1.0),
                          "#1f6fb2", true, true});
    } else if (style == "sweep_ideal" || style == "phase") {
        // sweep points plus the matching lossless stationary branch. For
        // sweep_ideal the x axis is in units of the finite-time threshold
        // (0.70 of the uniform-coupling lossless value) and the overlay is
        // the cosine-coupling branch; for phase the x axis is in units of
        // the lossless value itself and the overlay is the uniform branch.
        spec.title = style == "phase" ? "phase diagram" : "drive sweep";
        spec.xlabel = style == "phase" ? "drive / lossless threshold"
                                       : "drive / finite-time threshold";
        spec.ylabel = "tail-averaged 2Jz/N";
        std::vector<crf::PlotPoint> pts =
            table_points(table, "value", "jz_tail", 1.0);
        double x_max = 0.0;
        for (const auto& p : pts) x_max = std::max(x_max, p.x);
        std::vector<crf::PlotPoint> branch;
        crf::PhysicalParams params;
        for (int i = 0; i <= 400; ++i) {
            double x = x_max * i / 400.0;
            double jz;
            if (style == "phase") {
                jz = x <= 1.0 ? -std::sqrt(1.0 - x * x) : 0.0;
            } else {
                crf::SteadyStateSolution sol =
                    crf::ss_ideal_inhomog(crf::omega_c_over_omega_c_h * x, params);
                if (!sol.exists) continue;
                jz = *sol.j_z_weighted;
            }
            branch.push_back({x, jz});
        }
        series.push_back({"lossless branch", branch, "#777777", true, false});
        series.push_back({"simulation", pts, "#1f6fb2", false, true});
    } else {
        throw crf::SpecError("unknown plot style \"" + style + "\"");
    }

    crf::write_text_file(out, crf::render_plot(spec, series));
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven atom-cavity ensemble simulator"};
    app.require_subcommand(1);

    std::string sweep_config, sweep_out = "sweep.csv", trajectory_dir;
    std::string trace_config, trace_out = "trace.csv";
    std::string table_config, table_out;
    std::string suite = "all", oracle_out;
    std::string input, plot_out = "plot.svg", style = "auto";
    int jobs = 0, samples = 0;
    bool no_dynamic = false;

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep manifest");
    sweep->add_option("--config", sweep_config, "JSON manifest")->required();
    sweep->add_option("--out", sweep_out, "output CSV path")->capture_default_str();
    sweep->add_option("--jobs", jobs, "worker threads (0 = all)");
    sweep->add_option("--trajectory-dir", trajectory_dir,
                      "directory for per-point trajectory CSVs");
    sweep->allow_extras();

    CLI::App* trace = app.add_subcommand("trace", "integrate a single trajectory");
    trace->add_option("--config", trace_config, "JSON manifest");
    trace->add_option("--out", trace_out, "output CSV path")->capture_default_str();
    trace->add_option("--samples", samples, "number of output samples");
    trace->add_option("--jobs", jobs, "kernel threads (0 = default)");
    trace->allow_extras();

    CLI::App* table = app.add_subcommand("table", "critical-drive threshold table");
    table->add_option("--config", table_config, "JSON manifest");
    table->add_option("--out", table_out, "also write the table as CSV");
    table->add_flag("--no-dynamic", no_dynamic,
                    "skip the finite-time threshold search");
    table->allow_extras();

    CLI::App* oracle = app.add_subcommand("oracle", "run exact-model cross-checks");
    oracle->add_option("--suite", suite,
                       "generator_residual, adiabatic_equivalence, "
                       "meanfield_convergence, hp_squeezing or all");
    oracle->add_option("--out", oracle_out, "write the JSON report here");

    CLI::App* plot = app.add_subcommand("plot", "render a CSV as an SVG plot");
    plot->add_option("--input", input, "CSV produced by sweep or trace")->required();
    plot->add_option("--out", plot_out, "output SVG path")->capture_default_str();
    plot->add_option("--style", style,
                     "auto, trace, sweep, transmission, sweep_ideal or phase");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*sweep)
            return cmd_sweep(sweep_config, sweep->remaining(), sweep_out,
                             trajectory_dir, jobs);
        if (*trace)
            return cmd_trace(trace_config, trace->remaining(), trace_out, samples,
                             jobs);
        if (*table)
            return cmd_table(table_config, table->remaining(), table_out, no_dynamic);
        if (*oracle) return cmd_oracle(suite, oracle_out);
        if (*plot) return cmd_plot(input, plot_out, style);
    } catch (const crf::SpecError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const crf::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const crf::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
