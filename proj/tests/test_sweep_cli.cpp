#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "crf/errors.hpp"
#include "crf/io.hpp"
#include "crf/parallel.hpp"
#include "crf/params.hpp"
#include "crf/sweep.hpp"
#include "crf/units.hpp"

using namespace crf;
using doctest::Approx;

namespace {

std::string scratch(const std::string& name) {
    std::filesystem::create_directories("cli_scratch");
    return "cli_scratch/" + name;
}

nlohmann::json tiny_manifest() {
    return {
        {"params", {{"units", "2pi_hz"}, {"n_atoms", 10000.0}}},
        {"protocol", {{"shape", "Ramp"}, {"t_ramp_s", 2e-6}, {"t_hold_s", 6e-6}}},
        {"grid", {{"n_phi", 4}, {"n_delta", 3}}},
        {"sweep",
         {{"axis", "omega_d"},
          {"values", {0.1, 0.5, 0.8}},
          {"values_unit", "omega_c_h"},
          {"outputs", {{"steady_state", true}}},
          {"tail_fraction", 0.5},
          {"n_samples", 60}}},
    };
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("\"") + CRF_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("axis and unit names round trip") {
    for (SweepAxis axis : {SweepAxis::OmegaD, SweepAxis::AtomNumber,
                           SweepAxis::DetuningCa, SweepAxis::DriveDuration,
                           SweepAxis::DeltaMax})
        CHECK(sweep_axis_from_string(to_string(axis)) == axis);
    for (ValuesUnit unit :
         {ValuesUnit::TwoPiHz, ValuesUnit::OmegaCH, ValuesUnit::OmegaC})
        CHECK(values_unit_from_string(to_string(unit)) == unit);
    CHECK(sweep_axis_from_string("omega_d") == SweepAxis::OmegaD);
    CHECK(values_unit_from_string("2pi_hz") == ValuesUnit::TwoPiHz);
    CHECK_THROWS_AS(sweep_axis_from_string("banana"), SpecError);
    CHECK_THROWS_AS(values_unit_from_string("hz"), SpecError);
}

TEST_CASE("sweep manifests parse completely and reject typos") {
    SweepSpec spec = sweep_spec_from_json(tiny_manifest());
    CHECK(spec.axis == SweepAxis::OmegaD);
    CHECK(spec.values == std::vector<double>{0.1, 0.5, 0.8});
    CHECK(spec.values_unit == ValuesUnit::OmegaCH);
    CHECK(spec.base_params.n_atoms == Approx(10000.0));
    CHECK(spec.protocol.shape == DriveShape::Ramp);
    CHECK(spec.protocol.t_hold == Approx(6e-6));
    CHECK(spec.n_phi == 4);
    CHECK(spec.n_delta == 3);
    CHECK(spec.tail_fraction == Approx(0.5));
    CHECK(spec.n_samples == 60);
    CHECK(spec.outputs.steady_state);
    CHECK(spec.outputs.jz);           // defaults survive a partial outputs block
    CHECK(!spec.outputs.trajectory);
    CHECK(spec.omega_d_ratio == Approx(-1.0));

    nlohmann::json bad = tiny_manifest();
    bad["sweeep"] = 1;
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["sweep"]["tailfraction"] = 0.5;
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["sweep"]["outputs"]["transmision"] = true;
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["grid"]["nphi"] = 8;
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["sweep"].erase("axis");
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["sweep"].erase("values");
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);

    bad = tiny_manifest();
    bad["sweep"]["values"] = {0.1, "half"};
    CHECK_THROWS_AS(sweep_spec_from_json(bad), SpecError);
}

TEST_CASE("a small drive sweep crosses the transition in order") {
    SweepSpec spec = sweep_spec_from_json(tiny_manifest());
    SweepResult result = run_sweep(spec, "", 1);
    REQUIRE(result.rows.size() == 3);

    const double och = derive_params(spec.base_params).omega_c_h;
    for (std::size_t i = 0; i < 3; ++i) {
        const SweepRow& row = result.rows[i];
        CAPTURE(i);
        CHECK(row.ok);
        CHECK(row.error.empty());
        CHECK(row.value == Approx(spec.values[i]));
        CHECK(row.omega_d == Approx(spec.values[i] * och).epsilon(1e-14));
        CHECK(row.trajectory_file.empty());
    }

    // below threshold the atoms stay inverted-down and dark; above it the
    // collective emission collapses and light gets through
    CHECK(result.rows[0].jz_tail < -0.8);
    CHECK(result.rows[2].jz_tail > result.rows[0].jz_tail + 0.2);
    CHECK(result.rows[2].transmission_tail > result.rows[0].transmission_tail);

    // stationary branch exists only below the broadened critical drive
    CHECK(result.rows[0].ss_exists);
    CHECK(result.rows[0].ss_jz < -0.8);
    CHECK(!result.rows[1].ss_exists);
    CHECK(!result.rows[2].ss_exists);
}

TEST_CASE("sweep rows do not depend on the worker count") {
    SweepSpec spec = sweep_spec_from_json(tiny_manifest());
    SweepResult serial = run_sweep(spec, "", 1);
    SweepResult parallel = run_sweep(spec, "", 4);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CAPTURE(i);
        CHECK(serial.rows[i].value == parallel.rows[i].value);
        CHECK(serial.rows[i].omega_d == parallel.rows[i].omega_d);
        CHECK(serial.rows[i].ok == parallel.rows[i].ok);
        CHECK(serial.rows[i].jz_final == parallel.rows[i].jz_final);
        CHECK(serial.rows[i].jz_tail == parallel.rows[i].jz_tail);
        CHECK(serial.rows[i].transmission_tail ==
              parallel.rows[i].transmission_tail);
        CHECK(serial.rows[i].ss_exists == parallel.rows[i].ss_exists);
        CHECK(serial.rows[i].ss_jz == parallel.rows[i].ss_jz);
    }
}

TEST_CASE("one bad point fails alone without poisoning the sweep") {
    nlohmann::json doc = tiny_manifest();
    doc["sweep"]["axis"] = "atom_number";
    doc["sweep"]["values"] = {100.0, -5.0, 200.0};
    doc["sweep"]["values_unit"] = "2pi_hz";  // ignored for this axis
    doc["sweep"]["omega_d_ratio"] = 0.3;
    doc["sweep"]["outputs"] = {{"steady_state", false}};
    SweepResult result = run_sweep(sweep_spec_from_json(doc), "", 2);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].ok);
    CHECK(!result.rows[1].ok);
    CHECK(!result.rows[1].error.empty());
    CHECK(result.rows[2].ok);
    CHECK(result.rows[0].value == Approx(100.0));
    CHECK(result.rows[2].value == Approx(200.0));
}

TEST_CASE("malformed sweep requests are rejected up front") {
    SweepSpec spec = sweep_spec_from_json(tiny_manifest());
    spec.values.clear();
    CHECK_THROWS_AS(run_sweep(spec), SpecError);

    spec = sweep_spec_from_json(tiny_manifest());
    spec.values[1] = std::nan("");
    CHECK_THROWS_AS(run_sweep(spec), SpecError);

    spec = sweep_spec_from_json(tiny_manifest());
    spec.tail_fraction = 0.0;
    CHECK_THROWS_AS(run_sweep(spec), SpecError);

    spec = sweep_spec_from_json(tiny_manifest());
    spec.n_samples = 1;
    CHECK_THROWS_AS(run_sweep(spec), SpecError);

    // a drive sweep with a per-point drive ratio contradicts itself
    spec = sweep_spec_from_json(tiny_manifest());
    spec.omega_d_ratio = 0.3;
    CHECK_THROWS_AS(run_sweep(spec), SpecError);

    spec = sweep_spec_from_json(tiny_manifest());
    spec.outputs.trajectory = true;
    CHECK_THROWS_AS(run_sweep(spec, "", 1), SpecError);  // nowhere to write
}

TEST_CASE("blocked reductions are deterministic and accurate") {
    const std::size_t n = 12800;
    auto term = [](std::size_t i) {
        return std::sin(1e-3 * static_cast<double>(i)) +
               1.0 / (1.0 + static_cast<double>(i));
    };
    const double serial = blocked_sum(n, term, ExecMode::Serial);
    const double parallel = blocked_sum(n, term, ExecMode::Parallel);
    const double automatic = blocked_sum(n, term, ExecMode::Auto);
    CHECK(serial == parallel);  // bitwise, not approximately
    CHECK(serial == automatic);

    double naive = 0.0;
    for (std::size_t i = 0; i < n; ++i) naive += term(i);
    CHECK(serial == Approx(naive).epsilon(1e-12));

    auto term2 = [](std::size_t i, double& a, double& b) {
        a += std::cos(1e-2 * static_cast<double>(i));
        b += 1.0 / (1.0 + static_cast<double>(i));
    };
    double sa = 0.0, sb = 0.0, pa = 0.0, pb = 0.0;
    blocked_sum2(n, term2, sa, sb, ExecMode::Serial);
    blocked_sum2(n, term2, pa, pb, ExecMode::Parallel);
    CHECK(sa == pa);
    CHECK(sb == pb);
    CHECK(sb == blocked_sum(n, [](std::size_t i) {
              return 1.0 / (1.0 + static_cast<double>(i));
          }, ExecMode::Serial));

    std::vector<double> squares(10000, 0.0);
    parallel_for(squares.size(), [&](std::size_t i) {
        squares[i] = static_cast<double>(i) * static_cast<double>(i);
    }, ExecMode::Parallel);
    bool all_good = true;
    for (std::size_t i = 0; i < squares.size(); ++i)
        all_good = all_good && squares[i] == static_cast<double>(i) * i;
    CHECK(all_good);
}

TEST_CASE("single traces sample the full drive window uniformly") {
    PhysicalParams p;
    DriveProtocol proto;
    proto.shape = DriveShape::Ramp;
    proto.omega_d = 0.3 * derive_params(p).omega_c_h;
    proto.t_ramp = 2e-6;
    proto.t_hold = 6e-6;
    Trajectory traj = run_trace(p, proto, 4, 3, 25);
    REQUIRE(traj.times.size() == 25);
    REQUIRE(traj.observables.size() == 25);
    REQUIRE(traj.states.size() == 25);  // states kept so the CSV exists
    CHECK(traj.times.front() == Approx(0.0));
    CHECK(traj.times.back() == Approx(6e-6).epsilon(1e-12));
    CHECK(traj.times[12] == Approx(3e-6).epsilon(1e-9));
    CHECK_THROWS_AS(run_trace(p, proto, 4, 3, 1), SpecError);
}

TEST_CASE("a one-value sweep group pins the drive for a trace") {
    nlohmann::json doc = tiny_manifest();
    doc["sweep"]["values"] = {0.5};

    SweepSpec spec = sweep_spec_from_json(doc);
    resolve_single_point(spec);
    CHECK(spec.values.empty());
    CHECK(spec.protocol.omega_d ==
          Approx(0.5 * derive_params(spec.base_params).omega_c_h));

    // no sweep values at all is fine; several values are a sweep, not a trace
    SweepSpec bare = sweep_spec_from_json(doc);
    bare.values.clear();
    const double omega_before = bare.protocol.omega_d;
    resolve_single_point(bare);
    CHECK(bare.protocol.omega_d == omega_before);
    SweepSpec many = sweep_spec_from_json(tiny_manifest());
    CHECK_THROWS_AS(resolve_single_point(many), SpecError);

    const std::string manifest = scratch("one_point.json");
    write_text_file(manifest, doc.dump(2));
    const std::string out = scratch("one_point_trace.csv");
    REQUIRE(run_cli("trace --config " + manifest + " --out " + out) == 0);
    CsvTable trace = read_csv(out);
    REQUIRE(trace.rows.size() == 60);
    // the resolved drive pushes the ensemble off the ground state; with the
    // sweep group ignored this column froze at -1 and transmission at 0
    const double jz_final = std::strtod(trace.rows.back()[3].c_str(), nullptr);
    const double tr_final = std::strtod(trace.rows.back()[4].c_str(), nullptr);
    CHECK(jz_final > -0.99);
    CHECK(jz_final < 0.0);
    CHECK(tr_final > 0.0);

    const std::string many_path = scratch("many_points.json");
    write_text_file(many_path, tiny_manifest().dump(2));
    CHECK(run_cli("trace --config " + many_path + " --out " + out) == 1);
}

TEST_CASE("exact-model cross-check suites pass end to end") {
    OracleCheckReport mf = run_oracle_check(OracleSuite::MeanfieldConvergence);
    CHECK(mf.all_pass);
    CHECK(mf.items.size() >= 3);
    for (const auto& item : mf.items) {
        CAPTURE(item.name);
        CHECK(item.pass == (std::isfinite(item.measured) &&
                            item.measured < item.threshold));
    }

    OracleCheckReport gen = run_oracle_check(OracleSuite::GeneratorResidual);
    CHECK(gen.all_pass);

    nlohmann::json doc = oracle_report_to_json(gen);
    CHECK(doc.at("suite") == "generator_residual");
    CHECK(doc.at("all_pass").get<bool>());
    CHECK(doc.at("items").size() == gen.items.size());
}

TEST_CASE("command line: threshold table") {
    const std::string out = scratch("table.csv");
    REQUIRE(run_cli("table --no-dynamic --out " + out) == 0);
    CsvTable table = read_csv(out);
    REQUIRE(table.header == std::vector<std::string>{"regime", "value", "reference"});
    REQUIRE(table.rows.size() == 5);  // dynamic row skipped
    CHECK(std::strtod(table.rows[0][1].c_str(), nullptr) == Approx(1.0));
    CHECK(std::strtod(table.rows.back()[1].c_str(), nullptr) ==
          Approx(0.26).epsilon(0.05));
}

TEST_CASE("command line: sweep output is byte-identical across job counts") {
    const std::string manifest = scratch("tiny_sweep.json");
    write_text_file(manifest, tiny_manifest().dump(2));
    const std::string out_a = scratch("sweep_a.csv");
    const std::string out_b = scratch("sweep_b.csv");
    REQUIRE(run_cli("sweep --config " + manifest + " --jobs 1 --out " + out_a) == 0);
    REQUIRE(run_cli("sweep --config " + manifest + " --jobs 4 --out " + out_b) == 0);
    CHECK(read_text_file(out_a) == read_text_file(out_b));

    CsvTable table = read_csv(out_a);
    REQUIRE(table.header.size() == 10);
    CHECK(table.header[0] == "value");
    CHECK(table.header[1] == "omega_d_2pi_hz");
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) CHECK(row[2] == "1");  // ok column
}

TEST_CASE("command line: sweep can archive every trajectory") {
    nlohmann::json doc = tiny_manifest();
    doc["sweep"]["values"] = {0.1, 0.5};
    doc["sweep"]["outputs"] = {{"trajectory", true}};
    doc["sweep"]["n_samples"] = 40;
    const std::string manifest = scratch("traj_sweep.json");
    write_text_file(manifest, doc.dump(2));
    const std::string out = scratch("traj_sweep.csv");
    REQUIRE(run_cli("sweep --config " + manifest + " --out " + out +
                    " --trajectory-dir cli_scratch/traj") == 0);
    REQUIRE(std::filesystem::exists("cli_scratch/traj/trajectory_000.csv"));
    REQUIRE(std::filesystem::exists("cli_scratch/traj/trajectory_001.csv"));
    CsvTable traj = read_csv("cli_scratch/traj/trajectory_001.csv");
    CHECK(traj.rows.size() == 40);
    CHECK(traj.header.front() == "t_s");

    CsvTable table = read_csv(out);
    CHECK(table.rows[0].back() == "cli_scratch/traj/trajectory_000.csv");
}

TEST_CASE("command line: trace, overrides and plot") {
    const std::string trace_out = scratch("trace.csv");
    REQUIRE(run_cli("trace --protocol.omega_d_2pi_hz 2e6 --protocol.t_hold_s 6e-6"
                    " --protocol.t_ramp_s 2e-6 --params.n_atoms 5000"
                    " --grid.n_phi 4 --grid.n_delta 3 --samples 30 --out " +
                    trace_out) == 0);
    CsvTable trace = read_csv(trace_out);
    REQUIRE(trace.rows.size() == 30);
    CHECK(trace.header.front() == "t_s");

    const std::string svg_out = scratch("trace.svg");
    REQUIRE(run_cli("plot --input " + trace_out + " --out " + svg_out) == 0);
    const std::string svg = read_text_file(svg_out);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("command line: oracle suite") {
    const std::string out = scratch("oracle.json");
    REQUIRE(run_cli("oracle --suite meanfield_convergence --out " + out) == 0);
    nlohmann::json doc = nlohmann::json::parse(read_text_file(out));
    CHECK(doc.at("all_pass").get<bool>());
}

TEST_CASE("command line: failures exit with the documented codes") {
    // spec/usage problems exit 1
    CHECK(run_cli("sweep --config cli_scratch/no_such_file.json --out x.csv") == 1);

    const std::string mangled = scratch("mangled.json");
    write_text_file(mangled, "{ not json");
    CHECK(run_cli("sweep --config " + mangled + " --out x.csv") == 1);

    nlohmann::json doc = tiny_manifest();
    doc["sweep"]["axis"] = "banana";
    const std::string bad_axis = scratch("bad_axis.json");
    write_text_file(bad_axis, doc.dump(2));
    CHECK(run_cli("sweep --config " + bad_axis + " --out x.csv") == 1);

    CHECK(run_cli("trace --params.n_atoms -3 --out cli_scratch/x.csv") == 1);
    CHECK(run_cli("plot --input cli_scratch/no_such_table.csv --out x.svg") == 1);

    // every point failing is a numerical failure, exit 2
    nlohmann::json all_bad = tiny_manifest();
    all_bad["sweep"]["axis"] = "atom_number";
    all_bad["sweep"]["values"] = {-5.0, -6.0};
    all_bad["sweep"]["omega_d_ratio"] = 0.3;
    const std::string all_bad_path = scratch("all_bad.json");
    write_text_file(all_bad_path, all_bad.dump(2));
    CHECK(run_cli("sweep --config " + all_bad_path + " --out " +
                  scratch("all_bad.csv")) == 2);
}
