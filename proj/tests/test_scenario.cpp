#include "lrcert/scenario.hpp"

#include "testkit.hpp"

#include <cmath>
#include <tuple>

using namespace lrcert;
using testkit::check;
using testkit::check_near;
using testkit::check_throws;

namespace {

const char* kMinimalConfig = R"({
  "lattice": {"kind": "path", "dims": [8]},
  "model": {"model": "tfim", "J": 1.0, "h": 1.0},
  "observables": {"A": {"site": 0, "pauli": "z"}, "B": {"site": 7, "pauli": "z"}}
})";

void test_defaults() {
  const ScenarioConfig config = parse_config(kMinimalConfig);
  check_near(config.profile_p, 2.0, 0.0, "default exponent p = d + 1");
  check(config.tilts == std::vector<double>({0.0, 0.5, 1.0}), "default tilt list");
  check(config.seed == 0, "default seed");
  check(config.times.size() == 50, "default time grid size");
  check_near(config.times.front(), 0.0, 0.0, "default grid starts at 0");
  check_near(config.times.back(), 3.0, 0.0, "default grid ends at 3");
  check(config.epsilons == std::vector<double>({0.0, 1.0, 2.0, 3.0}), "default epsilons");
  check(config.dim_cap == 4096, "default dimension cap");
}

void test_validation_paths() {
  try {
    parse_config(R"({
      "lattice": {"kind": "path", "dims": [8]},
      "observables": {"A": {"site": 99, "pauli": "z"}}
    })");
    check(false, "out-of-range site must be rejected");
  } catch (const ConfigError& e) {
    check(e.path() == ".observables.A.site", "error names the site path, got " + e.path());
    check(std::string(e.what()).find("valid ids are 0..7") != std::string::npos,
          "error lists the valid id range");
  }

  check_throws([] { parse_config("{ not json"); }, "malformed JSON rejected");
  check_throws([] { parse_config(R"({"lattice": {"kind": "moebius", "dims": [4]}})"); },
               "unknown lattice kind rejected");
  check_throws([] { parse_config(R"({"lattice": {"kind": "path", "dims": [4]}, "typo": 1})"); },
               "unknown top-level field rejected");
  check_throws(
      [] {
        parse_config(R"({"lattice": {"kind": "path", "dims": [4]},
                         "times": [0.0, 1.0, 1.0]})");
      },
      "non-increasing time grid rejected");
  check_throws(
      [] {
        parse_config(R"({"lattice": {"kind": "path", "dims": [4]},
                         "model": {"model": "heisenberg", "J": 1.0, "h": 0.5}})");
      },
      "heisenberg field rejected");
  check_throws(
      [] {
        parse_config(R"({"lattice": {"kind": "path", "dims": [6]},
                         "volumes": [[0,1,2,3], [2,3,4]]})");
      },
      "non-nested volumes rejected");
}

void test_round_trip() {
  const ScenarioConfig config = parse_config(kMinimalConfig);
  const std::string emitted = emit_config(config);
  const ScenarioConfig reparsed = parse_config(emitted);
  check(emit_config(reparsed) == emitted, "emit-then-parse reproduces the config");
}

void test_csv_shape() {
  check(rows_to_csv({}) == "t,a,kind,measured,certificate,ratio\n", "header-only CSV");

  ReportRow row;
  row.kind = "lr";
  row.t = 0.5;
  row.a = 1.0;
  row.measured = 1e-3;
  row.certificate = 2e-3;
  row.ratio = 0.5;
  const std::string csv = rows_to_csv({row});
  check(csv == "t,a,kind,measured,certificate,ratio\n0.5,1,lr,0.001,0.002,0.5\n",
        "single-row CSV formatting");
}

void test_constants_run() {
  const ScenarioConfig config = parse_config(R"({
    "lattice": {"kind": "path", "dims": [3]},
    "f_function": {"profile": "power", "p": 2.0},
    "tilts": [0.0],
    "model": {"model": "tfim", "J": 1.0, "h": 1.0}
  })");
  const ScenarioResult result = run_scenario(config, Subcommand::constants);
  bool found = false;
  for (const auto& row : result.rows)
    if (row.kind == "f_norm") {
      found = true;
      check_near(row.certificate, 1.5, 1e-14, "||F|| on the three-site path");
    }
  check(found, "constants run reports the F-norm");
  check(result.violations.empty(), "constants run has no violations");

  // determinism: identical runs produce identical CSV bytes
  const std::string once = rows_to_csv(run_scenario(config, Subcommand::constants).rows);
  const std::string twice = rows_to_csv(run_scenario(config, Subcommand::constants).rows);
  check(once == twice, "constants CSV deterministic");
}

void test_lr_check_run() {
  const ScenarioConfig config = parse_config(R"({
    "lattice": {"kind": "path", "dims": [4]},
    "model": {"model": "tfim", "J": 1.0, "h": 1.0},
    "observables": {"A": {"site": 0, "pauli": "z"}, "B": {"site": 3, "pauli": "z"}},
    "tilts": [0.0, 0.5],
    "times": [0.0, 0.5, 1.0]
  })");
  const ScenarioResult result = run_scenario(config, Subcommand::lr_check);
  check(result.violations.empty(), "lr-check holds on the small chain");
  // t=0 rows: measured 0, certificate 0, ratio 0
  for (const auto& row : result.rows)
    if (row.kind == "lr" && row.t == 0.0) {
      check_near(row.measured, 0.0, 1e-12, "t=0 measured");
      check_near(row.certificate, 0.0, 0.0, "t=0 certificate");
      check_near(row.ratio, 0.0, 0.0, "t=0 ratio convention");
    }
  // rows are ordered by (kind, a, t)
  bool ordered = true;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const auto& l = result.rows[i - 1];
    const auto& r = result.rows[i];
    if (std::tie(l.kind, l.a, l.t) > std::tie(r.kind, r.a, r.t)) ordered = false;
  }
  check(ordered, "rows ordered by (kind, a, t)");

  // JSON mirror parses back to the same rows
  const nlohmann::json mirror = report_to_json(config, Subcommand::lr_check, result.rows);
  const std::vector<ReportRow> back = rows_from_json(mirror);
  check(back.size() == result.rows.size(), "JSON mirror row count");
  bool same = true;
  for (std::size_t i = 0; i < back.size(); ++i) {
    if (back[i].kind != result.rows[i].kind || back[i].t != result.rows[i].t ||
        back[i].a != result.rows[i].a || back[i].measured != result.rows[i].measured ||
        back[i].certificate != result.rows[i].certificate ||
        back[i].ratio != result.rows[i].ratio)
      same = false;
  }
  check(same, "JSON mirror round-trips the rows bit-exactly");
}

void test_converge_trivial() {
  const ScenarioConfig config = parse_config(R"({
    "lattice": {"kind": "path", "dims": [4]},
    "model": {"model": "tfim", "J": 1.0, "h": 1.0},
    "observables": {"A": {"site": 1, "pauli": "z"}},
    "tilts": [0.5],
    "times": [0.5, 1.0],
    "volumes": [[0, 1, 2, 3], [0, 1, 2, 3]]
  })");
  const ScenarioResult result = run_scenario(config, Subcommand::converge);
  check(!result.rows.empty(), "converge produced rows");
  for (const auto& row : result.rows) {
    check_near(row.measured, 0.0, 1e-12, "equal volumes: measured 0");
    check_near(row.certificate, 0.0, 0.0, "equal volumes: certificate 0");
  }
  check(result.violations.empty(), "no violations for equal volumes");
}

void test_custom_model() {
  const ScenarioConfig config = parse_config(R"({
    "lattice": {"kind": "path", "dims": [2]},
    "model": {"model": "custom", "terms": [
      {"support": [0, 1],
       "matrix": [[1,0],[0,0],[0,0],[0,0],
                  [0,0],[-1,0],[0,0],[0,0],
                  [0,0],[0,0],[-1,0],[0,0],
                  [0,0],[0,0],[0,0],[1,0]]}
    ]},
    "tilts": [0.0]
  })");
  const MetricLattice lattice = build_lattice(config);
  const Interaction phi = build_interaction(config, lattice);
  check(phi.terms().size() == 1, "custom term parsed");
  check_near(phi.terms()[0].norm, 1.0, 1e-14, "custom zz term norm");
}

}  // namespace

int main() {
  test_defaults();
  test_validation_paths();
  test_round_trip();
  test_csv_shape();
  test_constants_run();
  test_lr_check_run();
  test_converge_trivial();
  test_custom_model();
  return testkit::summary("test_scenario");
}
