#pragma once

#include "lrcert/bounds.hpp"
#include "lrcert/dynamics.hpp"
#include "lrcert/interaction.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrcert {

// Validation failure with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ObservableSpec {
  bool is_pauli = false;
  int site = 0;
  char axis = 'z';
  std::vector<int> support;  // resolved, ascending
  Matrix matrix;             // resolved
};

struct StateSpec {
  bool uniform = true;
  std::string kind = "up";               // uniform case
  std::vector<std::string> site_kinds;   // per-site case; "matrix" entries use
  std::vector<Matrix> site_matrices;     // the parallel matrix list
};

struct ScenarioConfig {
  std::string lattice_kind = "path";
  std::vector<int> lattice_dims;

  double profile_p = 0.0;  // power-law exponent; defaulted to d+1 at parse
  std::vector<double> tilts;

  std::string model_name = "tfim";
  double coupling = 1.0;
  double field = 1.0;
  nlohmann::json custom_terms;    // "custom" model: inline term list
  std::string custom_file;        // or a path to an interaction file

  bool has_a = false;
  bool has_b = false;
  ObservableSpec obs_a;
  ObservableSpec obs_b;

  StateSpec state;

  std::vector<double> times;
  std::vector<std::vector<int>> volumes;
  std::vector<double> epsilons;

  std::uint64_t seed = 0;
  std::int64_t dim_cap = SiteBasis::kDefaultDimCap;
};

// Parses and validates a UTF-8 JSON document, applying the documented
// defaults. Throws ConfigError naming the JSON path on any invalid field.
ScenarioConfig parse_config(const std::string& text);

// Canonical JSON form; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const ScenarioConfig& config);

MetricLattice build_lattice(const ScenarioConfig& config);
Interaction build_interaction(const ScenarioConfig& config, const MetricLattice& lattice);
LocalObservable build_observable(const ObservableSpec& spec, const SiteBasis& basis);
ProductState build_state(const ScenarioConfig& config, const SiteBasis& basis);

enum class Subcommand {
  constants,
  lr_check,
  correlations,
  converge,
  velocity,
  localize,
  ode_check,
};

Subcommand subcommand_from_name(const std::string& name);
const char* to_string(Subcommand sub);

struct ReportRow {
  std::string kind;
  double a = 0.0;
  double t = 0.0;
  double measured = 0.0;
  double certificate = 0.0;
  double ratio = 0.0;
  nlohmann::json provenance;  // full certificate inputs where applicable
  bool violation = false;
};

struct ScenarioResult {
  std::vector<ReportRow> rows;           // ordered by (kind, a, t)
  std::vector<std::string> violations;   // one message per violated inequality
};

// Numerical slack granted when checking measured <= certificate.
inline constexpr double kInequalitySlack = 1e-10;
inline constexpr double kOdeSlack = 1e-7;

ScenarioResult run_scenario(const ScenarioConfig& config, Subcommand sub);

// Header t,a,kind,measured,certificate,ratio; 12 significant digits, LF line
// endings, rows in (kind, a, t) order.
std::string rows_to_csv(const std::vector<ReportRow>& rows);
nlohmann::json report_to_json(const ScenarioConfig& config, Subcommand sub,
                              const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const nlohmann::json& report);

void write_file(const std::string& path, const std::string& content);

}  // namespace lrcert
