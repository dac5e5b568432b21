#pragma once

// Serialization of solutions and reports (JSON, format version "1"), CSV
// grids, and the flat run configuration shared by the CLI and config files.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conekit/family_solver.hpp"
#include "conekit/verification.hpp"

namespace conekit {

inline constexpr const char* kFormatVersion = "1";

// Deterministic text: sorted keys, two-space indent, doubles as %.17g.
// Non-finite doubles are written as the strings "nan", "inf", "-inf".
std::string serialize(const nlohmann::json& j);

nlohmann::json to_json(const FamilyParams& fp);
FamilyParams family_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RootSolution& rs);
RootSolution solution_from_json(const nlohmann::json& j);

// Solution record: {version, family, solution, residuals}.
nlohmann::json solution_record(const FamilyParams& fp, const RootSolution& rs);

// wall_time_s is only written when `with_timing` is set so that repeated runs
// produce identical bytes.
nlohmann::json to_json(const VerificationReport& r, bool with_timing = false);
VerificationReport report_from_json(const nlohmann::json& j);

nlohmann::json summary_json(const std::vector<VerificationReport>& reports);
nlohmann::json error_json(const std::string& kind, const std::string& message);

// Header line plus one line per row, every value as %.16e.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& text);

struct RunConfig {
  std::string version = kFormatVersion;
  std::string base_kind = "cp";  // "cp" or "product"
  std::vector<int> base_dims{1};  // cp: {N}; product: {d1, d2, ...}
  int p = 2;
  int k = 3;
  std::string kind = "small1";
  int r = 1;
  int pmax = 3;
  std::optional<int> n;  // lemma suite dimension; defaults to the base dimension
  std::vector<std::string> suites;  // empty: every suite
  std::string out = "conekit_out";
  double perturb_mu = 0.0;
  double scale_omega = 1.0;
  double einstein_constant = -1.0;
  bool timings = false;
  SampleSpec samples;
  Tolerances tolerances;

  BaseManifold base() const;
  int dimension() const;
  FamilyParams family() const;
  ControlOptions controls() const;
};

// Applies every key of a flat JSON object to `cfg`. Throws PreconditionError
// on a missing or unsupported version, unknown keys or ill-typed values.
void apply_config(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config(const std::string& path);
// The configuration as a flat document accepted by apply_config.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace conekit
