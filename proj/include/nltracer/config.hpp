#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nltracer/model.hpp"

namespace nltracer {

enum class Backend { Direct, Memory, Both };
std::string_view to_string(Backend b) noexcept;
std::string_view to_string(Theorem t) noexcept;

struct NumericsConfig {
  std::size_t n_x = 400;
  double dt = 1e-2;
  std::optional<std::size_t> n_s;  // default floor(s_max / dt)
  std::optional<double> s_max;     // default: weight truncation depth
  std::size_t trace_stride = 1;
  double tail_tol = 1e-10;
  double boundary_tol = 1e-8;
  double inequality_tol = 1e-6;
  double condition_tol = 1e-9;
  std::optional<double> delta;  // default: largest delta passing C5_prime
  bool operator==(const NumericsConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<double> snapshot_times;
  bool eta_slices = false;
  bool operator==(const OutputConfig&) const = default;
};

struct SweepConfig {
  std::string parameter;  // dotted path into the config, e.g. problem.velocity.u_max
  std::vector<double> values;
  std::size_t jobs = 1;
  bool operator==(const SweepConfig&) const = default;
};

struct LemmaConfig {
  std::optional<double> beta0;  // both or neither; searched when absent
  std::optional<double> gamma;
  std::size_t quad_n = 2000;
  std::vector<std::pair<double, double>> intervals;  // default ladder when empty
  bool operator==(const LemmaConfig&) const = default;
};

struct RunConfig {
  int schema_version = 1;
  ProblemSpec problem;
  NumericsConfig numerics;
  Backend backend = Backend::Direct;
  Theorem theorem = Theorem::None;
  OutputConfig output;
  std::optional<SweepConfig> sweep;
  std::optional<LemmaConfig> lemma;
  bool operator==(const RunConfig&) const = default;
};

inline constexpr int kConfigSchemaVersion = 1;

/// Parses a JSON config. Syntax errors raise ParseError with line and column;
/// unknown keys, wrong types and invalid values raise ParseError naming the
/// JSON pointer of the offending entry. Relative CSV paths resolve against
/// `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Fully explicit form (every default written out); tables are inlined.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
std::string serialize_config(const RunConfig& cfg);

/// Returns a copy with the numeric field at `dotted_path` set to `value`.
RunConfig with_parameter(const RunConfig& cfg, const std::string& dotted_path, double value);

}  // namespace nltracer
