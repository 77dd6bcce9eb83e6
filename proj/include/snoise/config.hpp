#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snoise/affine.hpp"
#include "snoise/kernels.hpp"
#include "snoise/measure_change.hpp"
#include "snoise/point_process.hpp"

namespace snoise {

// Flat INI-style document: [section] headers, `key = value` lines, `#` or `;`
// comments. Keys are unique within a section. Line numbers are kept for
// error messages.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static IniDocument parse(const std::string& text);
  static IniDocument load(const std::string& path);

  bool has_section(const std::string& section) const;
  const std::map<std::string, Entry>* section(const std::string& name) const;
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
  int section_line(const std::string& name) const;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

enum class ScenarioKind { Simulate, CfCompare, MarkovTest, AffineValidate, MeasureCheck, DriftCheck };

std::string_view scenario_name(ScenarioKind kind) noexcept;
std::optional<ScenarioKind> parse_scenario(std::string_view name) noexcept;

struct RunParams {
  double horizon = 1.0;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  std::size_t grid_points = 11;
  double quad_tol = 1e-8;
  std::vector<double> theta{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  std::size_t csv_paths = 100;
  // drift-check only: also run the stock under the physical measure and
  // require the drift test to reject it.
  bool negative_control = true;
};

struct MarkovBlock {
  std::size_t grid_points = 11;
  double grid_end = 5.0;
  double tol = 1e-10;
  std::optional<bool> expect;
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::Simulate;
  RunParams run;
  std::optional<NoiseKernel> kernel;
  std::optional<CompensatorSpec> compensator;
  std::optional<MarketParams> market;
  std::optional<MartingaleMeasureSpec> measure;
  std::optional<HawkesParams> affine;
  MarkovBlock markov;

  // Canonical `[section] key = value` rendering of every resolved setting,
  // defaults included; embedded verbatim in reports.
  std::string resolved;
};

struct ConfigOverrides {
  std::optional<ScenarioKind> scenario;
  std::optional<std::size_t> n_paths;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig build_config(const IniDocument& doc, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

// Parsers for the value grammar, exposed for tests.
RateCurve parse_rate(const std::string& text);
MarksPtr parse_marks(const std::string& text);

}  // namespace snoise
