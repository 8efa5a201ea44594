#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rrt/config.hpp"
#include "rrt/env.hpp"
#include "rrt/treegrow.hpp"
#include "rrt/walk.hpp"

namespace rrt {

enum class Experiment { depth_law, depth_exact_check, arcsine, outdeg_profile, scaling, subcritical, texpect, sanity, bench };

// Throws UsageError for an unknown name.
Experiment parse_experiment(std::string_view name);
std::string_view experiment_name(Experiment experiment);

// Weight model as chosen in a config; product-form walks come from the
// increment spec and are redrawn per replicate.
struct EnvChoice {
  EnvKind kind = EnvKind::product_form;
  double alpha = 1.0;
  WeightDist weights = UniformWeightDist{};
};

struct ExperimentConfig {
  Experiment experiment = Experiment::sanity;
  EnvChoice env;
  IncrementSpec increment = Gaussian{};
  EdgeLenSpec edge = UnitLength{};
  std::size_t n = 0;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  double tolerance = 0.0;
  // Second tolerance where an experiment checks two quantities of different scale.
  double tolerance_last = 0.0;
  std::optional<double> rho;
  std::vector<double> t_grid;
  std::vector<std::size_t> j_list;
  double window = 0.05;
  double alpha_level = 0.01;
  // Resolved key/value pairs, echoed into the summary.
  ConfigMap echo;
};

/// Builds a config from flat keys. "experiment" and "seed" are mandatory;
/// everything else falls back to the experiment's defaults. Unknown keys and
/// out-of-range values throw ConfigError.
ExperimentConfig make_config(const ConfigMap& values);

/// Named columns of equal length plus a metadata block.
class ResultTable {
 public:
  using Column = std::variant<std::vector<double>, std::vector<std::string>>;

  // Throws DomainError on a duplicate name or a length mismatch.
  void add_column(std::string name, std::vector<double> values);
  void add_column(std::string name, std::vector<std::string> values);

  bool has_column(std::string_view name) const;
  // Throws DomainError if the column is missing or not numeric.
  std::span<const double> column(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t rows() const { return rows_; }

  friend void write_csv(std::ostream& out, const ResultTable& table);

  std::map<std::string, std::string> metadata;

 private:
  void check_new(const std::string& name, std::size_t length) const;

  std::vector<std::string> names_;
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

// RFC 4180 style: header row, quoted strings where needed, %.17g reals.
void write_csv(std::ostream& out, const ResultTable& table);

struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = false;
};

struct ExperimentResult {
  ResultTable table;
  std::vector<Check> checks;
  std::string summary_json;
  bool passed = false;
};

// Output bytes of the table depend only on the config, never on threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes out.csv and the summary next to it (extension replaced by .json).
// Throws IoError when either file cannot be written.
void write_outputs(const ExperimentResult& result, const std::string& csv_path);

// Plot-ready projection of a result table:
//   "outdeg-profile" -> t, mean_estimate, stderr, limit
//   "arcsine"        -> x, ecdf, arcsine_cdf on a 101-point grid
// An empty table yields only the header. Missing columns throw DomainError.
ResultTable emit_plot_data(const ResultTable& table, std::string_view kind);

}  // namespace rrt
