#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contamination.hpp"
#include "types.hpp"

namespace agnostic {

// Declarative clean-family description whose concrete parameters may depend
// on the grid dimension n at instantiation time.
struct FamilySpec {
  std::string kind;  // gaussian | bernoulli_product | uniform_ball | two_point
                     // | student_t | geom_median_instance
  // gaussian
  double mean_fill = 0.0;
  std::optional<std::vector<double>> mean;  // explicit mean pins n
  std::string cov_kind = "identity";        // identity | scaled_identity | diag_first | diag
  double cov_value = 1.0;                   // scaled_identity
  double cov_first = 1.0;                   // diag_first: first diagonal entry
  double cov_rest = 1.0;                    // diag_first: remaining entries
  std::optional<std::vector<double>> cov_diag;  // diag pins n
  // bernoulli_product
  double p_fill = 0.5;
  std::optional<std::vector<double>> p;  // explicit p pins n
  bool centered = true;
  // uniform_ball
  double radius = 1.0;
  // two_point
  double sigma = 1.0;
  // student_t
  double dof = 6.0;
  double scale = 1.0;
};

// Adversary description; distances may scale with the grid dimension.
struct AdversarySpec {
  std::string kind = "none";  // none | point_mass | axis_pair | three_point_tail
                              // | tv_swap | geom_median_killer
  // point_mass: either a constant-fill vector, an explicit location, or a
  // single-axis spike at `distance` (optionally scaled by sqrt(n) or n)
  std::optional<double> fill;
  std::optional<std::vector<double>> location;
  Eigen::Index axis = 0;
  double distance = 0.0;
  std::string scale_with = "none";  // none | sqrt_n | n
  // three_point_tail / tv_swap
  double sigma = 1.0;
  double mu1 = 0.0;
  std::optional<double> mu2;  // tv_swap: omitted means the exactly-feasible gap
};

struct ExperimentSpec {
  FamilySpec family;
  AdversarySpec adversary;
  std::vector<Eigen::Index> n_grid;
  std::vector<Eigen::Index> m_grid;
  std::vector<double> eta_grid;
  std::vector<double> eps_grid;
  std::vector<std::string> estimators;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string out;  // bench: csv path; simulate: output directory
  Placement placement = Placement::ExactCount;
  // estimator configuration shared by every trial
  Mode mode = Mode::Gaussian;
  double c4 = 3.0;
  double c42 = 15.0;
  double gamma = 2.0;
  double eps1 = 0.1;
  bool fresh_samples = false;
  bool psd = true;
  int svd_rank = 1;  // rank for the "agnostic_svd" estimator
};

// Parses and validates a UTF-8 JSON experiment description; throws SpecError
// naming the offending field, or IoError when the file cannot be read.
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& json_text, const std::string& origin);

CleanFamily instantiate_family(const FamilySpec& spec, Eigen::Index n);
AdversaryStrategy instantiate_adversary(const AdversarySpec& spec, Eigen::Index n, double eta);

// Grid-cell index in the canonical nesting order n -> m -> eta -> eps.
struct GridCell {
  Eigen::Index n;
  Eigen::Index m;
  double eta;
  double eps;
  std::size_t index;
};
std::vector<GridCell> grid_cells(const ExperimentSpec& spec);

// Seed for one trial, derived so any execution order yields the same stream.
std::uint64_t trial_seed(std::uint64_t base, std::size_t cell_index, int repeat);

// Generates the dataset for one cell and repeat.
LabeledDataset realize_cell(const ExperimentSpec& spec, const GridCell& cell, int repeat);

// Writes one RMDS dataset per grid cell per repeat into out_dir; returns the
// paths written, in canonical order.
std::vector<std::string> run_simulate(const ExperimentSpec& spec, const std::string& out_dir);

struct BenchResult {
  std::string csv_path;
  std::string json_path;
  int rows = 0;
  int failures = 0;
};

// Runs grid x repeats x estimators, writing one CSV row per trial plus a
// sibling JSON aggregate (median and interquartile range per cell and
// estimator). Estimator failures become rows with a status diagnostic; the
// run continues.
BenchResult run_bench(const ExperimentSpec& spec, const std::string& out_csv);

// Shortest round-trip decimal formatting used in every report.
std::string format_double(double x);

}  // namespace agnostic
