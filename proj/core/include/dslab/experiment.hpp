#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dslab/grid.hpp"

namespace dslab {

/// Raised when a computation's declared candidate pair/triple count exceeds
/// the 2^30 guard and force was not set.
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCandidateGuard = 1073741824.0;  // 2^30

struct ExponentFit {
  double slope = 0.0;      // fitted exponent in statistic ~ C * delta^slope
  double intercept = 0.0;  // log2 C
  double residual = 0.0;   // max abs log2 residual
  int points_used = 0;
  int points_dropped = 0;  // nonpositive statistics
};

/// Least-squares line through (log2 delta, log2 statistic). Nonpositive
/// statistics are dropped and counted; at least two usable points required.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

enum class Experiment { Ring, Distance, Bilinear, Furstenberg, Cordoba, Cover };

struct ConstructionSpec {
  std::string name;     // ap | gp | cantor | random | train_track |
                        // bush_tubes | random_tubes | ring_tubes
  double alpha = 0.5;   // cantor / random
  std::uint64_t seed = 1;
  int n = 0;            // tube count; 0 = delta^-1
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Ring;
  ConstructionSpec construction;
  std::vector<int> m_list;
  double alpha = 0.5;            // cover experiments
  double max_side = 1.0;         // cover experiments
  double wedge_threshold = 0.01; // bilinear admission filter
  ToleranceProfile tol;
  std::uint64_t seed = 1;
  bool force = false;    // bypass the candidate-count guard
  std::string out_path;  // empty = stdout only returned rows

  void validate() const;
};

struct SweepRow {
  int m = 0;
  double delta = 0.0;
  std::vector<std::pair<std::string, double>> stats;

  double stat(const std::string& name) const;
};

/// Runs the configured experiment for every m, in ascending order, emitting
/// one TSV row per scale (and writing the report when out_path is set).
/// Deterministic for a fixed config and seed.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// TSV report: "#' config comment, header "m\tdelta\t<stats...>", floats with
/// 12 significant digits, delta rendered as "2^-m=<exact decimal>".
std::string render_report(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

Experiment experiment_from_name(const std::string& name);
std::string experiment_name(Experiment e);

}  // namespace dslab
