#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

namespace winreg {

struct SearchConfig {
  double alpha_min = 1e-6;
  double alpha_max = 10.0;
  int grid_points = 60;
  double tol = 1e-4;  // relative accuracy in alpha
  int max_iter = 2000;

  /// Throws ConfigError when the invariants 0 < min < max, grid >= 8, tol > 0 fail.
  void validate() const;
};

/// One recorded objective evaluation.
struct TracePoint {
  Eigen::VectorXd alphas;
  double value;
};

struct ScalarResult {
  double alpha = 0.0;
  double value = 0.0;
  bool at_boundary = false;
  std::vector<TracePoint> trace;
};

struct VectorResult {
  Eigen::VectorXd alphas;
  double value = 0.0;
  std::vector<bool> at_boundary;
  int evaluations = 0;
  std::vector<TracePoint> trace;

  bool any_boundary() const;
};

/// Objective evaluations that throw a library error or return a non-finite
/// value count as infeasible (+inf) during the search.
using ScalarObjective = std::function<double(double)>;
using VectorObjective = std::function<double(const Eigen::VectorXd&)>;

/// Log-grid bracketing followed by golden-section refinement in log(alpha).
/// Ties on the grid go to the smallest alpha.
ScalarResult minimize_scalar(const ScalarObjective& objective, const SearchConfig& config);

/// Nelder-Mead in log(alpha) with coordinate clamping to the bounds. Starts from
/// `warm_start` if given, else from the scalar minimizer replicated P times.
VectorResult minimize_vector(const VectorObjective& objective, Eigen::Index P, const SearchConfig& config,
                             const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

/// True when alpha is within 1e-6 relative distance of either bound.
bool near_bound(double alpha, const SearchConfig& config);

}  // namespace winreg
