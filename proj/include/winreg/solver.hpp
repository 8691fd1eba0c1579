#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "winreg/spectral.hpp"
#include "winreg/windows.hpp"

namespace winreg {

/// One positive regularization parameter per window (length 1 for scalar).
using ParamVector = Eigen::VectorXd;

/// Throws DimensionError/DomainError unless `alphas` has P finite positive entries.
void check_params(const ParamVector& alphas, Index P);

struct RegularizedSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd dhat;
  Eigen::VectorXd phi_win;
};

/// Effective windowed filter sum_p w^(p) Phi(alpha_p), length n.
Eigen::VectorXd windowed_filter(const SpectralSystem& sys, const WindowSet& windows,
                                const ParamVector& alphas);

/// Complementary filter sum_p w^(p) Psi(alpha_p), computed without cancellation.
Eigen::VectorXd windowed_complement(const SpectralSystem& sys, const WindowSet& windows,
                                    const ParamVector& alphas);

/// Spectral solution coefficients phi_j dhat_j / delta_j (zero where delta_j = 0).
Eigen::VectorXd filtered_coefficients(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                                      const Eigen::VectorXd& phi);

RegularizedSolution solve_scalar(const SpectralSystem& sys, const Eigen::VectorXd& d, double alpha);

RegularizedSolution solve_windowed(const SpectralSystem& sys, const Eigen::VectorXd& d,
                                   const WindowSet& windows, const ParamVector& alphas);

/// Same as solve_windowed but starting from precomputed coefficients dhat = analyze(d).
RegularizedSolution solve_windowed_spectral(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                                            const WindowSet& windows, const ParamVector& alphas);

/// ||A x_win - d||^2 evaluated in the spectral domain.
double residual_norm_windowed(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                              const WindowSet& windows, const ParamVector& alphas);

/// trace(A A_win^#) = (n - q*) + sum over ell < j <= q* of the windowed filter.
double trace_windowed(const SpectralSystem& sys, const WindowSet& windows, const ParamVector& alphas);

/// Block-separable multi-data solve sharing one parameter vector.
std::vector<RegularizedSolution> solve_multidata(std::span<const SpectralSystem> systems,
                                                 std::span<const Eigen::VectorXd> data,
                                                 std::span<const WindowSet> windows,
                                                 const ParamVector& alphas);

}  // namespace winreg
