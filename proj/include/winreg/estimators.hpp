#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "winreg/solver.hpp"
#include "winreg/spectral.hpp"
#include "winreg/windows.hpp"

namespace winreg {

/// Denominators of the GCV family at or below this value are treated as saturated.
inline constexpr double kSaturationTol = 1e-14;

/// One data set in spectral form: its system, dhat = analyze(d), and white-noise variance.
struct SpectralData {
  SpectralSystem sys;
  Eigen::VectorXd dhat;
  double sigma2 = 0.0;
};

SpectralData make_spectral_data(const SpectralSystem& sys, const Eigen::VectorXd& d, double sigma2);

// ---- UPRE ----------------------------------------------------------------

/// (1/m)||r||^2 + (2 sigma^2/m) trace - sigma^2.
double upre_scalar(const SpectralSystem& sys, const Eigen::VectorXd& dhat, double alpha, double sigma2);

/// Multi-data windowed UPRE with alpha-independent terms removed:
///   (1/M) sum_r [ sum_{j<=n} (sum_p w Psi)^2 dhat^2 + 2 sigma_r^2 sum_{ell<j<=q*} sum_p w Phi ].
double upre_md_windowed(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                        const ParamVector& alphas);

/// The constant that upre_md_windowed omits; adding it gives (1/M) sum_r m_r UPRE_r.
double upre_md_constant(std::span<const SpectralData> sets);

/// Contribution of window p to upre_md_windowed; summing over p reproduces it exactly.
double upre_window_separable(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                             Index p, double alpha);

// ---- GCV -----------------------------------------------------------------

double gcv_scalar(const SpectralSystem& sys, const Eigen::VectorXd& dhat, double alpha);

double gcv_md_scalar(std::span<const SpectralData> sets, double alpha);

/// Leave-one-out GCV for windowed regularization of one data set.
double gcv_windowed_true(const SpectralSystem& sys, const Eigen::VectorXd& dhat, const WindowSet& windows,
                         const ParamVector& alphas);

/// Diagonal values mu_p and nu_p of the (windowed) residual resolution matrices.
struct WindowedGcvTerms {
  Eigen::VectorXd mu;
  Eigen::VectorXd nu;
};
WindowedGcvTerms windowed_gcv_terms(const SpectralSystem& sys, const WindowSet& windows,
                                    const ParamVector& alphas);

/// Average of gcv_windowed_true over the data sets.
double gcv_md_windowed_true(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                            const ParamVector& alphas);

/// Per-window GCV surrogate for non-overlapping windows. Indices beyond n belong to the last window.
double gcv_windowed_decoupled(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                              Index p, double alpha);

// ---- MSE learning ----------------------------------------------------------

/// (1/R) sum_r ||x_win^(r) - x^(r)||^2 via explicit synthesis.
double mse_learning(std::span<const SpectralData> sets, std::span<const Eigen::VectorXd> truths,
                    std::span<const WindowSet> windows, const ParamVector& alphas);

/// MSE learning objective precomputed in spectral coordinates. Requires every
/// system's synthesis to be a scaled orthogonal map (the DCT backend); falls
/// back to explicit synthesis otherwise.
class SpectralMse {
 public:
  SpectralMse(std::span<const SpectralData> sets, std::span<const Eigen::VectorXd> truths);

  double value(std::span<const WindowSet> windows, const ParamVector& alphas) const;
  /// Window-p share of value() for non-overlapping windows (fast path only).
  double window_value(std::span<const WindowSet> windows, Index p, double alpha) const;
  bool fast() const { return fast_; }

 private:
  std::vector<SpectralData> sets_;
  std::vector<Eigen::VectorXd> truths_;
  std::vector<Eigen::VectorXd> gain_;    // s_j dhat_j / delta_j
  std::vector<Eigen::VectorXd> target_;  // Q^T x
  bool fast_ = false;
};

// ---- noise -----------------------------------------------------------------

/// Median-absolute-deviation noise estimate from the quarter of spectral
/// coefficients with the smallest generalized spectral values (plus any tail beyond n).
double estimate_sigma2_mad(const SpectralSystem& sys, const Eigen::VectorXd& dhat);

}  // namespace winreg
