#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "winreg/dct.hpp"

namespace winreg {

using Eigen::Index;

enum class PenaltyKind { identity, laplacian };

/// Relative threshold below which a spectral value is treated as an exact zero.
inline constexpr double kSpectralZeroTol = 1e-14;

/// Orthogonal analysis map U^T and the synthesis map Y = X^{-T} of a mutual
/// decomposition A = U Delta X^T, L = V Lambda X^T.
class SpectralBasis {
 public:
  virtual ~SpectralBasis() = default;

  virtual Index data_size() const = 0;
  virtual Index solution_size() const = 0;

  /// d -> U^T d (length m).
  virtual Eigen::VectorXd analyze(const Eigen::VectorXd& data) const = 0;
  /// c -> U c, the inverse of analyze.
  virtual Eigen::VectorXd analyze_adjoint(const Eigen::VectorXd& coeffs) const = 0;
  /// y -> Y y (length n).
  virtual Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const = 0;

  /// Non-null when Y = Q diag(s) for an orthogonal Q; returns s.
  virtual const Eigen::VectorXd* synthesis_scale() const { return nullptr; }
  /// Q^T x. Only meaningful when synthesis_scale() is non-null.
  virtual Eigen::VectorXd synthesis_coordinates(const Eigen::VectorXd& x) const;
};

/// Explicit factors kept by the dense backend (for reconstruction checks).
struct DenseFactors {
  Eigen::MatrixXd U;  // m x m orthogonal
  Eigen::MatrixXd V;  // q x n, orthonormal columns where lambda_j > 0, zero elsewhere
  Eigen::MatrixXd X;  // n x n invertible
  Eigen::MatrixXd Y;  // X^{-T}
};

/// Mutual spectral decomposition of (A, L). Immutable; copies share state.
///
/// Index j runs over the sorted spectral order: delta nondecreasing, lambda
/// nonincreasing. gamma_j = delta_j / lambda_j is stored as a finite array with
/// the `lambda_zero` mask marking the infinite entries (gamma is set to 0 there).
class SpectralSystem {
 public:
  SpectralSystem(Index m, Eigen::VectorXd delta, Eigen::VectorXd lambda,
                 std::shared_ptr<const SpectralBasis> basis = nullptr,
                 std::shared_ptr<const DenseFactors> factors = nullptr);

  Index m() const { return state_->m; }
  Index n() const { return state_->delta.size(); }
  /// Number of indices with lambda_j > 0.
  Index q_star() const { return state_->q_star; }
  /// Number of indices with delta_j = 0.
  Index ell() const { return state_->ell; }

  const Eigen::VectorXd& delta() const { return state_->delta; }
  const Eigen::VectorXd& lambda() const { return state_->lambda; }
  const Eigen::VectorXd& gamma() const { return state_->gamma; }
  bool lambda_zero(Index j) const { return state_->lambda_zero[static_cast<std::size_t>(j)] != 0; }
  bool delta_zero(Index j) const { return state_->delta[j] == 0.0; }

  Eigen::VectorXd analyze(const Eigen::VectorXd& data) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

  const SpectralBasis* basis() const { return state_->basis.get(); }
  const DenseFactors* dense_factors() const { return state_->factors.get(); }

 private:
  struct State {
    Index m = 0;
    Index q_star = 0;
    Index ell = 0;
    Eigen::VectorXd delta;
    Eigen::VectorXd lambda;
    Eigen::VectorXd gamma;
    std::vector<std::uint8_t> lambda_zero;
    std::shared_ptr<const SpectralBasis> basis;
    std::shared_ptr<const DenseFactors> factors;
  };
  std::shared_ptr<const State> state_;
};

/// Phi_jj(alpha) for one index; 0 where delta = 0, 1 where lambda = 0.
inline double filter_entry(double delta, double lambda, double alpha) {
  if (delta == 0.0) return 0.0;
  if (lambda == 0.0) return 1.0;
  const double d2 = delta * delta;
  const double al = alpha * lambda;
  return d2 / (d2 + al * al);
}

struct FilterDiagonal {
  Eigen::VectorXd phi;
  Eigen::VectorXd psi;  // 1 - phi
};

/// Tikhonov filter factors for a scalar parameter. Throws DomainError for alpha <= 0.
FilterDiagonal filter_factors(const SpectralSystem& sys, double alpha);

/// Dense GSVD via QR of the stacked pair and an SVD of the top block.
/// Requires m >= n and full column rank of [A; L].
SpectralSystem gsvd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& L);

/// True when the kernel is symmetric under row, column and (for square
/// kernels) transpose reflection about its center pixel (rows/2, cols/2).
bool is_doubly_symmetric(const Image& kernel, double rel_tol = 1e-12);

/// Eigenvalues of the reflexive-boundary convolution operator defined by a
/// centered, doubly symmetric kernel, in 2D DCT coefficient layout.
Image reflexive_eigenvalues(const Image& kernel);

/// Five-point negative Laplacian stencil centered in a rows x cols array.
Image laplacian_stencil(Index rows, Index cols);

/// Eigenvalues of the penalty operator under reflexive boundaries, in DCT layout.
/// The Laplacian values are (2 - 2cos(pi k/rows)) + (2 - 2cos(pi l/cols)).
Image penalty_eigenvalues(PenaltyKind penalty, Index rows, Index cols);

/// Reflexive-boundary convolution applied through the DCT.
class ReflexiveOperator {
 public:
  explicit ReflexiveOperator(const Image& kernel);
  ReflexiveOperator(std::shared_ptr<const Dct2D> dct, Image eigenvalues);

  Image apply(const Image& image) const;
  const Image& eigenvalues() const { return eigenvalues_; }
  const std::shared_ptr<const Dct2D>& dct() const { return dct_; }

 private:
  std::shared_ptr<const Dct2D> dct_;
  Image eigenvalues_;
};

/// Simultaneous DCT diagonalization of a reflexive-boundary blur and penalty,
/// normalized so that delta_j^2 + lambda_j^2 = 1 and sorted by gamma.
SpectralSystem dct_decompose(const Image& psf, PenaltyKind penalty);

struct GsvdCheck {
  double max_defect = 0.0;           // max |delta^2 + lambda^2 - 1|
  double max_order_violation = 0.0;  // largest ordering inversion in delta or lambda
  bool pass = false;
};

/// Verifies the normalized-GSVD properties of a system (tolerance 1e-12).
GsvdCheck diag_to_gsvd_check(const SpectralSystem& sys);

}  // namespace winreg
