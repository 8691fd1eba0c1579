#pragma once

// Dense reference computations used as test oracles. Nothing here calls the
// spectral shortcuts under test, except where a factor matrix of the mutual
// decomposition is needed to express a spectral window in solution space.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "winreg/dct.hpp"

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class PenaltyShape { identity, second_difference, first_difference, random_full };

MatrixXd random_matrix(std::mt19937_64& rng, Index rows, Index cols);
VectorXd random_vector(std::mt19937_64& rng, Index n);
MatrixXd make_penalty(PenaltyShape shape, Index n, std::mt19937_64& rng);

/// x = argmin ||Ax - d||^2 + alpha^2 ||Lx||^2 via a QR solve of the stacked system.
VectorXd tikhonov_dense(const MatrixXd& A, const MatrixXd& L, const VectorXd& d, double alpha);

/// (A^T A + alpha^2 L^T L)^{-1} A^T.
MatrixXd tikhonov_inverse(const MatrixXd& A, const MatrixXd& L, double alpha);

/// Windowed pseudo-inverse sum_p (Y W_p X^T)(A^T A + alpha_p^2 L^T L)^{-1} A^T,
/// where W_p = diag(weights.row(p)) acts in the mutual spectral coordinates.
MatrixXd windowed_inverse(const MatrixXd& A, const MatrixXd& L, const MatrixXd& X, const MatrixXd& Y,
                          const MatrixXd& weights, const VectorXd& alphas);

/// Leave-one-out prediction error of windowed regularization on the rotated
/// system G = C Delta with C the unitary DFT matrix. Each left-out row is
/// removed explicitly and the reduced normal equations are solved densely.
double gcv_leave_one_out(Index m, const VectorXd& delta, const VectorXd& lambda, const MatrixXd& weights,
                         const VectorXd& alphas, const VectorXd& dhat);

/// Half-sample symmetric reflection of an index into [0, n).
Index reflect(Index i, Index n);

/// Dense matrix of reflexive-boundary convolution with a centered kernel,
/// assembled pixel by pixel from the boundary rule. Acts on row-major flat images.
MatrixXd reflexive_blur_dense(const winreg::Image& kernel, Index rows, Index cols);

/// Dense five-point negative Laplacian with reflexive boundaries.
MatrixXd reflexive_laplacian_dense(Index rows, Index cols);

/// 1D Gaussian blur matrix with zero boundaries, rows normalized to sum one.
MatrixXd gaussian_blur_1d(Index n, double width);

/// Sample mean and standard error.
struct MeanSe {
  double mean;
  double se;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace oracle
