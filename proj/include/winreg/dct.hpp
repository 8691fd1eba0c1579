#pragma once

#include <Eigen/Core>

namespace winreg {

/// Row-major image; flattening with Eigen::Map gives index i*cols + j.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Orthonormal DCT-II matrix of order n. Row k is the k-th basis vector, so
/// `dct_matrix(n) * v` transforms and its transpose inverts.
Eigen::MatrixXd dct_matrix(Eigen::Index n);

/// Separable 2D orthonormal DCT-II on rows x cols images.
class Dct2D {
 public:
  Dct2D(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index size() const { return rows_ * cols_; }

  Image forward(const Image& image) const;
  Image inverse(const Image& coeffs) const;

  // Flat (row-major) variants.
  Eigen::VectorXd forward(const Eigen::VectorXd& flat) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& flat) const;

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd row_basis_;
  Eigen::MatrixXd col_basis_;
};

}  // namespace winreg
