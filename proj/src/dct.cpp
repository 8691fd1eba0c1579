#include "winreg/dct.hpp"

#include <cmath>
#include <numbers>

#include "winreg/errors.hpp"

namespace winreg {

Eigen::MatrixXd dct_matrix(Eigen::Index n) {
  if (n < 1) throw DimensionError("dct_matrix: order must be positive");
  Eigen::MatrixXd c(n, n);
  const double nd = static_cast<double>(n);
  const double s0 = std::sqrt(1.0 / nd);
  const double s = std::sqrt(2.0 / nd);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double scale = k == 0 ? s0 : s;
    for (Eigen::Index i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                                 static_cast<double>(k) / nd);
    }
  }
  return c;
}

Dct2D::Dct2D(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), row_basis_(dct_matrix(rows)), col_basis_(dct_matrix(cols)) {}

Image Dct2D::forward(const Image& image) const {
  if (image.rows() != rows_ || image.cols() != cols_)
    throw DimensionError("Dct2D::forward: image shape mismatch");
  Image out = row_basis_ * image * col_basis_.transpose();
  return out;
}

Image Dct2D::inverse(const Image& coeffs) const {
  if (coeffs.rows() != rows_ || coeffs.cols() != cols_)
    throw DimensionError("Dct2D::inverse: coefficient shape mismatch");
  Image out = row_basis_.transpose() * coeffs * col_basis_;
  return out;
}

Eigen::VectorXd Dct2D::forward(const Eigen::VectorXd& flat) const {
  if (flat.size() != size()) throw DimensionError("Dct2D::forward: length mismatch");
  Image img = Eigen::Map<const Image>(flat.data(), rows_, cols_);
  Image out = forward(img);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

Eigen::VectorXd Dct2D::inverse(const Eigen::VectorXd& flat) const {
  if (flat.size() != size()) throw DimensionError("Dct2D::inverse: length mismatch");
  Image img = Eigen::Map<const Image>(flat.data(), rows_, cols_);
  Image out = inverse(img);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

}  // namespace winreg
