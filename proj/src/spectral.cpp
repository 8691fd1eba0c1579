#include "winreg/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "winreg/errors.hpp"

namespace winreg {

Eigen::VectorXd SpectralBasis::synthesis_coordinates(const Eigen::VectorXd&) const {
  throw DomainError("synthesis is not a scaled orthogonal map for this basis");
}

SpectralSystem::SpectralSystem(Index m, Eigen::VectorXd delta, Eigen::VectorXd lambda,
                               std::shared_ptr<const SpectralBasis> basis,
                               std::shared_ptr<const DenseFactors> factors) {
  const Index n = delta.size();
  if (n < 1 || lambda.size() != n)
    throw DimensionError("spectral system: delta and lambda must have equal positive length");
  if (m < n) throw DimensionError("spectral system: requires m >= n");
  if (basis && (basis->data_size() != m || basis->solution_size() != n))
    throw DimensionError("spectral system: basis dimensions do not match");
  if ((delta.array() < 0.0).any() || (lambda.array() < 0.0).any())
    throw DomainError("spectral system: spectral values must be non-negative");

  const double dtol = kSpectralZeroTol * delta.maxCoeff();
  const double ltol = kSpectralZeroTol * lambda.maxCoeff();
  for (Index j = 0; j < n; ++j) {
    if (delta[j] < dtol) delta[j] = 0.0;
    if (lambda[j] < ltol) lambda[j] = 0.0;
  }

  auto st = std::make_shared<State>();
  st->m = m;
  st->gamma = Eigen::VectorXd::Zero(n);
  st->lambda_zero.assign(static_cast<std::size_t>(n), 0);
  for (Index j = 0; j < n; ++j) {
    const bool dz = delta[j] == 0.0;
    const bool lz = lambda[j] == 0.0;
    if (dz && lz) throw JointNullSpaceError();
    if (dz) ++st->ell;
    if (lz) {
      st->lambda_zero[static_cast<std::size_t>(j)] = 1;
    } else {
      ++st->q_star;
      st->gamma[j] = delta[j] / lambda[j];
    }
  }
  st->delta = std::move(delta);
  st->lambda = std::move(lambda);
  st->basis = std::move(basis);
  st->factors = std::move(factors);
  state_ = std::move(st);
}

Eigen::VectorXd SpectralSystem::analyze(const Eigen::VectorXd& data) const {
  if (!state_->basis) throw DomainError("spectral system has no analysis transform");
  if (data.size() != m()) throw DimensionError("analyze: data length must equal m");
  return state_->basis->analyze(data);
}

Eigen::VectorXd SpectralSystem::synthesize(const Eigen::VectorXd& coeffs) const {
  if (!state_->basis) throw DomainError("spectral system has no synthesis transform");
  if (coeffs.size() != n()) throw DimensionError("synthesize: coefficient length must equal n");
  return state_->basis->synthesize(coeffs);
}

FilterDiagonal filter_factors(const SpectralSystem& sys, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("filter_factors: alpha must be positive");
  const Index n = sys.n();
  FilterDiagonal f{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Index j = 0; j < n; ++j) {
    f.phi[j] = filter_entry(sys.delta()[j], sys.lambda()[j], alpha);
    f.psi[j] = 1.0 - f.phi[j];
  }
  return f;
}

// ---------------------------------------------------------------------------
// Dense backend

namespace {

class DenseBasis final : public SpectralBasis {
 public:
  explicit DenseBasis(std::shared_ptr<const DenseFactors> f) : f_(std::move(f)) {}

  Index data_size() const override { return f_->U.rows(); }
  Index solution_size() const override { return f_->Y.rows(); }

  Eigen::VectorXd analyze(const Eigen::VectorXd& data) const override {
    return f_->U.transpose() * data;
  }
  Eigen::VectorXd analyze_adjoint(const Eigen::VectorXd& coeffs) const override {
    return f_->U * coeffs;
  }
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const override {
    return f_->Y * coeffs;
  }

 private:
  std::shared_ptr<const DenseFactors> f_;
};

}  // namespace

SpectralSystem gsvd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& L) {
  const Index m = A.rows();
  const Index n = A.cols();
  const Index q = L.rows();
  if (n < 1 || L.cols() != n) throw DimensionError("gsvd: A and L must share a column count");
  if (m < n) throw DimensionError("gsvd: requires m >= n");

  Eigen::MatrixXd stacked(m + q, n);
  stacked << A, L;

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
  if (!(sv[n - 1] > 1e-12 * sv[0])) throw JointNullSpaceError();

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m + q, n);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();

  // CS decomposition: Q1 = U C W^T, and Q2 W has orthogonal columns of norm s_j.
  const Eigen::MatrixXd Q1 = Q.topRows(m);
  const Eigen::MatrixXd Q2 = Q.bottomRows(q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd c = svd.singularValues();

  auto f = std::make_shared<DenseFactors>();
  f->U = svd.matrixU();
  Eigen::MatrixXd W(n, n);
  Eigen::VectorXd delta(n);
  for (Index j = 0; j < n; ++j) {
    const Index src = n - 1 - j;  // SVD order is descending
    delta[j] = std::min(c[src], 1.0);
    f->U.col(j) = svd.matrixU().col(src);
    W.col(j) = svd.matrixV().col(src);
  }

  const Eigen::MatrixXd Q2W = Q2 * W;
  Eigen::VectorXd lambda(n);
  for (Index j = 0; j < n; ++j) lambda[j] = Q2W.col(j).norm();

  const double ltol = kSpectralZeroTol * lambda.maxCoeff();
  f->V = Eigen::MatrixXd::Zero(q, n);
  for (Index j = 0; j < n; ++j) {
    if (lambda[j] >= ltol) f->V.col(j) = Q2W.col(j) / lambda[j];
  }
  f->X = R.transpose() * W;
  f->Y = R.triangularView<Eigen::Upper>().solve(W);

  std::shared_ptr<const DenseFactors> factors = f;
  return SpectralSystem(m, std::move(delta), std::move(lambda),
                        std::make_shared<DenseBasis>(factors), factors);
}

// ---------------------------------------------------------------------------
// Reflexive-boundary operators

namespace {

struct KernelGeometry {
  Index cr, cc;  // center pixel
  Index kr, kc;  // largest offsets with a mirrored partner
};

KernelGeometry geometry_of(const Image& k) {
  KernelGeometry g{};
  g.cr = k.rows() / 2;
  g.cc = k.cols() / 2;
  g.kr = std::min(g.cr, k.rows() - 1 - g.cr);
  g.kc = std::min(g.cc, k.cols() - 1 - g.cc);
  return g;
}

Eigen::VectorXd dct_first_column(Index n) {
  Eigen::VectorXd col(n);
  const double nd = static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    col[k] = scale * std::cos(std::numbers::pi * static_cast<double>(k) / (2.0 * nd));
  }
  return col;
}

class DctBasis final : public SpectralBasis {
 public:
  DctBasis(std::shared_ptr<const Dct2D> dct, std::vector<Index> perm, Eigen::VectorXd sign,
           Eigen::VectorXd scale)
      : dct_(std::move(dct)), perm_(std::move(perm)), sign_(std::move(sign)), scale_(std::move(scale)) {}

  Index data_size() const override { return dct_->size(); }
  Index solution_size() const override { return dct_->size(); }

  Eigen::VectorXd analyze(const Eigen::VectorXd& data) const override {
    const Eigen::VectorXd f = dct_->forward(data);
    Eigen::VectorXd out(f.size());
    for (Index j = 0; j < f.size(); ++j) out[j] = sign_[j] * f[perm_[static_cast<std::size_t>(j)]];
    return out;
  }

  Eigen::VectorXd analyze_adjoint(const Eigen::VectorXd& coeffs) const override {
    Eigen::VectorXd f(coeffs.size());
    for (Index j = 0; j < coeffs.size(); ++j) f[perm_[static_cast<std::size_t>(j)]] = sign_[j] * coeffs[j];
    return dct_->inverse(f);
  }

  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const override {
    Eigen::VectorXd f(coeffs.size());
    for (Index j = 0; j < coeffs.size(); ++j) f[perm_[static_cast<std::size_t>(j)]] = scale_[j] * coeffs[j];
    return dct_->inverse(f);
  }

  const Eigen::VectorXd* synthesis_scale() const override { return &scale_; }

  Eigen::VectorXd synthesis_coordinates(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd f = dct_->forward(x);
    Eigen::VectorXd out(f.size());
    for (Index j = 0; j < f.size(); ++j) out[j] = f[perm_[static_cast<std::size_t>(j)]];
    return out;
  }

 private:
  std::shared_ptr<const Dct2D> dct_;
  std::vector<Index> perm_;  // sorted index -> flat DCT index
  Eigen::VectorXd sign_;     // sign of the blur eigenvalue, folded into U
  Eigen::VectorXd scale_;    // 1 / sqrt(eig_A^2 + eig_L^2)
};

}  // namespace

Image penalty_eigenvalues(PenaltyKind penalty, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw DimensionError("penalty_eigenvalues: empty grid");
  if (penalty == PenaltyKind::identity) return Image::Ones(rows, cols);
  Image eig(rows, cols);
  for (Index k = 0; k < rows; ++k) {
    const double a = 2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(rows));
    for (Index l = 0; l < cols; ++l) {
      const double b = 2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(l) / static_cast<double>(cols));
      eig(k, l) = a + b;
    }
  }
  eig(0, 0) = 0.0;
  return eig;
}

bool is_doubly_symmetric(const Image& kernel, double rel_tol) {
  if (kernel.size() == 0) return false;
  const KernelGeometry g = geometry_of(kernel);
  const double tol = rel_tol * std::max(kernel.cwiseAbs().maxCoeff(), 1e-300);
  const bool square = kernel.rows() == kernel.cols();
  for (Index s = -g.kr; s <= g.kr; ++s) {
    for (Index t = -g.kc; t <= g.kc; ++t) {
      const double v = kernel(g.cr + s, g.cc + t);
      if (std::abs(v - kernel(g.cr - s, g.cc + t)) > tol) return false;
      if (std::abs(v - kernel(g.cr + s, g.cc - t)) > tol) return false;
      if (square && std::abs(v - kernel(g.cr + t, g.cc + s)) > tol) return false;
    }
  }
  return true;
}

Image reflexive_eigenvalues(const Image& kernel) {
  if (!is_doubly_symmetric(kernel)) throw NotDiagonalizableError();
  const Index rows = kernel.rows();
  const Index cols = kernel.cols();
  const KernelGeometry g = geometry_of(kernel);

  auto h = [&](Index s, Index t) -> double {
    if (s > g.kr || t > g.kc) return 0.0;
    return kernel(g.cr + s, g.cc + t);
  };

  // First column of the Toeplitz-plus-Hankel operator, laid out as an image.
  Image first = Image::Zero(rows, cols);
  for (Index i = 0; i <= g.kr; ++i) {
    for (Index j = 0; j <= g.kc; ++j) {
      first(i, j) = h(i, j) + h(i + 1, j) + h(i, j + 1) + h(i + 1, j + 1);
    }
  }

  const Dct2D dct(rows, cols);
  const Image f = dct.forward(first);
  const Eigen::VectorXd er = dct_first_column(rows);
  const Eigen::VectorXd ec = dct_first_column(cols);
  Image eig(rows, cols);
  for (Index k = 0; k < rows; ++k)
    for (Index l = 0; l < cols; ++l) eig(k, l) = f(k, l) / (er[k] * ec[l]);
  return eig;
}

Image laplacian_stencil(Index rows, Index cols) {
  if (rows < 3 || cols < 3) throw DimensionError("laplacian_stencil: need at least 3x3");
  Image s = Image::Zero(rows, cols);
  const Index cr = rows / 2;
  const Index cc = cols / 2;
  s(cr, cc) = 4.0;
  s(cr - 1, cc) = s(cr + 1, cc) = s(cr, cc - 1) = s(cr, cc + 1) = -1.0;
  return s;
}

ReflexiveOperator::ReflexiveOperator(const Image& kernel)
    : dct_(std::make_shared<Dct2D>(kernel.rows(), kernel.cols())),
      eigenvalues_(reflexive_eigenvalues(kernel)) {}

ReflexiveOperator::ReflexiveOperator(std::shared_ptr<const Dct2D> dct, Image eigenvalues)
    : dct_(std::move(dct)), eigenvalues_(std::move(eigenvalues)) {
  if (eigenvalues_.rows() != dct_->rows() || eigenvalues_.cols() != dct_->cols())
    throw DimensionError("ReflexiveOperator: eigenvalue grid does not match transform");
}

Image ReflexiveOperator::apply(const Image& image) const {
  if (image.rows() != dct_->rows() || image.cols() != dct_->cols())
    throw DimensionError("blur: image and kernel dimensions differ");
  Image f = dct_->forward(image);
  f.array() *= eigenvalues_.array();
  return dct_->inverse(f);
}

SpectralSystem dct_decompose(const Image& psf, PenaltyKind penalty) {
  const Index rows = psf.rows();
  const Index cols = psf.cols();
  const Index n = rows * cols;
  const Image blur_eig = reflexive_eigenvalues(psf);
  const Image pen_eig = penalty_eigenvalues(penalty, rows, cols);

  const Eigen::Map<const Eigen::VectorXd> a(blur_eig.data(), n);
  const Eigen::Map<const Eigen::VectorXd> l(pen_eig.data(), n);
  const double atol = kSpectralZeroTol * a.cwiseAbs().maxCoeff();
  const double ltol = kSpectralZeroTol * l.cwiseAbs().maxCoeff();

  Eigen::VectorXd abs_a(n), abs_l(n), sign(n), key(n);
  std::vector<std::uint8_t> lzero(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    abs_a[i] = std::abs(a[i]) < atol ? 0.0 : std::abs(a[i]);
    abs_l[i] = std::abs(l[i]) < ltol ? 0.0 : std::abs(l[i]);
    sign[i] = (abs_a[i] > 0.0 && a[i] < 0.0) ? -1.0 : 1.0;
    if (abs_a[i] == 0.0 && abs_l[i] == 0.0) throw JointNullSpaceError();
    lzero[static_cast<std::size_t>(i)] = abs_l[i] == 0.0 ? 1 : 0;
    key[i] = lzero[static_cast<std::size_t>(i)] ? 0.0 : abs_a[i] / abs_l[i];
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(), [&](Index x, Index y) {
    const auto lx = lzero[static_cast<std::size_t>(x)];
    const auto ly = lzero[static_cast<std::size_t>(y)];
    if (lx != ly) return lx < ly;
    if (lx) return false;
    return key[x] < key[y];
  });

  Eigen::VectorXd delta(n), lambda(n), sorted_sign(n), scale(n);
  for (Index j = 0; j < n; ++j) {
    const Index src = perm[static_cast<std::size_t>(j)];
    const double s = std::hypot(abs_a[src], abs_l[src]);
    delta[j] = abs_a[src] / s;
    lambda[j] = abs_l[src] / s;
    sorted_sign[j] = sign[src];
    scale[j] = 1.0 / s;
  }

  auto dct = std::make_shared<Dct2D>(rows, cols);
  auto basis = std::make_shared<DctBasis>(std::move(dct), std::move(perm), std::move(sorted_sign),
                                          std::move(scale));
  return SpectralSystem(n, std::move(delta), std::move(lambda), std::move(basis));
}

GsvdCheck diag_to_gsvd_check(const SpectralSystem& sys) {
  GsvdCheck r;
  const auto& d = sys.delta();
  const auto& l = sys.lambda();
  for (Index j = 0; j < sys.n(); ++j) {
    r.max_defect = std::max(r.max_defect, std::abs(d[j] * d[j] + l[j] * l[j] - 1.0));
    if (j + 1 < sys.n()) {
      r.max_order_violation = std::max({r.max_order_violation, d[j] - d[j + 1], l[j + 1] - l[j]});
    }
  }
  r.pass = r.max_defect <= 1e-12 && r.max_order_violation <= 1e-12;
  return r;
}

}  // namespace winreg
