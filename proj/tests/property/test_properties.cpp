// Randomized invariants. Each property runs over many seeds; a failure prints
// the property name and the seed that reproduces it.
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "winreg/errors.hpp"
#include "winreg/estimators.hpp"
#include "winreg/problems.hpp"
#include "winreg/solver.hpp"
#include "winreg/windows.hpp"

using namespace winreg;
using oracle::PenaltyShape;

namespace {

constexpr int kSeeds = 200;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

struct Random {
  std::mt19937_64 rng;
  explicit Random(std::uint64_t seed) : rng(seed) {}
  Index dim(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  }
  PenaltyShape shape() { return static_cast<PenaltyShape>(dim(0, 3)); }
  WindowKind kind() {
    static const WindowKind kinds[] = {WindowKind::nonoverlap_linear, WindowKind::nonoverlap_log,
                                       WindowKind::cosine_linear, WindowKind::cosine_log};
    return kinds[dim(0, 3)];
  }
  ParamVector alphas(Index P) {
    ParamVector a(P);
    for (Index p = 0; p < P; ++p) a[p] = log_uniform(1e-3, 1e2);
    return a;
  }
};

struct Case {
  Eigen::MatrixXd A, L;
  SpectralSystem sys;
  WindowSet windows;
};

// Random dense system with windows; empty when the requested windows are empty.
std::optional<Case> make_case(Random& r, WindowKind kind, Index P) {
  const Index n = r.dim(3, 12);
  const Index m = n + r.dim(0, 4);
  Eigen::MatrixXd A = oracle::random_matrix(r.rng, m, n);
  Eigen::MatrixXd L = oracle::make_penalty(r.shape(), n, r.rng);
  SpectralSystem sys = gsvd(A, L);
  try {
    WindowSet w = make_windows(sys, kind, P);
    return Case{std::move(A), std::move(L), std::move(sys), std::move(w)};
  } catch (const EmptyWindowError&) {
    return std::nullopt;
  }
}

struct Property {
  const char* name;
  std::function<bool(Random&)> body;  // false means the draw was skipped
};

const std::vector<Property> kProperties = {
    {"cosine windows are a partition of unity in [0,1]",
     [](Random& r) {
       const Index size = r.dim(6, 20);
       const SpectralSystem sys = dct_decompose(gaussian_psf(r.log_uniform(1.0, 16.0), size, size),
                                                r.dim(0, 1) ? PenaltyKind::laplacian : PenaltyKind::identity);
       const Index P = r.dim(2, 5);
       const WindowKind kind = r.dim(0, 1) ? WindowKind::cosine_log : WindowKind::cosine_linear;
       std::optional<WindowSet> built;
       try {
         built = make_windows(sys, kind, P);
       } catch (const EmptyWindowError&) {
         return false;
       }
       const WindowSet& w = *built;
       const Eigen::ArrayXd sums = w.weights().colwise().sum().array();
       require(((sums - 1.0).abs() <= 1e-12).all(), "column sums");
       require((w.weights().array() >= 0.0).all() && (w.weights().array() <= 1.0).all(), "range");
       return true;
     }},
    {"indicator windows assign every index to exactly one window",
     [](Random& r) {
       const Index P = r.dim(1, 3);
       const auto c = make_case(r, r.dim(0, 1) ? WindowKind::nonoverlap_log : WindowKind::nonoverlap_linear, P);
       if (!c) return false;
       for (Index j = 0; j < c->sys.n(); ++j) {
         const auto col = c->windows.weights().col(j);
         require(col.sum() == 1.0 && col.maxCoeff() == 1.0, "one-hot column");
         require(c->windows.weight(c->windows.owner(j), j) == 1.0, "owner");
       }
       return true;
     }},
    {"windowed filter factors lie in [0,1] and complement them",
     [](Random& r) {
       const Index P = r.dim(1, 2);
       const auto c = make_case(r, r.kind(), std::max<Index>(P, 2));
       if (!c) return false;
       const ParamVector a = r.alphas(c->windows.P());
       const Eigen::ArrayXd phi = windowed_filter(c->sys, c->windows, a).array();
       const Eigen::ArrayXd psi = windowed_complement(c->sys, c->windows, a).array();
       require((phi >= 0.0).all() && (phi <= 1.0).all(), "filter range");
       require(((phi + psi - 1.0).abs() <= 1e-14).all(), "complement");
       return true;
     }},
    {"influence trace lies in [0, n] and residuals are nonnegative",
     [](Random& r) {
       const auto c = make_case(r, r.kind(), 2);
       if (!c) return false;
       const ParamVector a = r.alphas(2);
       const double t = trace_windowed(c->sys, c->windows, a);
       require(t >= 0.0 && t <= static_cast<double>(c->sys.n()) + 1e-12, "trace range");
       const Eigen::VectorXd d = oracle::random_vector(r.rng, c->A.rows());
       const Eigen::VectorXd dhat = c->sys.analyze(d);
       require(residual_norm_windowed(c->sys, dhat, c->windows, a) >= 0.0, "residual");
       require(gcv_windowed_true(c->sys, dhat, c->windows, a) >= 0.0, "true GCV");
       require(gcv_scalar(c->sys, dhat, a[0]) >= 0.0, "scalar GCV");
       const double sigma2 = r.log_uniform(1e-4, 1.0);
       // UPRE + sigma^2 is a sum of nonnegative terms.
       require(upre_scalar(c->sys, dhat, a[0], sigma2) + sigma2 >= -1e-14, "UPRE lower bound");
       return true;
     }},
    {"the regularized solution is linear in the data",
     [](Random& r) {
       const auto c = make_case(r, r.kind(), 2);
       if (!c) return false;
       const ParamVector a = r.alphas(2);
       const Eigen::VectorXd d1 = oracle::random_vector(r.rng, c->A.rows());
       const Eigen::VectorXd d2 = oracle::random_vector(r.rng, c->A.rows());
       const double s = std::normal_distribution<double>()(r.rng), t = std::normal_distribution<double>()(r.rng);
       const Eigen::VectorXd lhs = solve_windowed(c->sys, s * d1 + t * d2, c->windows, a).x;
       const Eigen::VectorXd rhs = s * solve_windowed(c->sys, d1, c->windows, a).x + t * solve_windowed(c->sys, d2, c->windows, a).x;
       require((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "superposition");
       return true;
     }},
    {"scalar residual grows and penalty norm shrinks with alpha",
     [](Random& r) {
       const auto c = make_case(r, WindowKind::nonoverlap_linear, 1);
       if (!c) return false;
       const Eigen::VectorXd d = oracle::random_vector(r.rng, c->A.rows());
       double a1 = r.log_uniform(1e-3, 1e2), a2 = r.log_uniform(1e-3, 1e2);
       if (a1 > a2) std::swap(a1, a2);
       const Eigen::VectorXd x1 = solve_scalar(c->sys, d, a1).x, x2 = solve_scalar(c->sys, d, a2).x;
       const double r1 = (c->A * x1 - d).norm(), r2 = (c->A * x2 - d).norm();
       require(r1 <= r2 * (1 + 1e-10) + 1e-12, "residual monotone");
       require((c->L * x2).norm() <= (c->L * x1).norm() * (1 + 1e-10) + 1e-12, "penalty monotone");
       return true;
     }},
    {"separable UPRE terms sum to the joint objective",
     [](Random& r) {
       std::vector<SpectralData> sets;
       std::vector<WindowSet> windows;
       const Index R = r.dim(1, 4);
       const Index P = r.dim(2, 3);
       const WindowKind kind = r.dim(0, 1) ? WindowKind::nonoverlap_log : WindowKind::nonoverlap_linear;
       for (Index k = 0; k < R; ++k) {
         const auto c = make_case(r, kind, P);
         if (!c) return false;
         sets.push_back(make_spectral_data(c->sys, oracle::random_vector(r.rng, c->A.rows()), r.log_uniform(1e-3, 1.0)));
         windows.push_back(c->windows);
       }
       const ParamVector a = r.alphas(P);
       double sum = 0.0;
       for (Index p = 0; p < P; ++p) sum += upre_window_separable(sets, windows, p, a[p]);
       const double joint = upre_md_windowed(sets, windows, a);
       require(std::abs(sum - joint) <= 1e-10 * (1.0 + std::abs(joint)), "UPRE sum");
       return true;
     }},
    {"equal window parameters reproduce the scalar solution",
     [](Random& r) {
       const auto c = make_case(r, r.kind(), 2);
       if (!c) return false;
       const double alpha = r.log_uniform(1e-3, 1e2);
       const Eigen::VectorXd d = oracle::random_vector(r.rng, c->A.rows());
       const Eigen::VectorXd xs = solve_scalar(c->sys, d, alpha).x;
       const Eigen::VectorXd xw = solve_windowed(c->sys, d, c->windows, ParamVector::Constant(2, alpha)).x;
       require((xs - xw).norm() <= 1e-12 * (1.0 + xs.norm()), "reduction");
       return true;
     }},
    {"reflexive blur matches its DCT diagonalization on random images",
     [](Random& r) {
       const Index rows = r.dim(4, 12), cols = r.dim(4, 12);
       const Image psf = gaussian_psf(r.log_uniform(0.5, 10.0), rows, cols);
       const ReflexiveOperator op(psf);
       Image x(rows, cols);
       std::uniform_real_distribution<double> u(0.0, 1.0);
       for (Index i = 0; i < x.size(); ++i) x.data()[i] = u(r.rng);
       const Eigen::MatrixXd dense = oracle::reflexive_blur_dense(psf, rows, cols);
       const Eigen::VectorXd ref = dense * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
       const Image y = op.apply(x);
       require((Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()) - ref).norm() <= 1e-12 * ref.norm(), "blur");
       return true;
     }},
};

}  // namespace

int main() {
  int failures = 0;
  for (std::size_t k = 0; k < kProperties.size(); ++k) {
    const Property& prop = kProperties[k];
    int ran = 0;
    for (int s = 0; s < kSeeds; ++s) {
      const std::uint64_t seed = 0x9e3779b9ULL * (k + 1) + static_cast<std::uint64_t>(s);
      Random r(seed);
      try {
        if (prop.body(r)) ++ran;
      } catch (const Failure& f) {
        std::printf("FAIL %s [%s] seed=%llu\n", prop.name, f.what.c_str(), static_cast<unsigned long long>(seed));
        ++failures;
        break;
      } catch (const std::exception& e) {
        std::printf("FAIL %s [exception: %s] seed=%llu\n", prop.name, e.what(), static_cast<unsigned long long>(seed));
        ++failures;
        break;
      }
    }
    if (ran < kSeeds / 2) {
      std::printf("FAIL %s: only %d of %d draws usable\n", prop.name, ran, kSeeds);
      ++failures;
    } else {
      std::printf("ok   %s (%d draws)\n", prop.name, ran);
    }
  }
  return failures == 0 ? 0 : 1;
}
