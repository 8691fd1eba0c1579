#include "winreg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "winreg/errors.hpp"

namespace winreg {

namespace {

double complement_entry(double delta, double lambda, double alpha) {
  if (delta == 0.0) return 1.0;
  if (lambda == 0.0) return 0.0;
  const double al = alpha * lambda;
  return (al * al) / (delta * delta + al * al);
}

double tail_energy(const SpectralData& s) {
  const Index extra = s.sys.m() - s.sys.n();
  return extra > 0 ? s.dhat.tail(extra).squaredNorm() : 0.0;
}

void check_sets(std::span<const SpectralData> sets, std::span<const WindowSet> windows) {
  if (sets.empty()) throw DimensionError("at least one data set is required");
  if (windows.size() != sets.size()) throw DimensionError("one window set per data set is required");
  const Index P = windows[0].P();
  for (std::size_t r = 0; r < sets.size(); ++r) {
    if (windows[r].P() != P) throw DimensionError("window counts differ across data sets");
    if (windows[r].n() != sets[r].sys.n()) throw DimensionError("window length does not match the system");
    if (sets[r].dhat.size() != sets[r].sys.m()) throw DimensionError("spectral data length must equal m");
  }
}

void check_separable(std::span<const SpectralData> sets, std::span<const WindowSet> windows, Index p,
                     double alpha) {
  check_sets(sets, windows);
  for (const auto& w : windows)
    if (w.overlapping()) throw SeparableFormError();
  if (p < 0 || p >= windows[0].P()) throw DimensionError("window index out of range");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and positive");
}

double total_rows(std::span<const SpectralData> sets) {
  double M = 0.0;
  for (const auto& s : sets) M += static_cast<double>(s.sys.m());
  return M;
}

}  // namespace

SpectralData make_spectral_data(const SpectralSystem& sys, const Eigen::VectorXd& d, double sigma2) {
  return SpectralData{sys, sys.analyze(d), sigma2};
}

double upre_scalar(const SpectralSystem& sys, const Eigen::VectorXd& dhat, double alpha, double sigma2) {
  ParamVector a(1);
  a[0] = alpha;
  const WindowSet w = WindowSet::trivial(sys.n());
  const double m = static_cast<double>(sys.m());
  return residual_norm_windowed(sys, dhat, w, a) / m + 2.0 * sigma2 * trace_windowed(sys, w, a) / m - sigma2;
}

double upre_md_windowed(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                        const ParamVector& alphas) {
  check_sets(sets, windows);
  double total = 0.0;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    const auto& s = sets[r];
    const Eigen::VectorXd phi = windowed_filter(s.sys, windows[r], alphas);
    const Eigen::VectorXd psi = windowed_complement(s.sys, windows[r], alphas);
    double res = 0.0;
    double tr = 0.0;
    for (Index j = 0; j < s.sys.n(); ++j) {
      res += psi[j] * psi[j] * s.dhat[j] * s.dhat[j];
      if (!s.sys.delta_zero(j) && !s.sys.lambda_zero(j)) tr += phi[j];
    }
    total += res + 2.0 * s.sigma2 * tr;
  }
  return total / total_rows(sets);
}

double upre_md_constant(std::span<const SpectralData> sets) {
  double c = 0.0;
  for (const auto& s : sets) {
    c += tail_energy(s) + 2.0 * s.sigma2 * static_cast<double>(s.sys.n() - s.sys.q_star()) -
         static_cast<double>(s.sys.m()) * s.sigma2;
  }
  return c / total_rows(sets);
}

double upre_window_separable(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                             Index p, double alpha) {
  check_separable(sets, windows, p, alpha);
  double total = 0.0;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    const auto& s = sets[r];
    double res = 0.0;
    double tr = 0.0;
    for (Index j = 0; j < s.sys.n(); ++j) {
      if (windows[r].owner(j) != p) continue;
      const double dl = s.sys.delta()[j];
      const double lm = s.sys.lambda()[j];
      const double psi = complement_entry(dl, lm, alpha);
      res += psi * psi * s.dhat[j] * s.dhat[j];
      if (dl != 0.0 && lm != 0.0) tr += filter_entry(dl, lm, alpha);
    }
    total += res + 2.0 * s.sigma2 * tr;
  }
  return total / total_rows(sets);
}

double gcv_scalar(const SpectralSystem& sys, const Eigen::VectorXd& dhat, double alpha) {
  const SpectralData one{sys, dhat, 0.0};
  return gcv_md_scalar(std::span<const SpectralData>(&one, 1), alpha);
}

double gcv_md_scalar(std::span<const SpectralData> sets, double alpha) {
  if (sets.empty()) throw DimensionError("at least one data set is required");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and positive");
  double res = 0.0;
  double slack = 0.0;  // sum_r (m_r - trace_r)
  for (const auto& s : sets) {
    if (s.dhat.size() != s.sys.m()) throw DimensionError("spectral data length must equal m");
    for (Index j = 0; j < s.sys.n(); ++j) {
      const double psi = complement_entry(s.sys.delta()[j], s.sys.lambda()[j], alpha);
      res += psi * psi * s.dhat[j] * s.dhat[j];
      slack += psi;
    }
    res += tail_energy(s);
    slack += static_cast<double>(s.sys.m() - s.sys.n());
  }
  const double M = total_rows(sets);
  const double base = slack / M;
  const double den = base * base;
  if (!(den > kSaturationTol)) throw SaturatedTraceError("saturated trace");
  return (res / M) / den;
}

WindowedGcvTerms windowed_gcv_terms(const SpectralSystem& sys, const WindowSet& windows,
                                    const ParamVector& alphas) {
  if (windows.n() != sys.n()) throw DimensionError("window length does not match the system");
  check_params(alphas, windows.P());
  const Index P = windows.P();
  const double m = static_cast<double>(sys.m());
  WindowedGcvTerms t{Eigen::VectorXd(P), Eigen::VectorXd(P)};
  for (Index p = 0; p < P; ++p) {
    double slack = static_cast<double>(sys.m() - sys.n());
    double win_trace = 0.0;
    for (Index j = 0; j < sys.n(); ++j) {
      const double dl = sys.delta()[j];
      const double lm = sys.lambda()[j];
      slack += complement_entry(dl, lm, alphas[p]);
      const double w = windows.weight(p, j);
      if (w != 0.0) win_trace += w * filter_entry(dl, lm, alphas[p]);
    }
    t.mu[p] = slack / m;
    t.nu[p] = 1.0 - win_trace / m;
  }
  return t;
}

double gcv_windowed_true(const SpectralSystem& sys, const Eigen::VectorXd& dhat, const WindowSet& windows,
                         const ParamVector& alphas) {
  if (dhat.size() != sys.m()) throw DimensionError("spectral data length must equal m");
  const Index P = windows.P();
  const Index n = sys.n();
  const double m = static_cast<double>(sys.m());

  check_params(alphas, P);
  if (windows.n() != n) throw DimensionError("window length does not match the system");

  Eigen::VectorXd mu(P);
  double shift = 1.0;  // 1 + sum_p (1 - nu_p) / mu_p
  std::vector<Eigen::VectorXd> phi(static_cast<std::size_t>(P));
  for (Index p = 0; p < P; ++p) {
    auto& f = phi[static_cast<std::size_t>(p)];
    f.resize(n);
    double slack = static_cast<double>(sys.m() - n);
    double win_trace = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double dl = sys.delta()[j];
      const double lm = sys.lambda()[j];
      slack += complement_entry(dl, lm, alphas[p]);
      f[j] = windows.weight(p, j) * filter_entry(dl, lm, alphas[p]);
      win_trace += f[j];
    }
    mu[p] = slack / m;
    if (!(mu[p] > kSaturationTol)) throw SaturatedTraceError("saturated window trace");
    shift += (win_trace / m) / mu[p];
  }

  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    double b = shift;
    for (Index p = 0; p < P; ++p) b -= phi[static_cast<std::size_t>(p)][j] / mu[p];
    total += b * b * dhat[j] * dhat[j];
  }
  if (sys.m() > n) total += shift * shift * dhat.tail(sys.m() - n).squaredNorm();
  return total / m;
}

double gcv_md_windowed_true(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                            const ParamVector& alphas) {
  check_sets(sets, windows);
  double total = 0.0;
  for (std::size_t r = 0; r < sets.size(); ++r)
    total += gcv_windowed_true(sets[r].sys, sets[r].dhat, windows[r], alphas);
  return total / static_cast<double>(sets.size());
}

double gcv_windowed_decoupled(std::span<const SpectralData> sets, std::span<const WindowSet> windows,
                              Index p, double alpha) {
  check_separable(sets, windows, p, alpha);
  const Index last = windows[0].P() - 1;
  double res = 0.0;
  double tr = 0.0;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    const auto& s = sets[r];
    for (Index j = 0; j < s.sys.n(); ++j) {
      if (windows[r].owner(j) != p) continue;
      const double dl = s.sys.delta()[j];
      const double lm = s.sys.lambda()[j];
      const double psi = complement_entry(dl, lm, alpha);
      res += psi * psi * s.dhat[j] * s.dhat[j];
      tr += filter_entry(dl, lm, alpha);
    }
    if (p == last) res += tail_energy(s);
  }
  const double M = total_rows(sets);
  const double base = (M - tr) / M;
  const double den = base * base;
  if (!(den > kSaturationTol)) throw SaturatedTraceError("saturated trace");
  return (res / M) / den;
}

double mse_learning(std::span<const SpectralData> sets, std::span<const Eigen::VectorXd> truths,
                    std::span<const WindowSet> windows, const ParamVector& alphas) {
  check_sets(sets, windows);
  if (truths.size() != sets.size()) throw DomainError("mse learning requires one true solution per data set");
  double total = 0.0;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    if (truths[r].size() != sets[r].sys.n()) throw DimensionError("true solution length must equal n");
    const auto sol = solve_windowed_spectral(sets[r].sys, sets[r].dhat, windows[r], alphas);
    total += (sol.x - truths[r]).squaredNorm();
  }
  return total / static_cast<double>(sets.size());
}

SpectralMse::SpectralMse(std::span<const SpectralData> sets, std::span<const Eigen::VectorXd> truths)
    : sets_(sets.begin(), sets.end()), truths_(truths.begin(), truths.end()) {
  if (sets_.empty()) throw DimensionError("at least one data set is required");
  if (truths_.size() != sets_.size()) throw DomainError("mse learning requires one true solution per data set");
  fast_ = true;
  for (std::size_t r = 0; r < sets_.size(); ++r) {
    if (truths_[r].size() != sets_[r].sys.n()) throw DimensionError("true solution length must equal n");
    const SpectralBasis* b = sets_[r].sys.basis();
    if (!b || !b->synthesis_scale()) fast_ = false;
  }
  if (!fast_) return;
  for (std::size_t r = 0; r < sets_.size(); ++r) {
    const auto& s = sets_[r];
    const Eigen::VectorXd& scale = *s.sys.basis()->synthesis_scale();
    Eigen::VectorXd g(s.sys.n());
    for (Index j = 0; j < s.sys.n(); ++j) {
      const double dl = s.sys.delta()[j];
      g[j] = dl == 0.0 ? 0.0 : scale[j] * s.dhat[j] / dl;
    }
    gain_.push_back(std::move(g));
    target_.push_back(s.sys.basis()->synthesis_coordinates(truths_[r]));
  }
}

double SpectralMse::value(std::span<const WindowSet> windows, const ParamVector& alphas) const {
  if (!fast_) return mse_learning(sets_, truths_, windows, alphas);
  check_sets(sets_, windows);
  double total = 0.0;
  for (std::size_t r = 0; r < sets_.size(); ++r) {
    const Eigen::VectorXd phi = windowed_filter(sets_[r].sys, windows[r], alphas);
    total += (phi.cwiseProduct(gain_[r]) - target_[r]).squaredNorm();
  }
  return total / static_cast<double>(sets_.size());
}

double SpectralMse::window_value(std::span<const WindowSet> windows, Index p, double alpha) const {
  if (!fast_) throw DomainError("per-window mse requires a scaled orthogonal synthesis");
  check_separable(sets_, windows, p, alpha);
  double total = 0.0;
  for (std::size_t r = 0; r < sets_.size(); ++r) {
    const auto& s = sets_[r];
    for (Index j = 0; j < s.sys.n(); ++j) {
      if (windows[r].owner(j) != p) continue;
      const double e = filter_entry(s.sys.delta()[j], s.sys.lambda()[j], alpha) * gain_[r][j] - target_[r][j];
      total += e * e;
    }
  }
  return total / static_cast<double>(sets_.size());
}

double estimate_sigma2_mad(const SpectralSystem& sys, const Eigen::VectorXd& dhat) {
  if (dhat.size() != sys.m()) throw DimensionError("spectral data length must equal m");
  std::vector<double> mags;
  const Index count = std::max<Index>(1, sys.q_star() / 4);
  for (Index j = 0; j < count; ++j) mags.push_back(std::abs(dhat[j]));
  for (Index j = sys.n(); j < sys.m(); ++j) mags.push_back(std::abs(dhat[j]));
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  double med = *mid;
  if (mags.size() % 2 == 0) {
    const double lower = *std::max_element(mags.begin(), mid);
    med = 0.5 * (med + lower);
  }
  const double sigma = med / 0.6745;
  return sigma * sigma;
}

}  // namespace winreg
