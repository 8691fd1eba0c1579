#include "winreg/solver.hpp"

#include <cmath>
#include <string>

#include "winreg/errors.hpp"

namespace winreg {

void check_params(const ParamVector& alphas, Index P) {
  if (alphas.size() != P)
    throw DimensionError("expected " + std::to_string(P) + " parameters, got " +
                         std::to_string(alphas.size()));
  for (Index p = 0; p < P; ++p) {
    if (!(alphas[p] > 0.0) || !std::isfinite(alphas[p]))
      throw DomainError("regularization parameters must be finite and positive");
  }
}

namespace {

void check_windows(const SpectralSystem& sys, const WindowSet& windows, const ParamVector& alphas) {
  if (windows.n() != sys.n()) throw DimensionError("window length does not match the system");
  check_params(alphas, windows.P());
}

}  // namespace

Eigen::VectorXd windowed_filter(const SpectralSystem& sys, const WindowSet& windows,
                                const ParamVector& alphas) {
  check_windows(sys, windows, alphas);
  const Index n = sys.n();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  for (Index p = 0; p < windows.P(); ++p) {
    for (Index j = 0; j < n; ++j) {
      const double w = windows.weight(p, j);
      if (w != 0.0) phi[j] += w * filter_entry(sys.delta()[j], sys.lambda()[j], alphas[p]);
    }
  }
  return phi;
}

Eigen::VectorXd windowed_complement(const SpectralSystem& sys, const WindowSet& windows,
                                    const ParamVector& alphas) {
  check_windows(sys, windows, alphas);
  const Index n = sys.n();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const double dl = sys.delta()[j];
    const double lm = sys.lambda()[j];
    if (dl == 0.0) {
      psi[j] = 1.0;
      continue;
    }
    if (lm == 0.0) continue;
    for (Index p = 0; p < windows.P(); ++p) {
      const double w = windows.weight(p, j);
      if (w == 0.0) continue;
      const double al = alphas[p] * lm;
      psi[j] += w * (al * al) / (dl * dl + al * al);
    }
  }
  return psi;
}

Eigen::VectorXd filtered_coefficients(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                                      const Eigen::VectorXd& phi) {
  const Index n = sys.n();
  Eigen::VectorXd y(n);
  for (Index j = 0; j < n; ++j) {
    const double dl = sys.delta()[j];
    y[j] = dl == 0.0 ? 0.0 : phi[j] * dhat[j] / dl;
  }
  return y;
}

RegularizedSolution solve_windowed_spectral(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                                            const WindowSet& windows, const ParamVector& alphas) {
  if (dhat.size() != sys.m()) throw DimensionError("spectral data length must equal m");
  RegularizedSolution out;
  out.phi_win = windowed_filter(sys, windows, alphas);
  out.x = sys.synthesize(filtered_coefficients(sys, dhat, out.phi_win));
  out.dhat = dhat;
  return out;
}

RegularizedSolution solve_windowed(const SpectralSystem& sys, const Eigen::VectorXd& d,
                                   const WindowSet& windows, const ParamVector& alphas) {
  if (d.size() != sys.m()) throw DimensionError("data length must equal m");
  return solve_windowed_spectral(sys, sys.analyze(d), windows, alphas);
}

RegularizedSolution solve_scalar(const SpectralSystem& sys, const Eigen::VectorXd& d, double alpha) {
  ParamVector a(1);
  a[0] = alpha;
  return solve_windowed(sys, d, WindowSet::trivial(sys.n()), a);
}

double residual_norm_windowed(const SpectralSystem& sys, const Eigen::VectorXd& dhat,
                              const WindowSet& windows, const ParamVector& alphas) {
  if (dhat.size() != sys.m()) throw DimensionError("spectral data length must equal m");
  const Eigen::VectorXd psi = windowed_complement(sys, windows, alphas);
  const Index n = sys.n();
  double r = 0.0;
  for (Index j = 0; j < n; ++j) r += psi[j] * psi[j] * dhat[j] * dhat[j];
  if (sys.m() > n) r += dhat.tail(sys.m() - n).squaredNorm();
  return r;
}

double trace_windowed(const SpectralSystem& sys, const WindowSet& windows, const ParamVector& alphas) {
  const Eigen::VectorXd phi = windowed_filter(sys, windows, alphas);
  double t = static_cast<double>(sys.n() - sys.q_star());
  for (Index j = 0; j < sys.n(); ++j) {
    if (!sys.delta_zero(j) && !sys.lambda_zero(j)) t += phi[j];
  }
  return t;
}

std::vector<RegularizedSolution> solve_multidata(std::span<const SpectralSystem> systems,
                                                 std::span<const Eigen::VectorXd> data,
                                                 std::span<const WindowSet> windows,
                                                 const ParamVector& alphas) {
  if (systems.size() != data.size() || systems.size() != windows.size())
    throw DimensionError("multi-data inputs must have equal counts");
  std::vector<RegularizedSolution> out;
  out.reserve(systems.size());
  for (std::size_t r = 0; r < systems.size(); ++r)
    out.push_back(solve_windowed(systems[r], data[r], windows[r], alphas));
  return out;
}

}  // namespace winreg
