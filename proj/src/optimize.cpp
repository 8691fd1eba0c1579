#include "winreg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "winreg/errors.hpp"

namespace winreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double()>& f) {
  try {
    const double v = f();
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

}  // namespace

void SearchConfig::validate() const {
  if (!(alpha_min > 0.0) || !(alpha_max > alpha_min) || !std::isfinite(alpha_max))
    throw ConfigError("search bounds must satisfy 0 < alpha_min < alpha_max");
  if (grid_points < 8) throw ConfigError("grid_points must be at least 8");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
}

bool near_bound(double alpha, const SearchConfig& config) {
  return std::abs(alpha - config.alpha_min) <= 1e-6 * config.alpha_min ||
         std::abs(alpha - config.alpha_max) <= 1e-6 * config.alpha_max;
}

bool VectorResult::any_boundary() const {
  return std::any_of(at_boundary.begin(), at_boundary.end(), [](bool b) { return b; });
}

ScalarResult minimize_scalar(const ScalarObjective& objective, const SearchConfig& config) {
  config.validate();
  ScalarResult out;
  auto eval = [&](double alpha) {
    const double v = safe_eval([&] { return objective(alpha); });
    out.trace.push_back({Eigen::VectorXd::Constant(1, alpha), v});
    return v;
  };

  const double lo = std::log(config.alpha_min);
  const double hi = std::log(config.alpha_max);
  const int N = config.grid_points;
  std::vector<double> u(static_cast<std::size_t>(N));
  std::vector<double> alpha(static_cast<std::size_t>(N));
  std::vector<double> val(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    u[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(N - 1);
    alpha[i] = i == 0 ? config.alpha_min : (i == N - 1 ? config.alpha_max : std::exp(u[i]));
    val[i] = eval(alpha[i]);
  }
  int k = 0;
  for (int i = 1; i < N; ++i)
    if (val[i] < val[k]) k = i;
  if (!std::isfinite(val[k])) throw InfeasibleError("no feasible alpha");

  double best_a = alpha[k];
  double best_v = val[k];

  double a = u[std::max(k - 1, 0)];
  double b = u[std::min(k + 1, N - 1)];
  const double g = 0.5 * (3.0 - std::sqrt(5.0));
  double x1 = a + g * (b - a);
  double x2 = b - g * (b - a);
  double f1 = eval(std::exp(x1));
  double f2 = eval(std::exp(x2));
  auto consider = [&](double uu, double vv) {
    if (vv < best_v) {
      best_v = vv;
      best_a = std::exp(uu);
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < config.max_iter && (b - a) > config.tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + g * (b - a);
      f1 = eval(std::exp(x1));
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = b - g * (b - a);
      f2 = eval(std::exp(x2));
      consider(x2, f2);
    }
  }
  out.alpha = best_a;
  out.value = best_v;
  out.at_boundary = near_bound(best_a, config);
  return out;
}

VectorResult minimize_vector(const VectorObjective& objective, Eigen::Index P, const SearchConfig& config,
                             const std::optional<Eigen::VectorXd>& warm_start) {
  config.validate();
  if (P < 1) throw DomainError("parameter count must be positive");
  const double lo = std::log(config.alpha_min);
  const double hi = std::log(config.alpha_max);

  VectorResult out;
  Eigen::VectorXd start(P);
  Eigen::VectorXd start_alpha;  // exact alphas of the starting point
  auto clamp = [&](Eigen::VectorXd u) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], lo, hi);
    return u;
  };
  auto to_alpha = [&](const Eigen::VectorXd& u) {
    if (start_alpha.size() == u.size() && u == start) return start_alpha;
    Eigen::VectorXd a = u.array().exp().matrix();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (u[i] <= lo) a[i] = config.alpha_min;
      if (u[i] >= hi) a[i] = config.alpha_max;
    }
    return a;
  };
  auto eval = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd a = to_alpha(u);
    const double v = safe_eval([&] { return objective(a); });
    ++out.evaluations;
    out.trace.push_back({a, v});
    return v;
  };

  if (warm_start) {
    if (warm_start->size() != P) throw DimensionError("warm start has the wrong length");
    for (Eigen::Index i = 0; i < P; ++i) {
      if (!((*warm_start)[i] > 0.0)) throw DomainError("warm start must be positive");
      start[i] = std::log((*warm_start)[i]);
    }
  } else {
    const ScalarResult s = minimize_scalar(
        [&](double alpha) { return objective(Eigen::VectorXd::Constant(P, alpha)); }, config);
    start.setConstant(std::log(s.alpha));
  }
  start = clamp(start);
  start_alpha = to_alpha(start);
  if (warm_start) {
    for (Eigen::Index i = 0; i < P; ++i)
      if (start_alpha[i] > config.alpha_min && start_alpha[i] < config.alpha_max) start_alpha[i] = (*warm_start)[i];
  }

  Eigen::VectorXd best_u = start;
  double best_v = eval(start);
  if (!std::isfinite(best_v)) throw InfeasibleError("infeasible start");

  const int n = static_cast<int>(P);
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1));
  std::vector<double> fv(static_cast<std::size_t>(n + 1));

  auto build = [&](const Eigen::VectorXd& base, double base_v, double step) {
    simplex[0] = base;
    fv[0] = base_v;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v = base;
      v[i] += (v[i] + step <= hi) ? step : -step;
      v = clamp(v);
      simplex[static_cast<std::size_t>(i + 1)] = v;
      fv[static_cast<std::size_t>(i + 1)] = eval(v);
    }
  };

  auto run = [&](double step) {
    build(best_u, best_v, step);
    std::vector<int> order(static_cast<std::size_t>(n + 1));
    for (int it = 0; it < config.max_iter; ++it) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return fv[x] < fv[y]; });
      std::vector<Eigen::VectorXd> s2;
      std::vector<double> f2;
      for (int i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(fv[i]);
      }
      simplex.swap(s2);
      fv.swap(f2);

      double diam = 0.0;
      for (int i = 1; i <= n; ++i) diam = std::max(diam, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
      if (diam <= config.tol) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(P);
      for (int i = 0; i < n; ++i) centroid += simplex[i];
      centroid /= static_cast<double>(n);

      const Eigen::VectorXd xr = clamp(centroid + (centroid - simplex[n]));
      const double fr = eval(xr);
      if (fr < fv[0]) {
        const Eigen::VectorXd xe = clamp(centroid + 2.0 * (centroid - simplex[n]));
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[n] = xe;
          fv[n] = fe;
        } else {
          simplex[n] = xr;
          fv[n] = fr;
        }
        continue;
      }
      if (fr < fv[n - 1]) {
        simplex[n] = xr;
        fv[n] = fr;
        continue;
      }
      const bool outside = fr < fv[n];
      const Eigen::VectorXd xc =
          clamp(outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                        : Eigen::VectorXd(centroid + 0.5 * (simplex[n] - centroid)));
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
      for (int i = 1; i <= n; ++i) {
        simplex[i] = clamp(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
        fv[i] = eval(simplex[i]);
      }
    }
    for (int i = 0; i <= n; ++i) {
      if (fv[i] < best_v) {
        best_v = fv[i];
        best_u = simplex[i];
      }
    }
  };

  run(0.5);
  for (int restart = 0; restart < 4; ++restart) {
    const double before = best_v;
    run(std::max(10.0 * config.tol, 0.05));
    if (!(best_v < before)) break;
  }

  out.alphas = to_alpha(best_u);
  out.value = best_v;
  out.at_boundary.resize(static_cast<std::size_t>(P));
  for (Eigen::Index i = 0; i < P; ++i) out.at_boundary[static_cast<std::size_t>(i)] = near_bound(out.alphas[i], config);
  return out;
}

}  // namespace winreg
