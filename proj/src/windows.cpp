#include "winreg/windows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>

#include "winreg/errors.hpp"

namespace winreg {

std::string window_kind_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::none: return "none";
    case WindowKind::nonoverlap_linear: return "lin";
    case WindowKind::nonoverlap_log: return "log";
    case WindowKind::cosine_linear: return "lincos";
    case WindowKind::cosine_log: return "logcos";
  }
  return "none";
}

WindowKind parse_window_kind(const std::string& name) {
  if (name == "none") return WindowKind::none;
  if (name == "lin") return WindowKind::nonoverlap_linear;
  if (name == "log") return WindowKind::nonoverlap_log;
  if (name == "lincos") return WindowKind::cosine_linear;
  if (name == "logcos") return WindowKind::cosine_log;
  throw ConfigError("unknown window kind '" + name + "'");
}

bool is_overlapping(WindowKind kind) {
  return kind == WindowKind::cosine_linear || kind == WindowKind::cosine_log;
}

WindowSet::WindowSet(WindowKind kind, Eigen::VectorXd partitions, Eigen::MatrixXd weights)
    : kind_(kind), partitions_(std::move(partitions)), weights_(std::move(weights)) {
  if (weights_.rows() < 1 || weights_.cols() < 1) throw DimensionError("window set must be non-empty");
  if ((weights_.array() < 0.0).any() || (weights_.array() > 1.0).any())
    throw DomainError("window weights must lie in [0, 1]");
  for (Index j = 0; j < weights_.cols(); ++j) {
    if (std::abs(weights_.col(j).sum() - 1.0) > 1e-12)
      throw DomainError("window weights must sum to one at every index");
  }
  for (Index p = 0; p < weights_.rows(); ++p) {
    if (weights_.row(p).maxCoeff() <= 0.0) throw EmptyWindowError("window " + std::to_string(p + 1));
  }
  if (!overlapping()) {
    owner_.resize(static_cast<std::size_t>(weights_.cols()));
    for (Index j = 0; j < weights_.cols(); ++j) {
      Index who = -1;
      for (Index p = 0; p < weights_.rows(); ++p) {
        const double w = weights_(p, j);
        if (w != 0.0 && w != 1.0) throw DomainError("non-overlapping windows need 0/1 weights");
        if (w == 1.0) who = p;
      }
      owner_[static_cast<std::size_t>(j)] = who;
    }
  }
}

WindowSet WindowSet::trivial(Index n) {
  return WindowSet(WindowKind::none, Eigen::VectorXd(), Eigen::MatrixXd::Ones(1, n));
}

Index WindowSet::owner(Index j) const {
  if (overlapping()) throw SeparableFormError();
  return owner_[static_cast<std::size_t>(j)];
}

void WindowSet::write_csv(std::ostream& out) const {
  char buf[32];
  for (Index p = 0; p < P(); ++p) {
    for (Index j = 0; j < n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", weights_(p, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Partitions make_partitions(const SpectralSystem& sys, Index P, Spacing spacing) {
  if (P < 1) throw DomainError("window count must be positive");
  std::set<double> distinct;
  for (Index j = 0; j < sys.n(); ++j) {
    if (!sys.lambda_zero(j) && sys.gamma()[j] > 0.0) distinct.insert(sys.gamma()[j]);
  }
  if (distinct.empty()) throw DomainError("no finite nonzero generalized spectral value");
  if (static_cast<std::size_t>(P) > distinct.size())
    throw EmptyWindowError(std::to_string(P) + " windows over " + std::to_string(distinct.size()) +
                           " distinct spectral values");

  const double gmin = *distinct.begin();
  const double gmax = *distinct.rbegin();
  Partitions out;
  out.spacing = spacing;
  out.omega.resize(P + 1);
  const double pd = static_cast<double>(P);
  for (Index k = 0; k <= P; ++k) {
    const double t = static_cast<double>(k) / pd;
    out.omega[k] = spacing == Spacing::linear
                       ? gmax - t * (gmax - gmin)
                       : std::exp(std::log(gmax) - t * (std::log(gmax) - std::log(gmin)));
  }
  out.omega[0] = gmax;
  out.omega[P] = gmin * (1.0 - 1e-12);
  return out;
}

WindowSet indicator_windows(const Partitions& partitions, const SpectralSystem& sys) {
  const Index P = partitions.count();
  if (P < 1) throw DomainError("partitions need at least two values");
  const auto& om = partitions.omega;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(P, sys.n());
  for (Index j = 0; j < sys.n(); ++j) {
    Index p = P - 1;
    if (sys.lambda_zero(j)) {
      p = 0;
    } else if (sys.gamma()[j] > 0.0) {
      const double g = sys.gamma()[j];
      p = 0;
      while (p < P - 1 && !(g > om[p + 1])) ++p;
    }
    w(p, j) = 1.0;
  }
  const WindowKind kind =
      P == 1 ? WindowKind::none
             : (partitions.spacing == Spacing::linear ? WindowKind::nonoverlap_linear : WindowKind::nonoverlap_log);
  return WindowSet(kind, om, std::move(w));
}

WindowSet cosine_windows(const Partitions& partitions, const SpectralSystem& sys) {
  const Index P = partitions.count();
  if (P < 1) throw DomainError("partitions need at least two values");
  if (P == 1) return WindowSet(WindowKind::none, partitions.omega, Eigen::MatrixXd::Ones(1, sys.n()));

  const bool lg = partitions.spacing == Spacing::log;
  auto tr = [lg](double v) { return lg ? std::log(v) : v; };
  Eigen::VectorXd mid(P);
  for (Index p = 0; p < P; ++p) mid[p] = 0.5 * (tr(partitions.omega[p]) + tr(partitions.omega[p + 1]));

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(P, sys.n());
  for (Index j = 0; j < sys.n(); ++j) {
    if (sys.lambda_zero(j)) {
      w(0, j) = 1.0;
      continue;
    }
    const double g = sys.gamma()[j];
    if (g <= 0.0) {
      w(P - 1, j) = 1.0;
      continue;
    }
    const double v = tr(g);
    if (v >= mid[0]) {
      w(0, j) = 1.0;
    } else if (v <= mid[P - 1]) {
      w(P - 1, j) = 1.0;
    } else {
      Index p = 0;
      while (!(v >= mid[p + 1])) ++p;
      const double s = (mid[p] - v) / (mid[p] - mid[p + 1]);
      const double c = std::cos(0.5 * std::numbers::pi * s);
      w(p, j) = c * c;
      w(p + 1, j) = 1.0 - c * c;
    }
  }
  return WindowSet(lg ? WindowKind::cosine_log : WindowKind::cosine_linear, partitions.omega, std::move(w));
}

WindowSet make_windows(const SpectralSystem& sys, WindowKind kind, Index P) {
  switch (kind) {
    case WindowKind::none:
      return WindowSet::trivial(sys.n());
    case WindowKind::nonoverlap_linear:
      return indicator_windows(make_partitions(sys, P, Spacing::linear), sys);
    case WindowKind::nonoverlap_log:
      return indicator_windows(make_partitions(sys, P, Spacing::log), sys);
    case WindowKind::cosine_linear:
      return cosine_windows(make_partitions(sys, P, Spacing::linear), sys);
    case WindowKind::cosine_log:
      return cosine_windows(make_partitions(sys, P, Spacing::log), sys);
  }
  throw ConfigError("unknown window kind");
}

}  // namespace winreg
