#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "winreg/spectral.hpp"

namespace winreg {

enum class Spacing { linear, log };

enum class WindowKind { none, nonoverlap_linear, nonoverlap_log, cosine_linear, cosine_log };

/// Short names used in configuration files: none, lin, log, lincos, logcos.
std::string window_kind_name(WindowKind kind);
WindowKind parse_window_kind(const std::string& name);

bool is_overlapping(WindowKind kind);

/// P+1 decreasing partition values over the finite, nonzero generalized
/// spectral values, together with the spacing used to produce them.
struct Partitions {
  Eigen::VectorXd omega;
  Spacing spacing = Spacing::linear;
  Index count() const { return omega.size() - 1; }
};

/// Weights w_j^(p) stored as a P x n matrix (row p is window p).
class WindowSet {
 public:
  WindowSet(WindowKind kind, Eigen::VectorXd partitions, Eigen::MatrixXd weights);

  /// The single all-ones window over n indices.
  static WindowSet trivial(Index n);

  Index P() const { return weights_.rows(); }
  Index n() const { return weights_.cols(); }
  WindowKind kind() const { return kind_; }
  bool overlapping() const { return is_overlapping(kind_); }
  const Eigen::VectorXd& partitions() const { return partitions_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double weight(Index p, Index j) const { return weights_(p, j); }

  /// Window index owning j. Only valid for non-overlapping sets.
  Index owner(Index j) const;

  /// Rows are windows, columns are spectral indices.
  void write_csv(std::ostream& out) const;

 private:
  WindowKind kind_;
  Eigen::VectorXd partitions_;
  Eigen::MatrixXd weights_;
  std::vector<Index> owner_;
};

Partitions make_partitions(const SpectralSystem& sys, Index P, Spacing spacing);

WindowSet indicator_windows(const Partitions& partitions, const SpectralSystem& sys);

WindowSet cosine_windows(const Partitions& partitions, const SpectralSystem& sys);

/// Partitions plus the generator implied by `kind`; `none` yields the trivial set.
WindowSet make_windows(const SpectralSystem& sys, WindowKind kind, Index P);

}  // namespace winreg
