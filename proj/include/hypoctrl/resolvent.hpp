#pragma once

#include <hypoctrl/common.hpp>
#include <hypoctrl/matrix_poly.hpp>

#include <functional>
#include <vector>

namespace hypoctrl::tvsys {

using TimeMatrix = std::function<Mat(double)>;

namespace detail {
inline Mat rk4_step(const TimeMatrix& M, double t, double h, const Mat& R) {
  const Mat k1 = M(t) * R;
  const Mat k2 = M(t + 0.5 * h) * (R + 0.5 * h * k1);
  const Mat k3 = M(t + 0.5 * h) * (R + 0.5 * h * k2);
  const Mat k4 = M(t + h) * (R + h * k3);
  return R + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}
}  // namespace detail

/// State-transition matrix R(t1,t0) of dR/dt = M(t) R, R(t0,t0) = I, by the
/// classical fourth-order one-step method on a uniform grid. Works in both
/// time directions (h changes sign).
inline Mat resolvent(const TimeMatrix& M, double t0, double t1, int steps = 2048) {
  require(steps >= 1, "resolvent: steps >= 1");
  const Mat probe = M(t0);
  const int d = static_cast<int>(probe.rows());
  Mat R = Mat::Identity(d, d);
  if (t0 == t1) return R;
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    R = detail::rk4_step(M, t, h, R);
    t = t0 + (i + 1) * h;
    if (!R.allFinite()) throw std::runtime_error("resolvent: non-finite matrix entries");
  }
  return R;
}

struct DeterminantCheck {
  double det_R = 0.0;
  double liouville = 0.0;
  double residual = 0.0;
};

/// det R(t1,t0) against exp(integral of Tr M) by composite Simpson quadrature.
inline DeterminantCheck flow_determinant_check(const TimeMatrix& M, double t0, double t1,
                                               int steps = 2048) {
  require(steps >= 1, "flow_determinant_check: steps >= 1");
  DeterminantCheck out;
  out.det_R = resolvent(M, t0, t1, steps).determinant();
  const int n = 2 * steps;
  const double h = (t1 - t0) / n;
  double acc = M(t0).trace() + M(t1).trace();
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * M(t0 + i * h).trace();
  out.liouville = std::exp(acc * h / 3.0);
  const double scale = std::max({1.0, std::abs(out.det_R), std::abs(out.liouville)});
  out.residual = std::abs(out.det_R - out.liouville) / scale;
  return out;
}

/// Two-parameter solution operator with cached transition matrices on a
/// uniform grid, for repeated queries R(grid_i, grid_j) along one sweep.
/// Grid node k holds R(t_start + k*dt, t_start).
class FlowResolvent {
 public:
  FlowResolvent(TimeMatrix M, double t_start, double t_end, int n_nodes,
                int substeps_per_node = 8)
      : M_(std::move(M)), t_start_(t_start), t_end_(t_end) {
    require(n_nodes >= 2, "FlowResolvent: n_nodes >= 2");
    require(substeps_per_node >= 1, "FlowResolvent: substeps >= 1");
    const int d = static_cast<int>(M_(t_start).rows());
    nodes_.reserve(n_nodes);
    Mat R = Mat::Identity(d, d);
    nodes_.push_back(R);
    const double dt = (t_end - t_start) / (n_nodes - 1);
    for (int k = 1; k < n_nodes; ++k) {
      const double a = t_start + (k - 1) * dt;
      const double h = dt / substeps_per_node;
      for (int s = 0; s < substeps_per_node; ++s) R = detail::rk4_step(M_, a + s * h, h, R);
      if (!R.allFinite()) throw std::runtime_error("FlowResolvent: non-finite matrix entries");
      nodes_.push_back(R);
    }
  }

  int dim() const { return static_cast<int>(nodes_[0].rows()); }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  double node_time(int k) const {
    return t_start_ + k * (t_end_ - t_start_) / (n_nodes() - 1);
  }

  /// R(t_k, t_start).
  const Mat& from_start(int k) const { return nodes_.at(k); }

  /// R(t_k, t_j) through the cocycle R(t_k,t0) R(t0,t_j).
  Mat between(int k, int j) const {
    return nodes_.at(k) * nodes_.at(j).inverse();
  }

 private:
  TimeMatrix M_;
  double t_start_, t_end_;
  std::vector<Mat> nodes_;
};

}  // namespace hypoctrl::tvsys
