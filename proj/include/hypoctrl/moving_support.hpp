#pragma once

#include <hypoctrl/common.hpp>
#include <hypoctrl/measure.hpp>
#include <hypoctrl/region.hpp>
#include <hypoctrl/timeset.hpp>

#include <functional>
#include <memory>
#include <utility>

namespace hypoctrl::geom {

using TimeFlow = std::function<Mat(double)>;
using TimeScale = std::function<double(double)>;

/// Time-indexed family of control supports omega(t) on [0,T].
class MovingSupport {
  enum class Kind { Static, FlowImage, Dilation, Gated };

 public:
  static MovingSupport static_region(Region r, double horizon) {
    MovingSupport s;
    s.kind_ = Kind::Static;
    s.base_ = std::move(r);
    s.horizon_ = horizon;
    return s;
  }

  /// omega(t) = flow(t) * omega0, e.g. flow(t) = R(T-t, 0).
  static MovingSupport flow_image(Region omega0, TimeFlow flow, double horizon) {
    MovingSupport s;
    s.kind_ = Kind::FlowImage;
    s.base_ = std::move(omega0);
    s.flow_ = std::move(flow);
    s.horizon_ = horizon;
    return s;
  }

  /// omega(t) = scale(t) * omega, e.g. scale(t) = sqrt(1 + 2 mu t).
  static MovingSupport dilation(Region base, TimeScale scale, double horizon) {
    MovingSupport s;
    s.kind_ = Kind::Dilation;
    s.base_ = std::move(base);
    s.scale_ = std::move(scale);
    s.horizon_ = horizon;
    return s;
  }

  /// Same as child inside E, empty outside.
  static MovingSupport gated(MovingSupport child, TimeSet e) {
    MovingSupport s;
    s.kind_ = Kind::Gated;
    s.child_ = std::make_shared<MovingSupport>(std::move(child));
    s.gate_ = std::move(e);
    s.horizon_ = s.child_->horizon_;
    return s;
  }

  double horizon() const { return horizon_; }

  Region region_at(double t) const {
    switch (kind_) {
      case Kind::Static:
        return base_;
      case Kind::FlowImage: {
        const Mat m = flow_(t);
        return Region::affine_image(m, Vec::Zero(m.rows()), base_);
      }
      case Kind::Dilation:
        return Region::scale(scale_(t), base_);
      case Kind::Gated:
        return gate_.contains(t) ? child_->region_at(t) : Region::empty();
    }
    return Region::empty();
  }

  bool indicator(double t, const Vec& x) const { return region_at(t).contains(x); }

 private:
  Kind kind_ = Kind::Static;
  Region base_;
  TimeFlow flow_;
  TimeScale scale_;
  TimeSet gate_;
  std::shared_ptr<MovingSupport> child_;
  double horizon_ = 0.0;
};

struct IntegralThickness {
  double min_J = 0.0;
  Vec argmin;
  std::vector<double> profile;  // per-probe J values, same order as probes
};

/// J(x) = integral over [0,T] of lambda(B(x,r) ∩ flow(t) * omega(t)) dt by
/// composite midpoint quadrature; flow(t) is the pulled-back frame matrix
/// R(0, T-t) of the drift system. Returns the minimum over the probe family
/// together with the full profile.
inline IntegralThickness integral_thickness(const MovingSupport& support, const TimeFlow& flow,
                                            double T, double r, const std::vector<Vec>& probes,
                                            int n_time,
                                            const MeasureMethod& method = GridMethod{}) {
  require(T > 0, "integral_thickness: T > 0");
  require(r > 0, "integral_thickness: r > 0");
  require(n_time >= 1, "integral_thickness: n_time >= 1");
  require(!probes.empty(), "integral_thickness: probes non-empty");

  const double dt = T / n_time;
  const int d = static_cast<int>(probes[0].size());

  // time slices are probe-independent: build the transported regions once
  std::vector<Region> slices;
  slices.reserve(n_time);
  for (int i = 0; i < n_time; ++i) {
    const double t = (i + 0.5) * dt;
    Region omega_t = support.region_at(t);
    if (flow) {
      const Mat m = flow(t);
      omega_t = Region::affine_image(m, Vec::Zero(d), omega_t);
    }
    slices.push_back(std::move(omega_t));
  }

  IntegralThickness out;
  out.min_J = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vec& x = probes[p];
    Box box{Vec(x.array() - r), Vec(x.array() + r)};
    Region ball = Region::ball(x, r);
    double J = 0.0;
    for (int i = 0; i < n_time; ++i) {
      MeasureMethod m = method;
      if (std::holds_alternative<MonteCarloMethod>(m)) {
        auto mc = std::get<MonteCarloMethod>(m);
        mc.stream_key = (p << 20) ^ static_cast<std::uint64_t>(i);
        m = mc;
      }
      J += dt * measure_in_box(Region::intersect(ball, slices[i]), box, m).value;
    }
    out.profile.push_back(J);
    if (J < out.min_J) {
      out.min_J = J;
      out.argmin = x;
    }
  }
  return out;
}

}  // namespace hypoctrl::geom
