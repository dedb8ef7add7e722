#pragma once

#include <hypoctrl/common.hpp>
#include <hypoctrl/region.hpp>

#include <cmath>
#include <variant>

namespace hypoctrl::geom {

struct GridMethod {
  double h = 0.0;  // 0 = auto: at least 1e6 cells over the box
};

struct MonteCarloMethod {
  long n = 1'000'000;
  std::uint64_t seed = 0;
  std::uint64_t stream_key = 0;  // split key: (probe index, slice index, ...)
};

using MeasureMethod = std::variant<GridMethod, MonteCarloMethod>;

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (Eigen::Index i = 0; i < lo.size(); ++i) v *= std::max(0.0, hi(i) - lo(i));
    return v;
  }
};

namespace detail {

inline double interval_sum(const std::vector<Interval>& v) {
  double s = 0.0;
  for (const auto& [lo, hi] : v) s += hi - lo;
  return s;
}

inline MeasureEstimate measure_grid(const Region& r, const Box& box, double h) {
  const int d = box.dim();
  if (h <= 0) {
    // resolution giving at least 1e6 cells over the box
    const double target = std::pow(1e6, 1.0 / d);
    h = 0.0;
    for (int i = 0; i < d; ++i) h = std::max(h, (box.hi(i) - box.lo(i)) / target);
  }
  std::vector<long> n(d);
  long total = 1;
  for (int i = 0; i < d; ++i) {
    n[i] = std::max(1L, static_cast<long>(std::ceil((box.hi(i) - box.lo(i)) / h)));
    total *= n[i];
  }
  double cell = 1.0;
  std::vector<double> step(d);
  for (int i = 0; i < d; ++i) {
    step[i] = (box.hi(i) - box.lo(i)) / n[i];
    cell *= step[i];
  }
  long hits = 0;
  Vec x(d);
  std::vector<long> idx(d, 0);
  for (long c = 0; c < total; ++c) {
    long rem = c;
    for (int i = 0; i < d; ++i) {
      idx[i] = rem % n[i];
      rem /= n[i];
      x(i) = box.lo(i) + (idx[i] + 0.5) * step[i];
    }
    if (r.contains(x)) ++hits;
  }
  return {hits * cell, 0.0};
}

inline MeasureEstimate measure_mc(const Region& r, const Box& box, const MonteCarloMethod& m) {
  require(m.n >= 1, "measure: n >= 1");
  CounterRng rng(m.seed, m.stream_key);
  const int d = box.dim();
  long hits = 0;
  Vec x(d);
  for (long i = 0; i < m.n; ++i) {
    for (int j = 0; j < d; ++j) x(j) = box.lo(j) + (box.hi(j) - box.lo(j)) * rng.next_double();
    if (r.contains(x)) ++hits;
  }
  const double vol = box.volume();
  const double p = static_cast<double>(hits) / m.n;
  return {vol * p, vol * std::sqrt(std::max(p * (1 - p), 0.0) / m.n)};
}

}  // namespace detail

/// Lebesgue measure of r intersected with a bounded box. Uses the exact
/// interval decomposition when the region supports it in 1D, otherwise
/// midpoint-grid counting or Monte Carlo sampling.
inline MeasureEstimate measure_in_box(const Region& r, const Box& box,
                                      const MeasureMethod& method = GridMethod{}) {
  if (box.volume() <= 0) return {0.0, 0.0};
  if (box.dim() == 1) {
    if (auto iv = r.intervals_on(box.lo(0), box.hi(0))) return {detail::interval_sum(*iv), 0.0};
  }
  if (std::holds_alternative<GridMethod>(method))
    return detail::measure_grid(r, box, std::get<GridMethod>(method).h);
  return detail::measure_mc(r, box, std::get<MonteCarloMethod>(method));
}

struct ThicknessProbe {
  double min_ratio = 0.0;
  Vec witness;
  std::vector<double> ratios;
};

/// min over probes x of lambda(r ∩ (x + [0,alpha_1] x ... x [0,alpha_d])) / prod alpha_j.
/// The set is reported (delta,alpha)-thick over the probe family iff
/// min_ratio >= delta.
inline ThicknessProbe thickness_probe(const Region& r, const Vec& alpha,
                                      const std::vector<Vec>& probes,
                                      const MeasureMethod& method = GridMethod{}) {
  require(!probes.empty(), "thickness_probe: probes non-empty");
  require((alpha.array() > 0).all(), "thickness_probe: alpha > 0");
  double vol = alpha.prod();
  ThicknessProbe out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (const Vec& x : probes) {
    Box box{x, x + alpha};
    const double ratio = measure_in_box(r, box, method).value / vol;
    out.ratios.push_back(ratio);
    if (ratio < out.min_ratio) {
      out.min_ratio = ratio;
      out.witness = x;
    }
  }
  return out;
}

}  // namespace hypoctrl::geom
