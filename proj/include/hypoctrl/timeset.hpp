#pragma once

#include <hypoctrl/common.hpp>
#include <hypoctrl/region.hpp>

#include <nlohmann/json.hpp>

#include <vector>

namespace hypoctrl {

/// Finite sorted disjoint union of closed time intervals; measures and
/// intersections are exact interval arithmetic.
class TimeSet {
 public:
  TimeSet() = default;

  explicit TimeSet(std::vector<geom::Interval> intervals)
      : intervals_(geom::normalize_intervals(std::move(intervals))) {}

  static TimeSet interval(double lo, double hi) { return TimeSet({{lo, hi}}); }

  const std::vector<geom::Interval>& intervals() const { return intervals_; }

  bool empty() const { return intervals_.empty(); }

  double measure() const {
    double s = 0;
    for (const auto& [lo, hi] : intervals_) s += hi - lo;
    return s;
  }

  /// Closed-interval membership.
  bool contains(double t) const {
    for (const auto& [lo, hi] : intervals_)
      if (t >= lo && t <= hi) return true;
    return false;
  }

  double measure_within(double lo, double hi) const {
    double s = 0;
    for (const auto& [a, b] : intervals_) {
      const double x = std::max(a, lo), y = std::min(b, hi);
      if (y > x) s += y - x;
    }
    return s;
  }

  TimeSet clipped(double lo, double hi) const {
    return TimeSet(geom::intersect_intervals(intervals_, lo, hi));
  }

  TimeSet minus(const std::vector<geom::Interval>& gaps) const {
    std::vector<geom::Interval> cur = intervals_;
    for (const auto& [glo, ghi] : gaps) {
      std::vector<geom::Interval> next;
      for (const auto& [a, b] : cur) {
        if (ghi <= a || glo >= b) {
          next.emplace_back(a, b);
          continue;
        }
        if (glo > a) next.emplace_back(a, glo);
        if (ghi < b) next.emplace_back(ghi, b);
      }
      cur = std::move(next);
    }
    return TimeSet(std::move(cur));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto& arr = j["intervals"] = nlohmann::json::array();
    for (const auto& [lo, hi] : intervals_) arr.push_back({lo, hi});
    return j;
  }

  static TimeSet from_json(const nlohmann::json& j) {
    std::vector<geom::Interval> iv;
    for (const auto& p : j.at("intervals"))
      iv.emplace_back(p[0].get<double>(), p[1].get<double>());
    return TimeSet(std::move(iv));
  }

 private:
  std::vector<geom::Interval> intervals_;
};

}  // namespace hypoctrl
