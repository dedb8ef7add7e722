#pragma once

#include <hypoctrl/common.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace hypoctrl::geom {

using Interval = std::pair<double, double>;

/// Sorts, drops empty pieces and merges overlaps.
inline std::vector<Interval> normalize_intervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& [lo, hi] : v) {
    if (!(hi > lo)) continue;
    if (!out.empty() && lo <= out.back().second) {
      out.back().second = std::max(out.back().second, hi);
    } else {
      out.emplace_back(lo, hi);
    }
  }
  return out;
}

inline std::vector<Interval> intersect_intervals(const std::vector<Interval>& a, double lo,
                                                 double hi) {
  std::vector<Interval> out;
  for (const auto& [l, h] : a) {
    const double x = std::max(l, lo), y = std::min(h, hi);
    if (y > x) out.emplace_back(x, y);
  }
  return out;
}

/// Rule generating an unbounded interval family lazily; only the pieces
/// meeting a queried window are ever materialized.
struct IntervalGenerator {
  enum class Kind {
    None,
    DyadicStrips,   // (n - w*2^{-|n|}, n + w*2^{-|n|}) for all integers n
    SquareBlocks,   // [-1,1] plus (n^2, n^2+n) and (-n^2-n, -n^2) for n >= 1
    Periodic,       // (k*period + offset, k*period + offset + len) for all k
  };
  Kind kind = Kind::None;
  double a = 1.0;  // DyadicStrips: w; Periodic: period
  double b = 0.0;  // Periodic: offset
  double c = 0.0;  // Periodic: len

  std::vector<Interval> materialize(double lo, double hi) const {
    std::vector<Interval> out;
    switch (kind) {
      case Kind::None:
        break;
      case Kind::DyadicStrips: {
        const long n0 = static_cast<long>(std::floor(lo)) - 1;
        const long n1 = static_cast<long>(std::ceil(hi)) + 1;
        for (long n = n0; n <= n1; ++n) {
          const double w = a * std::exp2(-static_cast<double>(std::labs(n)));
          out.emplace_back(n - w, n + w);
        }
        break;
      }
      case Kind::SquareBlocks: {
        out.emplace_back(-1.0, 1.0);
        const double m = std::max(std::abs(lo), std::abs(hi));
        const long nmax = static_cast<long>(std::sqrt(std::max(m, 0.0))) + 2;
        for (long n = 1; n <= nmax; ++n) {
          const double p = static_cast<double>(n) * n;
          out.emplace_back(p, p + n);
          out.emplace_back(-p - n, -p);
        }
        break;
      }
      case Kind::Periodic: {
        require(a > 0 && c > 0, "Periodic generator: period and length positive");
        const long k0 = static_cast<long>(std::floor((lo - b - c) / a)) - 1;
        const long k1 = static_cast<long>(std::ceil((hi - b) / a)) + 1;
        for (long k = k0; k <= k1; ++k) out.emplace_back(k * a + b, k * a + b + c);
        break;
      }
    }
    return intersect_intervals(normalize_intervals(std::move(out)), lo, hi);
  }

  bool contains(double x) const {
    switch (kind) {
      case Kind::None:
        return false;
      case Kind::DyadicStrips: {
        const double n = std::round(x);
        const double w = a * std::exp2(-std::abs(n));
        return std::abs(x - n) < w;
      }
      case Kind::SquareBlocks: {
        const double y = std::abs(x);
        if (y < 1.0) return true;
        const long n = static_cast<long>(std::floor(std::sqrt(y)));
        for (long m = std::max(1L, n - 1); m <= n + 1; ++m) {
          const double p = static_cast<double>(m) * m;
          if (y > p && y < p + m) return true;
        }
        return false;
      }
      case Kind::Periodic: {
        double r = std::fmod(x - b, a);
        if (r < 0) r += a;
        return r > 0 && r < c;
      }
    }
    return false;
  }
};

/// Constructive solid geometry description of a subset of R^d. Primitives are
/// open sets (strict inequalities); measure estimation is insensitive to the
/// boundary convention.
class Region {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    enum class Type {
      Empty,
      Full,
      Ball,
      AxisBox,
      HalfSpace,
      Sector2D,
      IntervalUnion1D,
      AffineImage,
      Scale,
      Union,
      Intersect,
      Complement,
    };
    Type type = Type::Empty;

    Vec center;          // Ball
    double radius = 0;   // Ball
    Vec lo, hi;          // AxisBox
    Vec normal;          // HalfSpace: {x : normal.x > offset}
    double offset = 0;   // HalfSpace
    double angle_lo = 0, angle_hi = 0;  // Sector2D
    bool antipodal = false;
    std::vector<Interval> intervals;    // IntervalUnion1D (explicit part)
    IntervalGenerator generator;        // IntervalUnion1D (lazy part)
    int axis = 0;                       // IntervalUnion1D: tested coordinate
    Mat matrix, matrix_inv;             // AffineImage
    Vec shift;                          // AffineImage
    double factor = 1.0;                // Scale
    NodePtr a, b;                       // children
  };

  explicit Region(NodePtr n) : node_(std::move(n)) {}

 public:
  Region() : node_(std::make_shared<Node>()) {}

  static Region empty() { return Region(); }

  static Region full() {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Full;
    return Region(n);
  }

  static Region ball(Vec center, double radius) {
    require(radius > 0, "ball: radius > 0");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Ball;
    n->center = std::move(center);
    n->radius = radius;
    return Region(n);
  }

  static Region axis_box(Vec lo, Vec hi) {
    require(lo.size() == hi.size(), "axis_box: size mismatch");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::AxisBox;
    n->lo = std::move(lo);
    n->hi = std::move(hi);
    return Region(n);
  }

  static Region half_space(Vec normal, double offset) {
    const double nn = normal.norm();
    require(nn > 0, "half_space: nonzero normal");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::HalfSpace;
    n->normal = normal / nn;
    n->offset = offset / nn;
    return Region(n);
  }

  /// {rho (cos phi, sin phi) : rho > 0, phi in (angle_lo, angle_hi)}, doubled
  /// through the origin when antipodal.
  static Region sector2d(double angle_lo, double angle_hi, bool antipodal) {
    require(angle_hi > angle_lo && angle_hi - angle_lo < 2 * pi, "sector2d: angle range");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Sector2D;
    n->angle_lo = angle_lo;
    n->angle_hi = angle_hi;
    n->antipodal = antipodal;
    return Region(n);
  }

  static Region interval_union(std::vector<Interval> intervals, int axis = 0) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::IntervalUnion1D;
    n->intervals = normalize_intervals(std::move(intervals));
    n->axis = axis;
    return Region(n);
  }

  static Region generated_intervals(IntervalGenerator gen,
                                    std::vector<Interval> extra = {}, int axis = 0) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::IntervalUnion1D;
    n->intervals = normalize_intervals(std::move(extra));
    n->generator = gen;
    n->axis = axis;
    return Region(n);
  }

  /// Image {M x + shift : x in child}; membership uses the inverse map.
  static Region affine_image(const Mat& m, Vec shift, Region child) {
    require(m.rows() == m.cols(), "affine_image: square matrix");
    Eigen::FullPivLU<Mat> lu(m);
    require(lu.isInvertible(), "affine_image: invertible matrix");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::AffineImage;
    n->matrix = m;
    n->matrix_inv = lu.inverse();
    n->shift = std::move(shift);
    n->a = child.node_;
    return Region(n);
  }

  static Region scale(double factor, Region child) {
    require(factor != 0, "scale: nonzero factor");
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Scale;
    n->factor = factor;
    n->a = child.node_;
    return Region(n);
  }

  static Region union_of(Region x, Region y) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Union;
    n->a = x.node_;
    n->b = y.node_;
    return Region(n);
  }

  static Region intersect(Region x, Region y) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Intersect;
    n->a = x.node_;
    n->b = y.node_;
    return Region(n);
  }

  static Region complement(Region x) {
    auto n = std::make_shared<Node>();
    n->type = Node::Type::Complement;
    n->a = x.node_;
    return Region(n);
  }

  bool contains(const Vec& x) const {
    require(x.allFinite(), "contains: finite point");
    return contains_node(*node_, x);
  }

  /// Exact 1D interval decomposition of the region restricted to [lo,hi],
  /// when the tree supports it (interval unions, 1D balls/boxes and
  /// scale/affine/boolean combinations thereof). Empty optional otherwise.
  std::optional<std::vector<Interval>> intervals_on(double lo, double hi) const {
    return intervals_node(*node_, lo, hi);
  }

  nlohmann::json to_json() const { return json_node(*node_); }
  static Region from_json(const nlohmann::json& j);

 private:
  static bool contains_node(const Node& n, const Vec& x) {
    switch (n.type) {
      case Node::Type::Empty:
        return false;
      case Node::Type::Full:
        return true;
      case Node::Type::Ball:
        return (x - n.center).norm() < n.radius;
      case Node::Type::AxisBox:
        for (Eigen::Index i = 0; i < x.size(); ++i)
          if (!(x(i) > n.lo(i) && x(i) < n.hi(i))) return false;
        return true;
      case Node::Type::HalfSpace:
        return n.normal.dot(x) > n.offset;
      case Node::Type::Sector2D: {
        if (x.size() != 2 || (x(0) == 0 && x(1) == 0)) return false;
        const double phi = std::atan2(x(1), x(0));
        auto in_arc = [&](double p) {
          double rel = std::fmod(p - n.angle_lo, 2 * pi);
          if (rel < 0) rel += 2 * pi;
          return rel > 0 && rel < n.angle_hi - n.angle_lo;
        };
        return in_arc(phi) || (n.antipodal && in_arc(phi + pi));
      }
      case Node::Type::IntervalUnion1D: {
        const double v = x(n.axis);
        auto it = std::upper_bound(n.intervals.begin(), n.intervals.end(),
                                   Interval{v, std::numeric_limits<double>::infinity()});
        if (it != n.intervals.begin()) {
          const auto& [lo, hi] = *(it - 1);
          if (v > lo && v < hi) return true;
        }
        return n.generator.contains(v);
      }
      case Node::Type::AffineImage:
        return contains_node(*n.a, n.matrix_inv * (x - n.shift));
      case Node::Type::Scale:
        return contains_node(*n.a, x / n.factor);
      case Node::Type::Union:
        return contains_node(*n.a, x) || contains_node(*n.b, x);
      case Node::Type::Intersect:
        return contains_node(*n.a, x) && contains_node(*n.b, x);
      case Node::Type::Complement:
        return !contains_node(*n.a, x);
    }
    return false;
  }

  static std::optional<std::vector<Interval>> intervals_node(const Node& n, double lo,
                                                             double hi) {
    if (!(hi > lo)) return std::vector<Interval>{};
    switch (n.type) {
      case Node::Type::Empty:
        return std::vector<Interval>{};
      case Node::Type::Full:
        return std::vector<Interval>{{lo, hi}};
      case Node::Type::Ball:
        if (n.center.size() != 1) return std::nullopt;
        return intersect_intervals({{n.center(0) - n.radius, n.center(0) + n.radius}}, lo, hi);
      case Node::Type::AxisBox:
        if (n.lo.size() != 1) return std::nullopt;
        return intersect_intervals({{n.lo(0), n.hi(0)}}, lo, hi);
      case Node::Type::IntervalUnion1D: {
        if (n.axis != 0) return std::nullopt;
        auto v = intersect_intervals(n.intervals, lo, hi);
        auto g = n.generator.materialize(lo, hi);
        v.insert(v.end(), g.begin(), g.end());
        return normalize_intervals(std::move(v));
      }
      case Node::Type::Scale: {
        const double f = n.factor;
        if (f > 0) {
          auto child = intervals_node(*n.a, lo / f, hi / f);
          if (!child) return std::nullopt;
          std::vector<Interval> out;
          for (auto& [l, h] : *child) out.emplace_back(l * f, h * f);
          return normalize_intervals(std::move(out));
        }
        auto child = intervals_node(*n.a, hi / f, lo / f);
        if (!child) return std::nullopt;
        std::vector<Interval> out;
        for (auto& [l, h] : *child) out.emplace_back(h * f, l * f);
        return normalize_intervals(std::move(out));
      }
      case Node::Type::AffineImage: {
        if (n.matrix.rows() != 1) return std::nullopt;
        const double m = n.matrix(0, 0), s = n.shift(0);
        const double a = (lo - s) / m, b = (hi - s) / m;
        auto child = intervals_node(*n.a, std::min(a, b), std::max(a, b));
        if (!child) return std::nullopt;
        std::vector<Interval> out;
        for (auto& [l, h] : *child) {
          const double u = m * l + s, v = m * h + s;
          out.emplace_back(std::min(u, v), std::max(u, v));
        }
        return normalize_intervals(std::move(out));
      }
      case Node::Type::Union: {
        auto x = intervals_node(*n.a, lo, hi);
        auto y = intervals_node(*n.b, lo, hi);
        if (!x || !y) return std::nullopt;
        x->insert(x->end(), y->begin(), y->end());
        return normalize_intervals(std::move(*x));
      }
      case Node::Type::Intersect: {
        auto x = intervals_node(*n.a, lo, hi);
        auto y = intervals_node(*n.b, lo, hi);
        if (!x || !y) return std::nullopt;
        std::vector<Interval> out;
        for (const auto& [al, ah] : *x)
          for (const auto& [bl, bh] : *y) {
            const double l = std::max(al, bl), h = std::min(ah, bh);
            if (h > l) out.emplace_back(l, h);
          }
        return normalize_intervals(std::move(out));
      }
      case Node::Type::Complement: {
        auto x = intervals_node(*n.a, lo, hi);
        if (!x) return std::nullopt;
        std::vector<Interval> out;
        double cur = lo;
        for (const auto& [l, h] : *x) {
          if (l > cur) out.emplace_back(cur, l);
          cur = std::max(cur, h);
        }
        if (hi > cur) out.emplace_back(cur, hi);
        return out;
      }
      default:
        return std::nullopt;
    }
  }

  static nlohmann::json json_node(const Node& n);
  NodePtr node_;
};

inline nlohmann::json Region::json_node(const Node& n) {
  using nlohmann::json;
  json j;
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  switch (n.type) {
    case Node::Type::Empty:
      j["type"] = "empty";
      break;
    case Node::Type::Full:
      j["type"] = "full";
      break;
    case Node::Type::Ball:
      j["type"] = "ball";
      j["center"] = vec(n.center);
      j["radius"] = n.radius;
      break;
    case Node::Type::AxisBox:
      j["type"] = "axis_box";
      j["lo"] = vec(n.lo);
      j["hi"] = vec(n.hi);
      break;
    case Node::Type::HalfSpace:
      j["type"] = "half_space";
      j["normal"] = vec(n.normal);
      j["offset"] = n.offset;
      break;
    case Node::Type::Sector2D:
      j["type"] = "sector2d";
      j["angle_lo"] = n.angle_lo;
      j["angle_hi"] = n.angle_hi;
      j["antipodal"] = n.antipodal;
      break;
    case Node::Type::IntervalUnion1D: {
      j["type"] = "interval_union";
      j["axis"] = n.axis;
      auto& arr = j["intervals"] = nlohmann::json::array();
      for (auto& [lo, hi] : n.intervals) arr.push_back({lo, hi});
      switch (n.generator.kind) {
        case IntervalGenerator::Kind::None:
          break;
        case IntervalGenerator::Kind::DyadicStrips:
          j["generator"] = {{"kind", "dyadic_strips"}, {"w", n.generator.a}};
          break;
        case IntervalGenerator::Kind::SquareBlocks:
          j["generator"] = {{"kind", "square_blocks"}};
          break;
        case IntervalGenerator::Kind::Periodic:
          j["generator"] = {{"kind", "periodic"},
                            {"period", n.generator.a},
                            {"offset", n.generator.b},
                            {"len", n.generator.c}};
          break;
      }
      break;
    }
    case Node::Type::AffineImage: {
      j["type"] = "affine_image";
      std::vector<double> flat(n.matrix.size());
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          flat.data(), n.matrix.rows(), n.matrix.cols()) = n.matrix;
      j["matrix"] = flat;
      j["dim"] = n.matrix.rows();
      j["shift"] = vec(n.shift);
      j["child"] = json_node(*n.a);
      break;
    }
    case Node::Type::Scale:
      j["type"] = "scale";
      j["factor"] = n.factor;
      j["child"] = json_node(*n.a);
      break;
    case Node::Type::Union:
      j["type"] = "union";
      j["a"] = json_node(*n.a);
      j["b"] = json_node(*n.b);
      break;
    case Node::Type::Intersect:
      j["type"] = "intersect";
      j["a"] = json_node(*n.a);
      j["b"] = json_node(*n.b);
      break;
    case Node::Type::Complement:
      j["type"] = "complement";
      j["child"] = json_node(*n.a);
      break;
  }
  return j;
}

inline Region Region::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  auto vec = [](const nlohmann::json& a) {
    auto v = a.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  if (type == "empty") return Region::empty();
  if (type == "full") return Region::full();
  if (type == "ball") return Region::ball(vec(j.at("center")), j.at("radius").get<double>());
  if (type == "axis_box") return Region::axis_box(vec(j.at("lo")), vec(j.at("hi")));
  if (type == "half_space")
    return Region::half_space(vec(j.at("normal")), j.at("offset").get<double>());
  if (type == "sector2d")
    return Region::sector2d(j.at("angle_lo").get<double>(), j.at("angle_hi").get<double>(),
                            j.at("antipodal").get<bool>());
  if (type == "interval_union") {
    std::vector<Interval> iv;
    for (const auto& p : j.at("intervals")) iv.emplace_back(p[0].get<double>(), p[1].get<double>());
    IntervalGenerator gen;
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      const std::string kind = g.at("kind").get<std::string>();
      if (kind == "dyadic_strips") {
        gen.kind = IntervalGenerator::Kind::DyadicStrips;
        gen.a = g.value("w", 1.0);
      } else if (kind == "square_blocks") {
        gen.kind = IntervalGenerator::Kind::SquareBlocks;
      } else if (kind == "periodic") {
        gen.kind = IntervalGenerator::Kind::Periodic;
        gen.a = g.at("period").get<double>();
        gen.b = g.value("offset", 0.0);
        gen.c = g.at("len").get<double>();
      } else {
        throw std::invalid_argument("Region JSON: unknown generator kind " + kind);
      }
    }
    return Region::generated_intervals(gen, std::move(iv), j.value("axis", 0));
  }
  if (type == "affine_image") {
    const int d = j.at("dim").get<int>();
    auto flat = j.at("matrix").get<std::vector<double>>();
    Mat m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = flat[r * d + c];
    return Region::affine_image(m, vec(j.at("shift")), from_json(j.at("child")));
  }
  if (type == "scale")
    return Region::scale(j.at("factor").get<double>(), from_json(j.at("child")));
  if (type == "union") return Region::union_of(from_json(j.at("a")), from_json(j.at("b")));
  if (type == "intersect") return Region::intersect(from_json(j.at("a")), from_json(j.at("b")));
  if (type == "complement") return Region::complement(from_json(j.at("child")));
  throw std::invalid_argument("Region JSON: unknown node type " + type);
}

}  // namespace hypoctrl::geom
