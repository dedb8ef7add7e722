#pragma once

#include <hypoctrl/common.hpp>

#include <nlohmann/json.hpp>

#include <utility>
#include <vector>

namespace hypoctrl::tvsys {

/// Square matrix with polynomial-in-time entries, stored coefficient-wise:
/// P(t) = sum_k coeffs[k] * t^k. Time differentiation is exact, which keeps
/// the Kalman recursion free of finite-difference error.
class MatrixPoly {
 public:
  MatrixPoly() = default;

  explicit MatrixPoly(std::vector<Mat> coeffs) : coeffs_(std::move(coeffs)) {
    require(!coeffs_.empty(), "MatrixPoly: at least one coefficient");
    const Eigen::Index d = coeffs_[0].rows();
    require(d >= 1, "MatrixPoly: positive dimension");
    for (const Mat& c : coeffs_) {
      require(c.rows() == d && c.cols() == d, "MatrixPoly: square coefficients of equal size");
      require(c.allFinite(), "MatrixPoly: finite coefficients");
    }
    trim();
  }

  static MatrixPoly constant(const Mat& m) { return MatrixPoly({m}); }

  static MatrixPoly zero(int dim) { return MatrixPoly({Mat::Zero(dim, dim)}); }

  static MatrixPoly identity(int dim) { return MatrixPoly({Mat::Identity(dim, dim)}); }

  int dim() const { return static_cast<int>(coeffs_[0].rows()); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Mat>& coeffs() const { return coeffs_; }

  /// Horner evaluation at time t.
  Mat eval(double t) const {
    require(std::isfinite(t), "poly_eval: finite t");
    Mat r = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) r = r * t + *it;
    return r;
  }

  /// Coefficient-wise formal derivative; a constant maps to the zero polynomial.
  MatrixPoly derivative() const {
    if (coeffs_.size() == 1) return zero(dim());
    std::vector<Mat> out;
    out.reserve(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
      out.push_back(static_cast<double>(k) * coeffs_[k]);
    return MatrixPoly(std::move(out));
  }

  MatrixPoly operator+(const MatrixPoly& o) const {
    require(dim() == o.dim(), "MatrixPoly: dimension mismatch");
    std::vector<Mat> out(std::max(coeffs_.size(), o.coeffs_.size()), Mat::Zero(dim(), dim()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] += coeffs_[k];
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) out[k] += o.coeffs_[k];
    return MatrixPoly(std::move(out));
  }

  /// Exact polynomial matrix product (coefficient convolution).
  MatrixPoly operator*(const MatrixPoly& o) const {
    require(dim() == o.dim(), "MatrixPoly: dimension mismatch");
    std::vector<Mat> out(coeffs_.size() + o.coeffs_.size() - 1, Mat::Zero(dim(), dim()));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
    return MatrixPoly(std::move(out));
  }

  MatrixPoly transpose() const {
    std::vector<Mat> out;
    out.reserve(coeffs_.size());
    for (const Mat& c : coeffs_) out.push_back(c.transpose());
    return MatrixPoly(std::move(out));
  }

  /// Exact antiderivative with value zero at t=0.
  MatrixPoly antiderivative() const {
    std::vector<Mat> out(coeffs_.size() + 1, Mat::Zero(dim(), dim()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
      out[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return MatrixPoly(std::move(out));
  }

  /// Exact reparametrization P(a*t + b), via binomial expansion.
  MatrixPoly compose_affine(double a, double b) const {
    auto ipow = [](double x, std::size_t p) {
      double r = 1.0;
      for (std::size_t i = 0; i < p; ++i) r *= x;
      return r;
    };
    std::vector<Mat> out(coeffs_.size(), Mat::Zero(dim(), dim()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      double binom = 1.0;  // C(k,j), updated over j
      for (std::size_t j = 0; j <= k; ++j) {
        out[j] += binom * ipow(a, j) * ipow(b, k - j) * coeffs_[k];
        binom *= static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
    }
    return MatrixPoly(std::move(out));
  }

  /// Trace as a scalar polynomial (coefficients of t^k).
  std::vector<double> trace_poly() const {
    std::vector<double> out;
    out.reserve(coeffs_.size());
    for (const Mat& c : coeffs_) out.push_back(c.trace());
    return out;
  }

  bool is_zero() const {
    for (const Mat& c : coeffs_)
      if (c.cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dim"] = dim();
    auto& cs = j["coeffs"] = nlohmann::json::array();
    for (const Mat& c : coeffs_) {
      std::vector<double> flat(c.size());
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          flat.data(), c.rows(), c.cols()) = c;
      cs.push_back(flat);
    }
    return j;
  }

  static MatrixPoly from_json(const nlohmann::json& j) {
    const int d = j.at("dim").get<int>();
    std::vector<Mat> coeffs;
    for (const auto& flat : j.at("coeffs")) {
      auto v = flat.get<std::vector<double>>();
      require(static_cast<int>(v.size()) == d * d, "MatrixPoly JSON: coefficient size");
      Mat c(d, d);
      for (int r = 0; r < d; ++r)
        for (int cidx = 0; cidx < d; ++cidx) c(r, cidx) = v[r * d + cidx];
      coeffs.push_back(c);
    }
    return MatrixPoly(std::move(coeffs));
  }

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back().cwiseAbs().maxCoeff() == 0.0) coeffs_.pop_back();
  }
  std::vector<Mat> coeffs_;
};

/// Generalized Kalman sequence: out[0] = A, out[k+1] = out[k]' + B*out[k].
inline std::vector<MatrixPoly> kalman_sequence(const MatrixPoly& A, const MatrixPoly& B,
                                               int k_max) {
  require(A.dim() == B.dim(), "kalman_sequence: dimension mismatch");
  require(k_max >= 0, "kalman_sequence: k_max >= 0");
  std::vector<MatrixPoly> seq;
  seq.reserve(static_cast<std::size_t>(k_max) + 1);
  seq.push_back(A);
  for (int k = 0; k < k_max; ++k) seq.push_back(seq.back().derivative() + B * seq.back());
  return seq;
}

struct KalmanRank {
  int rank = 0;
  bool holds = false;
  double sigma_max = 0.0;
};

/// Rank of [A_0(t), ..., A_k(t)] via singular values with relative threshold.
inline KalmanRank kalman_rank_at(const std::vector<MatrixPoly>& seq, double t,
                                 double tol = 1e-10) {
  require(!seq.empty(), "kalman_rank_at: empty sequence");
  require(tol > 0, "kalman_rank_at: tol > 0");
  const int d = seq[0].dim();
  Mat stacked(d, d * static_cast<int>(seq.size()));
  for (std::size_t k = 0; k < seq.size(); ++k)
    stacked.middleCols(static_cast<int>(k) * d, d) = seq[k].eval(t);
  Eigen::JacobiSVD<Mat> svd(stacked);
  const Vec sv = svd.singularValues();
  KalmanRank out;
  out.sigma_max = sv.size() ? sv(0) : 0.0;
  if (out.sigma_max > 0.0) {
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol * out.sigma_max) ++out.rank;
  }
  out.holds = (out.rank == d);
  return out;
}

}  // namespace hypoctrl::tvsys
