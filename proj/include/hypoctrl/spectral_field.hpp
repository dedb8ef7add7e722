#pragma once

#include <hypoctrl/common.hpp>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace hypoctrl::prop {

/// Sampled Fourier-side state on the uniform grid of [-K,K]^d,
/// xi_j = -K + j * (2K/N), j = 0..N-1 per axis (d = 1 or 2).
/// Norms follow the convention f_hat(xi) = integral f(x) e^{-i x.xi} dx, so
/// ||f||_{L2} = (2 pi)^{-d/2} ||f_hat||_{L2}.
class SpectralField {
 public:
  SpectralField() = default;

  SpectralField(int d, double K, int N)
      : d_(d), K_(K), N_(N), data_(static_cast<std::size_t>(std::pow(N, d)), Complex(0, 0)) {
    require(d == 1 || d == 2, "SpectralField: d in {1,2}");
    require(N >= 2, "SpectralField: N >= 2");
    require(K > 0, "SpectralField: K > 0");
  }

  int dim() const { return d_; }
  double K() const { return K_; }
  int N() const { return N_; }
  double dxi() const { return 2.0 * K_ / N_; }
  double xi(int j) const { return -K_ + j * dxi(); }

  std::size_t size() const { return data_.size(); }
  Complex& at(std::size_t i) { return data_[i]; }
  const Complex& at(std::size_t i) const { return data_[i]; }
  Complex& at2(int i, int j) { return data_[static_cast<std::size_t>(i) * N_ + j]; }
  const Complex& at2(int i, int j) const { return data_[static_cast<std::size_t>(i) * N_ + j]; }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  /// Frequency vector of flat index i.
  Vec freq(std::size_t i) const {
    Vec out(d_);
    if (d_ == 1) {
      out(0) = xi(static_cast<int>(i));
    } else {
      out(0) = xi(static_cast<int>(i) / N_);
      out(1) = xi(static_cast<int>(i) % N_);
    }
    return out;
  }

  double parseval_norm_sq() const {
    double s = 0;
    for (const Complex& c : data_) s += std::norm(c);
    return s * std::pow(dxi(), d_) / std::pow(2 * pi, d_);
  }

  double parseval_norm() const { return std::sqrt(parseval_norm_sq()); }

  /// Bilinear interpolation at frequency eta; returns 0 outside the grid and
  /// counts the miss.
  Complex interpolate(const Vec& eta, long* out_of_grid = nullptr) const {
    const double inv = 1.0 / dxi();
    double u = (eta(0) + K_) * inv;
    if (d_ == 1) {
      const int i0 = static_cast<int>(std::floor(u));
      if (i0 < 0 || i0 + 1 >= N_) {
        if (out_of_grid) ++(*out_of_grid);
        return {0, 0};
      }
      const double fu = u - i0;
      return (1 - fu) * data_[i0] + fu * data_[i0 + 1];
    }
    double v = (eta(1) + K_) * inv;
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    if (i0 < 0 || i0 + 1 >= N_ || j0 < 0 || j0 + 1 >= N_) {
      if (out_of_grid) ++(*out_of_grid);
      return {0, 0};
    }
    const double fu = u - i0, fv = v - j0;
    return (1 - fu) * (1 - fv) * at2(i0, j0) + fu * (1 - fv) * at2(i0 + 1, j0) +
           (1 - fu) * fv * at2(i0, j0 + 1) + fu * fv * at2(i0 + 1, j0 + 1);
  }

  /// CSV rows: xi coordinates, Re, Im.
  void dump_csv(const std::string& path) const {
    std::ofstream f(path);
    require(f.good(), "dump_csv: cannot open " + path);
    f.precision(17);
    if (d_ == 1) {
      f << "xi,re,im\n";
      for (int j = 0; j < N_; ++j)
        f << xi(j) << ',' << data_[j].real() << ',' << data_[j].imag() << '\n';
    } else {
      f << "xi1,xi2,re,im\n";
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          f << xi(i) << ',' << xi(j) << ',' << at2(i, j).real() << ',' << at2(i, j).imag()
            << '\n';
    }
  }

  /// Binary layout: int32 d, int32 N, float64 K, then N^d complex samples
  /// (re,im float64 pairs) in row-major axis order.
  void dump_binary(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "dump_binary: cannot open " + path);
    const std::int32_t d32 = d_, n32 = N_;
    f.write(reinterpret_cast<const char*>(&d32), 4);
    f.write(reinterpret_cast<const char*>(&n32), 4);
    f.write(reinterpret_cast<const char*>(&K_), 8);
    f.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(data_.size() * sizeof(Complex)));
  }

  static SpectralField load_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "load_binary: cannot open " + path);
    std::int32_t d32 = 0, n32 = 0;
    double K = 0;
    f.read(reinterpret_cast<char*>(&d32), 4);
    f.read(reinterpret_cast<char*>(&n32), 4);
    f.read(reinterpret_cast<char*>(&K), 8);
    SpectralField out(d32, K, n32);
    f.read(reinterpret_cast<char*>(out.data_.data()),
           static_cast<std::streamsize>(out.data_.size() * sizeof(Complex)));
    require(f.good(), "load_binary: truncated file");
    return out;
  }

 private:
  int d_ = 1;
  double K_ = 1.0;
  int N_ = 2;
  std::vector<Complex> data_;
};

struct ProjectionResult {
  SpectralField low;
  double residual_norm = 0.0;
};

/// Zero all samples with max-norm frequency above k; the removed Parseval
/// mass is returned so that ||low||^2 + residual^2 = ||f||^2 on the grid.
inline ProjectionResult project_low(const SpectralField& f, double k) {
  require(k >= 0, "project_low: k >= 0");
  ProjectionResult out;
  out.low = f;
  double removed = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec xi = f.freq(i);
    if (xi.cwiseAbs().maxCoeff() > k) {
      removed += std::norm(f.at(i));
      out.low.at(i) = Complex(0, 0);
    }
  }
  out.residual_norm =
      std::sqrt(removed * std::pow(f.dxi(), f.dim()) / std::pow(2 * pi, f.dim()));
  return out;
}

}  // namespace hypoctrl::prop
