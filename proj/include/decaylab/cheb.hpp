#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace decaylab {

// Chebyshev-Gauss-Lobatto collocation on [0,1] with barycentric
// interpolation and spectral differentiation. Nodes are stored in
// increasing order.
class ChebGrid {
 public:
  explicit ChebGrid(int m) : nodes_(static_cast<size_t>(m)), bary_(static_cast<size_t>(m)) {
    const int n = m - 1;
    for (int j = 0; j <= n; ++j) {
      // cos runs 1 -> -1; flip so nodes increase on [0,1]
      double t = std::cos(M_PI * static_cast<double>(n - j) / n);
      nodes_[static_cast<size_t>(j)] = 0.5 * (t + 1.0);
      double w = (j == 0 || j == n) ? 0.5 : 1.0;
      bary_[static_cast<size_t>(j)] = (((n - j) % 2) ? -1.0 : 1.0) * w;
    }
    nodes_.front() = 0.0;
    nodes_.back() = 1.0;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int j) const { return nodes_[static_cast<size_t>(j)]; }

  // barycentric weights of the interpolant at x over the grid values; the
  // row sums to one exactly, so constants are reproduced
  std::vector<double> interp_weights(double x) const {
    const int m = size();
    std::vector<double> w(static_cast<size_t>(m), 0.0);
    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
      double d = x - nodes_[static_cast<size_t>(j)];
      if (d == 0.0) {
        std::fill(w.begin(), w.end(), 0.0);
        w[static_cast<size_t>(j)] = 1.0;
        return w;
      }
      w[static_cast<size_t>(j)] = bary_[static_cast<size_t>(j)] / d;
      denom += w[static_cast<size_t>(j)];
    }
    for (double& v : w) v /= denom;
    return w;
  }

  template <typename Scalar>
  Scalar interpolate(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values, double x) const {
    auto w = interp_weights(x);
    Scalar acc{};
    for (int j = 0; j < size(); ++j) acc += w[static_cast<size_t>(j)] * values(j);
    return acc;
  }

  // spectral differentiation matrix from the barycentric form,
  // diagonal chosen so that rows annihilate constants
  const Eigen::MatrixXd& diff_matrix() const {
    if (diff_.size() == 0) {
      const int m = size();
      diff_.resize(m, m);
      for (int i = 0; i < m; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          double v = (bary_[static_cast<size_t>(j)] / bary_[static_cast<size_t>(i)]) /
                     (nodes_[static_cast<size_t>(i)] - nodes_[static_cast<size_t>(j)]);
          diff_(i, j) = v;
          rowsum += v;
        }
        diff_(i, i) = -rowsum;
      }
    }
    return diff_;
  }

  Eigen::VectorXcd derivative(const Eigen::VectorXcd& values) const {
    return diff_matrix().cast<std::complex<double>>() * values;
  }
  Eigen::VectorXd derivative(const Eigen::VectorXd& values) const { return diff_matrix() * values; }

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;
  mutable Eigen::MatrixXd diff_;
};

inline double sup_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }
inline double sup_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace decaylab
