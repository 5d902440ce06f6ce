#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "specialfn.hpp"

namespace hh {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Rule compute_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace detail

/// n-point Gauss–Legendre rule on [-1, 1]; cached, thread-safe.
inline const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(detail::compute_gauss_legendre(n));
  return *slot;
}

/// Gauss–Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b (Golub–Welsch).
inline Rule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
  if (!(a > -1 && b > -1)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0)
      diag[k] = (b - a) / (a + b + 2.0);
    else
      diag[k] = (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta;
    if (k == 1)
      beta = 4.0 * (1 + a) * (1 + b) / ((2 + a + b) * (2 + a + b) * (3 + a + b));
    else
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub[k - 1] = std::sqrt(beta);
  }
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mu0 = std::exp((a + b + 1) * std::log(2.0) + log_gamma_signed(a + 1).log_abs +
                              log_gamma_signed(b + 1).log_abs - log_gamma_signed(a + b + 2).log_abs);
  if (n == 1) {
    r.nodes[0] = diag[0];
    r.weights[0] = mu0;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

/// Rule on [0, 1] for the weight x^c.
inline Rule gauss_jacobi_left(int n, double c) {
  Rule r = gauss_jacobi(n, 0.0, c);
  const double scale = std::pow(0.5, c + 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] *= scale;
  }
  return r;
}

/// Integrate f over [a, b] with the n-point Gauss–Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
  const Rule& g = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * f(c + h * g.nodes[i]);
  return s * h;
}

/// Geometric sequence a, ..., b with the given number of cells (cells + 1 points).
inline std::vector<double> geometric_points(double a, double b, int cells) {
  std::vector<double> pts(cells + 1);
  const double la = std::log(a), lb = std::log(b);
  for (int k = 0; k <= cells; ++k) pts[k] = std::exp(la + (lb - la) * k / cells);
  pts.front() = a;
  pts.back() = b;
  return pts;
}

struct PowerFit {
  std::vector<double> coeffs;
  double rms_residual;
};

/// Least-squares fit y ≈ Σ c_k t^{e_k}; t is rescaled internally for conditioning.
inline PowerFit fit_powers(const std::vector<double>& t, const std::vector<double>& y,
                           const std::vector<double>& exponents) {
  const int m = static_cast<int>(t.size()), k = static_cast<int>(exponents.size());
  if (m < k) throw std::invalid_argument("fit_powers: fewer samples than basis functions");
  double tmax = 0.0;
  for (double v : t) tmax = std::max(tmax, std::fabs(v));
  Eigen::MatrixXd A(m, k);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) A(i, j) = std::pow(t[i] / tmax, exponents[j]);
    b[i] = y[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  PowerFit out;
  out.coeffs.resize(k);
  for (int j = 0; j < k; ++j) out.coeffs[j] = c[j] / std::pow(tmax, exponents[j]);
  out.rms_residual = std::sqrt((A * c - b).squaredNorm() / m);
  return out;
}

}  // namespace hh
