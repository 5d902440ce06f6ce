#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "extension.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace hh {

/// P1 finite elements on a ψ-grid of [0, π/2] for the weight μ(ψ) = sin^{1−2σ}ψ cos^{n−1}ψ.
///
/// mass: lumped, M_j = ∫μ φ_j. Stiffness A_{jk} = ∫μ φ_j' φ_k' (tridiagonal).
/// The weighted Neumann flux at ψ = 0 enters the weak form as a point term at node 0.
struct AngularFem {
  int n;
  double sigma;
  std::vector<double> psi;
  std::vector<double> mass;
  std::vector<double> diag;  ///< A_{jj}
  std::vector<double> off;   ///< A_{j,j+1}

  std::size_t size() const { return psi.size(); }

  double mass_form(const double* u, const double* v) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += mass[j] * u[j] * v[j];
    return s;
  }
  /// Summed elementwise as Σ_e w_e (u_{e+1} − u_e)(v_{e+1} − v_e), w_e = −A_{e,e+1}.
  double stiff_form(const double* u, const double* v) const {
    double s = 0.0;
    for (std::size_t e = 0; e + 1 < size(); ++e) s -= off[e] * (u[e + 1] - u[e]) * (v[e + 1] - v[e]);
    return s;
  }
  /// ∫μ φ' ² weighted by A, plus J2 ∫μ φ² by M.
  double K_form(const double* u, const double* v, double J2) const {
    return stiff_form(u, v) + J2 * mass_form(u, v);
  }
};

inline AngularFem build_angular_fem(int n, double sigma, const std::vector<double>& psi) {
  const std::size_t N = psi.size();
  if (N < 3) throw std::invalid_argument("angular grid needs at least 3 nodes");
  if (psi.front() != 0.0 || std::fabs(psi.back() - 0.5 * std::numbers::pi) > 1e-14)
    throw std::invalid_argument("angular grid must span [0, pi/2]");
  for (std::size_t j = 0; j + 1 < N; ++j)
    if (!(psi[j + 1] > psi[j])) throw std::invalid_argument("angular grid must be increasing");
  AngularFem fem{n, sigma, psi, std::vector<double>(N, 0.0), std::vector<double>(N, 0.0),
                 std::vector<double>(N - 1, 0.0)};
  const int order = 24;
  const Rule& gl = gauss_legendre(order);
  const Rule gj = gauss_jacobi_left(order, 1 - 2 * sigma);
  for (std::size_t e = 0; e + 1 < N; ++e) {
    const double a = psi[e], b = psi[e + 1], h = b - a;
    double W = 0.0, Ma = 0.0, Mb = 0.0;
    if (e == 0) {
      // ψ^{1−2σ} singular/degenerate at 0: Gauss–Jacobi with the smooth factor (sinψ/ψ)^{1−2σ}cos^{n−1}ψ
      const double scale = std::pow(h, 2 - 2 * sigma);
      for (std::size_t i = 0; i < gj.size(); ++i) {
        const double x = gj.nodes[i], s = h * x;
        const double g = std::pow(std::sin(s) / s, 1 - 2 * sigma) * std::pow(std::cos(s), n - 1);
        W += gj.weights[i] * g;
        Ma += gj.weights[i] * g * (1 - x);
        Mb += gj.weights[i] * g * x;
      }
      W *= scale;
      Ma *= scale;
      Mb *= scale;
    } else {
      for (std::size_t i = 0; i < gl.size(); ++i) {
        const double x = 0.5 * (1 + gl.nodes[i]), s = a + h * x;
        const double g = std::pow(std::sin(s), 1 - 2 * sigma) * std::pow(std::cos(s), n - 1);
        const double w = 0.5 * h * gl.weights[i];
        W += w * g;
        Ma += w * g * (1 - x);
        Mb += w * g * x;
      }
    }
    fem.mass[e] += Ma;
    fem.mass[e + 1] += Mb;
    fem.diag[e] += W / (h * h);
    fem.diag[e + 1] += W / (h * h);
    fem.off[e] -= W / (h * h);
  }
  return fem;
}

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

struct SolverOptions {
  double tolerance = 1e-12;  ///< max-norm of the residual relative to its row scale and max|V|
  int max_iterations = 60;
  double damping = 0.5;     ///< step factor applied while the residual grows
  int max_backtracks = 12;
};

/// Discrete solution of −(A + J₂M)Φ + κ_σ Φ₀^p e₀ = 0 near `initial` (the exact sampled
/// profile is the natural start).
struct DiscreteProfile {
  std::vector<double> phi;
  std::vector<double> residual_history;
};

inline DiscreteProfile discrete_sphere_profile(const ProblemParams& q, const AngularFem& fem,
                                               std::vector<double> phi, const SolverOptions& opt = {}) {
  const auto e = derive_exponents(q);
  const double kap = kappa_sigma(q.sigma);
  const int N = static_cast<int>(fem.size());
  auto residual = [&](const std::vector<double>& v, Eigen::VectorXd& R) {
    R.resize(N);
    for (int j = 0; j < N; ++j) {
      double Av = fem.diag[j] * v[j];
      if (j > 0) Av += fem.off[j - 1] * v[j - 1];
      if (j + 1 < N) Av += fem.off[j] * v[j + 1];
      R[j] = -(Av + e.J2 * fem.mass[j] * v[j]);
    }
    R[0] += kap * std::pow(v[0], q.p);
    double vmax = 0.0, m = 0.0;
    for (double x : v) vmax = std::max(vmax, std::fabs(x));
    for (int j = 0; j < N; ++j)
      m = std::max(m, std::fabs(R[j]) / ((fem.diag[j] + std::fabs(e.J2) * fem.mass[j]) * vmax));
    return m;
  };
  DiscreteProfile out;
  Eigen::VectorXd R;
  double res = residual(phi, R);
  out.residual_history.push_back(res);
  for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < N; ++j) {
      J(j, j) = -(fem.diag[j] + e.J2 * fem.mass[j]);
      if (j + 1 < N) J(j, j + 1) = J(j + 1, j) = -fem.off[j];
    }
    J(0, 0) += kap * q.p * std::pow(phi[0], q.p - 1);
    const Eigen::VectorXd d = J.partialPivLu().solve(-R);
    double lam = 1.0;
    std::vector<double> trial(N);
    double tres = 0.0;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      for (int j = 0; j < N; ++j) trial[j] = std::max(phi[j] + lam * d[j], 1e-300);
      tres = residual(trial, R);
      if (tres < res) break;
      lam *= opt.damping;
    }
    phi = trial;
    res = residual(phi, R);
    out.residual_history.push_back(res);
  }
  if (!(res <= opt.tolerance))
    throw SolverError("discrete sphere profile did not converge", out.residual_history);
  out.phi = std::move(phi);
  return out;
}

struct CylinderProblem {
  double s_min = -4.0;
  double s_max = 4.0;
  int ns = 161;  ///< s-nodes including both Dirichlet ends
  std::vector<double> psi;
  std::vector<double> left;   ///< V(s_min, ·)
  std::vector<double> right;  ///< V(s_max, ·)
  std::optional<FowlerField> initial;
};

struct CylinderSolution {
  FowlerField field;
  std::vector<double> residual_history;
  int projections = 0;  ///< Newton iterates clipped back to positive values
  std::vector<std::string> diagnostics;
};

namespace detail {

/// F(a,b) = ∫_0^1 (b + λ(a−b))^p dλ = (a^{p+1} − b^{p+1}) / ((p+1)(a − b)) and its partials.
struct DiscreteGradient {
  double F, Fa, Fb;
};

inline DiscreteGradient discrete_gradient(double a, double b, double p) {
  const Rule& g = gauss_legendre(16);
  DiscreteGradient d{0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lam = 0.5 * (1 + g.nodes[i]), w = 0.5 * g.weights[i];
    const double v = b + lam * (a - b);
    const double vp1 = std::pow(v, p - 1);
    d.F += w * vp1 * v;
    d.Fa += w * p * vp1 * lam;
    d.Fb += w * p * vp1 * (1 - lam);
  }
  return d;
}

}  // namespace detail

/// Damped Newton for the Fowler cylinder equation
///   V_ss − J₁V_s − J₂V + (1/μ)(μV_ψ)_ψ = 0,  −lim sin^{1−2σ}ψ ∂_ψV = κ_σ V^p at ψ = 0,
/// with Dirichlet data at s_min and s_max. Centred differences in s, P1 elements in ψ; the
/// boundary nonlinearity uses the discrete gradient F(V_{i+1,0}, V_{i−1,0}), which makes the
/// half-step energy exactly conserved up to the J₁ term.
inline CylinderSolution solve_cylinder_pde(const ProblemParams& q, const CylinderProblem& pb,
                                           const SolverOptions& opt = {}) {
  const auto e = derive_exponents(q);
  const double kap = kappa_sigma(q.sigma);
  const AngularFem fem = build_angular_fem(q.n, q.sigma, pb.psi);
  const int m = static_cast<int>(fem.size());
  const int ns = pb.ns;
  if (ns < 3) throw std::invalid_argument("cylinder grid needs at least 3 s-nodes");
  if (!(pb.s_max > pb.s_min)) throw std::invalid_argument("cylinder s-range is empty");
  if (static_cast<int>(pb.left.size()) != m || static_cast<int>(pb.right.size()) != m)
    throw std::invalid_argument("boundary data must match the angular grid");
  for (int j = 0; j < m; ++j)
    if (!(pb.left[j] > 0 && pb.right[j] > 0)) throw PreconditionError("boundary data must be positive");
  const double h = (pb.s_max - pb.s_min) / (ns - 1);

  CylinderSolution sol;
  FowlerField& V = sol.field;
  V.params = q;
  V.psi = pb.psi;
  V.s.resize(ns);
  for (int i = 0; i < ns; ++i) V.s[i] = pb.s_min + h * i;
  V.s.back() = pb.s_max;
  V.values.assign(static_cast<std::size_t>(ns) * m, 0.0);
  for (int i = 0; i < ns; ++i) {
    const double w = static_cast<double>(i) / (ns - 1);
    for (int j = 0; j < m; ++j) {
      V.at(i, j) = (pb.initial && pb.initial->values.size() == V.values.size())
                       ? pb.initial->at(i, j)
                       : (1 - w) * pb.left[j] + w * pb.right[j];
    }
  }
  for (int j = 0; j < m; ++j) {
    V.at(0, j) = pb.left[j];
    V.at(ns - 1, j) = pb.right[j];
  }

  const int nu = (ns - 2) * m;
  auto idx = [m](int i, int j) { return (i - 1) * m + j; };
  const double c2 = 1.0 / (h * h), c1 = e.J1 / (2 * h);

  std::vector<double> row_scale(m);
  for (int j = 0; j < m; ++j) row_scale[j] = fem.mass[j] * (2 * c2 + std::fabs(e.J2)) + fem.diag[j];
  double vmax = 0.0;
  for (int j = 0; j < m; ++j) vmax = std::max({vmax, pb.left[j], pb.right[j]});

  auto residual = [&](const FowlerField& F, Eigen::VectorXd& R) {
    R.resize(nu);
    double mx = 0.0;
    for (int i = 1; i < ns - 1; ++i) {
      for (int j = 0; j < m; ++j) {
        const double vp = F.at(i + 1, j), v0 = F.at(i, j), vm = F.at(i - 1, j);
        double Av = fem.diag[j] * v0;
        if (j > 0) Av += fem.off[j - 1] * F.at(i, j - 1);
        if (j + 1 < m) Av += fem.off[j] * F.at(i, j + 1);
        double r = fem.mass[j] * ((vp - 2 * v0 + vm) * c2 - (vp - vm) * c1 - e.J2 * v0) - Av;
        if (j == 0) r += kap * detail::discrete_gradient(F.at(i + 1, 0), F.at(i - 1, 0), q.p).F;
        R[idx(i, j)] = r;
        mx = std::max(mx, std::fabs(r) / (row_scale[j] * vmax));
      }
    }
    return mx;
  };

  Eigen::VectorXd R;
  double res = residual(V, R);
  sol.residual_history.push_back(res);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nu) * 5 + 4 * ns);
    for (int i = 1; i < ns - 1; ++i) {
      for (int j = 0; j < m; ++j) {
        const int row = idx(i, j);
        trip.emplace_back(row, row, fem.mass[j] * (-2 * c2 - e.J2) - fem.diag[j]);
        if (j > 0) trip.emplace_back(row, idx(i, j - 1), -fem.off[j - 1]);
        if (j + 1 < m) trip.emplace_back(row, idx(i, j + 1), -fem.off[j]);
        double cp = fem.mass[j] * (c2 - c1), cm = fem.mass[j] * (c2 + c1);
        double gp = 0.0, gm = 0.0;
        if (j == 0) {
          const auto dg = detail::discrete_gradient(V.at(i + 1, 0), V.at(i - 1, 0), q.p);
          gp = kap * dg.Fa;
          gm = kap * dg.Fb;
        }
        if (i + 1 < ns - 1) trip.emplace_back(row, idx(i + 1, j), cp + gp);
        if (i - 1 > 0) trip.emplace_back(row, idx(i - 1, j), cm + gm);
      }
    }
    Eigen::SparseMatrix<double> J(nu, nu);
    J.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw SolverError("cylinder Jacobian factorization failed", sol.residual_history);
    const Eigen::VectorXd d = lu.solve(-R);

    double lam = 1.0, tres = 0.0;
    FowlerField trial = V;
    int clipped = 0;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      clipped = 0;
      for (int i = 1; i < ns - 1; ++i)
        for (int j = 0; j < m; ++j) {
          double v = V.at(i, j) + lam * d[idx(i, j)];
          if (!(v > 0)) {
            v = 1e-12 * std::max(pb.left[j], pb.right[j]);
            ++clipped;
          }
          trial.at(i, j) = v;
        }
      tres = residual(trial, R);
      if (tres < res) break;
      lam *= opt.damping;
    }
    if (clipped > 0) {
      sol.projections += clipped;
      sol.diagnostics.push_back("iteration " + std::to_string(it) + ": projected " + std::to_string(clipped) +
                                " negative values");
    }
    V = std::move(trial);
    res = residual(V, R);
    sol.residual_history.push_back(res);
    if (!std::isfinite(res)) break;
  }
  if (!(res <= opt.tolerance))
    throw SolverError("cylinder Newton iteration did not converge", sol.residual_history);
  return sol;
}

/// Lowest mode of the cylinder equation linearized at a discrete profile Φ:
/// (A + J₂M − κ_σ pΦ₀^{p−1}e₀e₀ᵀ)w = λMw, with s-behaviour e^{μs}, μ² − J₁μ − λ = 0.
/// For J₁² + 4λ ≥ 0 the smaller real root is kept; otherwise μ = J₁/2 ± iω.
struct AngularMode {
  double lambda;
  double mu_re;
  double mu_im;  ///< ω, zero for real modes
  std::vector<double> shape;  ///< normalized to max |w| = 1, positive

  bool oscillatory() const { return mu_im > 0; }
  double growth(double s) const { return std::exp(mu_re * s) * std::cos(mu_im * s); }
};

inline AngularMode lowest_angular_mode(const ProblemParams& q, const AngularFem& fem, const std::vector<double>& phi) {
  const auto e = derive_exponents(q);
  const int N = static_cast<int>(fem.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N), M = Eigen::MatrixXd::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    L(j, j) = fem.diag[j] + e.J2 * fem.mass[j];
    M(j, j) = fem.mass[j];
    if (j + 1 < N) L(j, j + 1) = L(j + 1, j) = fem.off[j];
  }
  L(0, 0) -= kappa_sigma(q.sigma) * q.p * std::pow(phi[0], q.p - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, M);
  AngularMode mode{es.eigenvalues()[0], 0.0, 0.0, std::vector<double>(N)};
  double big = 0.0;
  for (int j = 0; j < N; ++j) big = std::max(big, std::fabs(es.eigenvectors()(j, 0)));
  const double sgn = es.eigenvectors()(0, 0) < 0 ? -1.0 : 1.0;
  for (int j = 0; j < N; ++j) mode.shape[j] = sgn * es.eigenvectors()(j, 0) / big;
  const double disc = e.J1 * e.J1 + 4 * mode.lambda;
  if (disc >= 0) {
    mode.mu_re = 0.5 * (e.J1 - std::sqrt(disc));
  } else {
    mode.mu_re = 0.5 * e.J1;
    mode.mu_im = 0.5 * std::sqrt(-disc);
  }
  return mode;
}

/// Distance of ωL/π from the nearest integer over the oscillatory linearized modes; the Dirichlet
/// problem on an s-interval of length L is singular at zero margin. Returns 0.5 when no mode
/// oscillates.
inline double resonance_margin(const ProblemParams& q, const AngularFem& fem, const std::vector<double>& phi,
                               double length) {
  const auto e = derive_exponents(q);
  const int N = static_cast<int>(fem.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N), M = Eigen::MatrixXd::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    L(j, j) = fem.diag[j] + e.J2 * fem.mass[j];
    M(j, j) = fem.mass[j];
    if (j + 1 < N) L(j, j + 1) = L(j + 1, j) = fem.off[j];
  }
  L(0, 0) -= kappa_sigma(q.sigma) * q.p * std::pow(phi[0], q.p - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, M, Eigen::EigenvaluesOnly);
  double margin = 0.5;
  for (int k = 0; k < N; ++k) {
    const double disc = e.J1 * e.J1 + 4 * es.eigenvalues()[k];
    if (disc >= 0) break;
    const double x = 0.5 * std::sqrt(-disc) * length / std::numbers::pi;
    margin = std::min(margin, std::fabs(x - std::round(x)));
  }
  return margin;
}

enum class Perturbation { LeftScaling, LinearMode };

/// Dirichlet data around a discrete profile Φ. LeftScaling: V(s_min) = (1+ε)Φ, V(s_max) = Φ.
/// LinearMode: V = Φ + a·g(s − s_min)·w at both ends, with g and w from the lowest linearized mode and
/// a = ε·min Φ / max|g|.
inline CylinderProblem perturbed_problem(const ProblemParams& q, const std::vector<double>& psi,
                                         const std::vector<double>& phi, double eps, double s_min, double s_max,
                                         int ns, Perturbation kind = Perturbation::LinearMode) {
  CylinderProblem pb;
  pb.s_min = s_min;
  pb.s_max = s_max;
  pb.ns = ns;
  pb.psi = psi;
  pb.left = phi;
  pb.right = phi;
  if (kind == Perturbation::LeftScaling) {
    for (auto& v : pb.left) v *= 1 + eps;
    return pb;
  }
  const AngularFem fem = build_angular_fem(q.n, q.sigma, psi);
  const AngularMode mode = lowest_angular_mode(q, fem, phi);
  // amplitude relative to min Φ, and to the largest growth factor over the interval
  double gmax = 1.0;
  for (int k = 0; k <= 64; ++k) gmax = std::max(gmax, std::fabs(mode.growth((s_max - s_min) * k / 64.0)));
  const double amp = eps * *std::min_element(phi.begin(), phi.end()) / gmax;
  const double gr = mode.growth(s_max - s_min);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    pb.left[j] = phi[j] + amp * mode.shape[j];
    pb.right[j] = phi[j] + amp * gr * mode.shape[j];
  }
  return pb;
}

/// Field V(s, ψ) = φ(ψ) on a uniform s-grid.
inline FowlerField constant_fowler_field(const ProblemParams& q, double s_min, double s_max, int ns,
                                         const std::vector<double>& psi, const std::vector<double>& phi) {
  FowlerField V{q, std::vector<double>(ns), psi, std::vector<double>(static_cast<std::size_t>(ns) * psi.size())};
  const double h = (s_max - s_min) / (ns - 1);
  for (int i = 0; i < ns; ++i) {
    V.s[i] = s_min + h * i;
    for (std::size_t j = 0; j < psi.size(); ++j) V.at(i, j) = phi[j];
  }
  V.s.back() = s_max;
  return V;
}

}  // namespace hh
