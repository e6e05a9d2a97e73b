#ifndef ADMMTRACK_ORACLE_HPP_
#define ADMMTRACK_ORACLE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "admmtrack/engine.hpp"
#include "admmtrack/graph.hpp"
#include "admmtrack/process.hpp"

namespace admmtrack {

// Centralized ground truth for one parameter draw. The primal block x_star
// repeats the consensus minimizer on every node, z_star repeats it on every
// arc, and alpha_star is the minimum-norm dual, which lies in range(E_o).
struct OptimalPoint {
  Eigen::VectorXd x_star;      // n * p
  Eigen::VectorXd z_star;      // m_arcs * p
  Eigen::VectorXd alpha_star;  // m_arcs * p
  Eigen::VectorXd consensus;   // the p-dimensional minimizer itself
  double mu = 0.0;             // curvature of the stacked objective
  double L = 0.0;
  bool is_unique_primal = false;  // aggregate Gram matrix nonsingular
};

// Factors of E_o reused across oracle calls on a fixed graph.
struct EoFactorization {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> dual_solver;  // of E_o^T
  Eigen::MatrixXd range_basis;  // orthonormal basis of range(E_o)

  explicit EoFactorization(const ArcMatrices& arcs) {
    dual_solver.compute(arcs.E_o.transpose());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(arcs.E_o);
    const auto r = qr.rank();
    range_basis = qr.householderQ() * Eigen::MatrixXd::Identity(arcs.z_dim(), r);
  }
};

// Gradient of the stacked objective at a stacked point.
inline Eigen::VectorXd stacked_gradient(const ParameterState& theta,
                                        const Eigen::VectorXd& x) {
  const int p = theta.p();
  Eigen::VectorXd grad(theta.n_nodes() * p);
  for (int i = 0; i < theta.n_nodes(); ++i)
    grad.segment(i * p, p) = local_gradient(theta, i, x.segment(i * p, p));
  return grad;
}

// Distance of alpha from range(E_o).
inline double range_projection_residual(const Eigen::VectorXd& alpha,
                                        const EoFactorization& eo) {
  return (alpha - eo.range_basis * (eo.range_basis.transpose() * alpha)).norm();
}

// Solves the consensus problem exactly: the common value solves
// (sum_i H_i^T H_i) v = sum_i H_i^T y_i, with the minimum-norm selection when
// the aggregate Gram matrix is singular (relative eigenvalue cutoff
// 1e-10 * lambda_max, a deterministic and consistent pseudo-inverse). The
// dual is the minimum-norm solution of E_o^T alpha = -grad f(x_star).
inline OptimalPoint solve_optimal(const ParameterState& theta, const ArcMatrices& arcs,
                                  double mu_tol, const EoFactorization& eo) {
  const int p = arcs.p;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < theta.n_nodes(); ++i) {
    gram.noalias() += theta.H[i].transpose() * theta.H[i];
    rhs.noalias() += theta.H[i].transpose() * theta.y[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd& evals = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(evals.maxCoeff(), 0.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; ++j) {
    if (evals(j) > cutoff && evals(j) > 0.0)
      v += es.eigenvectors().col(j) * (es.eigenvectors().col(j).dot(rhs) / evals(j));
  }

  OptimalPoint opt;
  opt.consensus = v;
  opt.x_star.resize(arcs.x_dim());
  for (int i = 0; i < arcs.n_nodes; ++i) opt.x_star.segment(i * p, p) = v;
  opt.z_star.resize(arcs.z_dim());
  for (int e = 0; e < arcs.m_arcs; ++e) opt.z_star.segment(e * p, p) = v;
  opt.alpha_star = eo.dual_solver.solve(-stacked_gradient(theta, opt.x_star));
  const Curvature c = curvature_constants(theta);
  opt.mu = c.mu;
  opt.L = c.L;
  opt.is_unique_primal = evals.minCoeff() > mu_tol;
  return opt;
}

inline OptimalPoint solve_optimal(const ParameterState& theta, const ArcMatrices& arcs,
                                  double mu_tol = 1e-12) {
  return solve_optimal(theta, arcs, mu_tol, EoFactorization(arcs));
}

// Per-step contraction factor
//   delta(theta) = min{ (phi-1) gamma_L / (phi Gamma_L),
//                       2 rho mu gamma_L / (rho^2 Gamma_L gamma_L + phi L^2) }
// when the objective is strongly convex, and 0 once curvature is lost
// (mu <= mu_tol).
inline double contraction_delta(double mu, double L, const GraphSpectrum& spectrum,
                                double rho, double phi, double mu_tol = 1e-12) {
  if (!(phi > 1.0)) throw ConfigError("contraction_delta: phi must be > 1");
  if (!(rho > 0.0)) throw ConfigError("contraction_delta: rho must be > 0");
  if (mu <= mu_tol) return 0.0;
  const double t1 = (phi - 1.0) * spectrum.gamma_L / (phi * spectrum.Gamma_L);
  const double t2 = 2.0 * rho * mu * spectrum.gamma_L /
                    (rho * rho * spectrum.Gamma_L * spectrum.gamma_L + phi * L * L);
  return std::min(t1, t2);
}

struct ContractionQuantities {
  double delta = 0.0;
  double q = 1.0;          // 1 / (1 + delta)
  double g = 0.0;          // optimum-drift bound
  double dx_star = 0.0;    // || x*(theta_k) - x*(theta_prev) ||, stacked
  double dgrad_star = 0.0; // || grad f at the respective optima ||-difference
};

inline ContractionQuantities contraction(const ParameterState& theta_k,
                                         const ParameterState& theta_prev,
                                         const OptimalPoint& opt_k,
                                         const OptimalPoint& opt_prev,
                                         const ArcMatrices& arcs,
                                         const GraphSpectrum& spectrum, double rho,
                                         double phi, double mu_tol = 1e-12) {
  ContractionQuantities cq;
  cq.delta = contraction_delta(opt_k.mu, opt_k.L, spectrum, rho, phi, mu_tol);
  cq.q = 1.0 / (1.0 + cq.delta);
  cq.dx_star = (opt_k.x_star - opt_prev.x_star).norm();
  cq.dgrad_star = (stacked_gradient(theta_k, opt_k.x_star) -
                   stacked_gradient(theta_prev, opt_prev.x_star))
                      .norm();
  const double m = static_cast<double>(arcs.m_arcs);
  const double n = static_cast<double>(arcs.n_nodes);
  cq.g = std::sqrt(rho * m / n) * cq.dx_star +
         cq.dgrad_star / std::sqrt(2.0 * rho * spectrum.gamma_L);
  return cq;
}

inline ContractionQuantities contraction(const ParameterState& theta_k,
                                         const ParameterState& theta_prev,
                                         const ArcMatrices& arcs,
                                         const GraphSpectrum& spectrum, double rho,
                                         double phi, double mu_tol = 1e-12) {
  const EoFactorization eo(arcs);
  const OptimalPoint opt_k = solve_optimal(theta_k, arcs, mu_tol, eo);
  const OptimalPoint opt_prev = solve_optimal(theta_prev, arcs, mu_tol, eo);
  return contraction(theta_k, theta_prev, opt_k, opt_prev, arcs, spectrum, rho, phi,
                     mu_tol);
}

// G-weighted distance between an iterate u = (z, alpha) and the optimum,
// with G = diag(rho I, (1/rho) I):
//   sqrt( rho ||z - z*||^2 + (1/rho) ||alpha - alpha*||^2 ).
inline double g_deviation(const AdmmState& state, const OptimalPoint& opt) {
  const double dz2 = (state.z - opt.z_star).squaredNorm();
  const double da2 = (state.alpha - opt.alpha_star).squaredNorm();
  return std::sqrt(state.rho * dz2 + da2 / state.rho);
}

// Per-step tracking inequality: after one exact round against theta_k taken
// from the iterate measured against theta_prev,
//   ||u(k) - u*(theta_k)||_G <=
//     ( ||u(k-1) - u*(theta_prev)||_G + g ) / sqrt(1 + delta).
struct Lemma1Check {
  bool pass = false;
  double slack = 0.0;  // rhs - lhs
  double lhs = 0.0;
  double rhs = 0.0;
};

inline Lemma1Check check_lemma1(const AdmmState& state_prev, const AdmmState& state_k,
                                const OptimalPoint& opt_k, const OptimalPoint& opt_prev,
                                const ContractionQuantities& cq) {
  Lemma1Check out;
  out.lhs = g_deviation(state_k, opt_k);
  const double prev_dist = g_deviation(state_prev, opt_prev);
  out.rhs = (prev_dist + cq.g) / std::sqrt(1.0 + cq.delta);
  out.slack = out.rhs - out.lhs;
  out.pass = out.slack >= -1e-8 * (1.0 + out.rhs);
  return out;
}

}  // namespace admmtrack

#endif  // ADMMTRACK_ORACLE_HPP_
