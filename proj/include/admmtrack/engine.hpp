#ifndef ADMMTRACK_ENGINE_HPP_
#define ADMMTRACK_ENGINE_HPP_

#include <Eigen/Dense>
#include <vector>

#include "admmtrack/errors.hpp"
#include "admmtrack/graph.hpp"
#include "admmtrack/process.hpp"

namespace admmtrack {

// Iterate of the edge-based consensus ADMM. Only the top half alpha of the
// full multiplier lambda = [alpha^T, -alpha^T]^T is stored; the symmetry is
// preserved by the updates (FullLambdaState below carries both halves for
// checking exactly that).
struct AdmmState {
  Eigen::VectorXd x;      // n * p
  Eigen::VectorXd z;      // m_arcs * p
  Eigen::VectorXd alpha;  // m_arcs * p
  long k = 0;
  double rho = 1.0;
};

inline AdmmState zero_state(const ArcMatrices& arcs, double rho) {
  if (!(rho > 0.0)) throw ConfigError("AdmmState: rho must be > 0");
  AdmmState s;
  s.x = Eigen::VectorXd::Zero(arcs.x_dim());
  s.z = Eigen::VectorXd::Zero(arcs.z_dim());
  s.alpha = Eigen::VectorXd::Zero(arcs.z_dim());
  s.k = 0;
  s.rho = rho;
  return s;
}

// What a node holds after the exchange phase: the neighbors' fresh x-blocks,
// in the order of its (sorted) arc list. Nothing else crosses node boundaries
// within a round.
struct NodeInbox {
  // blocks[i][t] is the x-block of the opposite endpoint of arcs_at[i][t].
  std::vector<std::vector<Eigen::VectorXd>> blocks;
};

inline NodeInbox exchange(const Eigen::VectorXd& x, const ArcMatrices& arcs) {
  NodeInbox inbox;
  inbox.blocks.resize(arcs.n_nodes);
  for (int i = 0; i < arcs.n_nodes; ++i) {
    inbox.blocks[i].reserve(arcs.arcs_at[i].size());
    for (int e : arcs.arcs_at[i]) {
      const auto [src, dst] = arcs.arcs[e];
      const int other = (src == i) ? dst : src;
      inbox.blocks[i].push_back(x.segment(other * arcs.p, arcs.p));
    }
  }
  return inbox;
}

// Primal x-update, exact per node: the subproblem
//   min_{x_i} 0.5 ||H_i x_i - y_i||^2 + (E_o^T alpha)_i^T x_i
//             + rho * d_i ||x_i||^2 - rho ((A_s + A_d)^T z)_i^T x_i + const
// is solved by the normal equations
//   (H_i^T H_i + 2 rho d_i I) x_i = H_i^T y_i - (E_o^T alpha)_i
//                                   + rho ((A_s + A_d)^T z)_i,
// which are positive definite for any H_i since rho > 0. Per-node solves are
// independent of each other.
inline Eigen::VectorXd x_update(const AdmmState& state, const ParameterState& theta,
                                const ArcMatrices& arcs) {
  if (!(state.rho > 0.0)) throw ConfigError("x_update: rho must be > 0");
  const int p = arcs.p;
  Eigen::VectorXd x_new(arcs.x_dim());
  for (int i = 0; i < arcs.n_nodes; ++i) {
    Eigen::VectorXd dual_pull = Eigen::VectorXd::Zero(p);   // (E_o^T alpha)_i
    Eigen::VectorXd z_pull = Eigen::VectorXd::Zero(p);      // ((A_s + A_d)^T z)_i
    for (int e : arcs.arcs_at[i]) {
      const auto [src, dst] = arcs.arcs[e];
      const auto alpha_e = state.alpha.segment(e * p, p);
      const auto z_e = state.z.segment(e * p, p);
      if (src == i)
        dual_pull += alpha_e;
      else
        dual_pull -= alpha_e;
      z_pull += z_e;
    }
    const auto& Hi = theta.H[i];
    Eigen::MatrixXd M = Hi.transpose() * Hi;
    M.diagonal().array() += 2.0 * state.rho * arcs.degree[i];
    const Eigen::VectorXd rhs =
        Hi.transpose() * theta.y[i] - dual_pull + state.rho * z_pull;
    x_new.segment(i * p, p) = M.ldlt().solve(rhs);
  }
  return x_new;
}

// Auxiliary z-update under symmetric lambda: each arc takes the average of
// its endpoints' fresh x-blocks, so the two arcs of one undirected edge get
// identical blocks. Computed at the arc's source from its own block and the
// inbox copy of the destination block.
inline Eigen::VectorXd z_update(const Eigen::VectorXd& x_new, const NodeInbox& inbox,
                                const ArcMatrices& arcs) {
  const int p = arcs.p;
  Eigen::VectorXd z_new(arcs.z_dim());
  for (int i = 0; i < arcs.n_nodes; ++i) {
    const auto& incident = arcs.arcs_at[i];
    for (std::size_t t = 0; t < incident.size(); ++t) {
      const int e = incident[t];
      if (arcs.arcs[e].first != i) continue;  // source computes the arc block
      z_new.segment(e * p, p) =
          0.5 * (x_new.segment(i * p, p) + inbox.blocks[i][t]);
    }
  }
  return z_new;
}

inline Eigen::VectorXd z_update(const AdmmState& state_with_fresh_x,
                                const ArcMatrices& arcs) {
  return z_update(state_with_fresh_x.x, exchange(state_with_fresh_x.x, arcs), arcs);
}

// Dual ascent in compact form: alpha <- alpha + rho (A_s x - z). The bottom
// half of lambda stays equal to -alpha by the structure of A, B and the
// z-update.
inline Eigen::VectorXd lambda_update(const Eigen::VectorXd& alpha,
                                     const Eigen::VectorXd& x_new,
                                     const Eigen::VectorXd& z_new, double rho,
                                     const ArcMatrices& arcs) {
  const int p = arcs.p;
  Eigen::VectorXd alpha_new(arcs.z_dim());
  for (int e = 0; e < arcs.m_arcs; ++e) {
    const int src = arcs.arcs[e].first;
    alpha_new.segment(e * p, p) =
        alpha.segment(e * p, p) +
        rho * (x_new.segment(src * p, p) - z_new.segment(e * p, p));
  }
  return alpha_new;
}

inline Eigen::VectorXd lambda_update(const AdmmState& state,
                                     const Eigen::VectorXd& x_new,
                                     const Eigen::VectorXd& z_new,
                                     const ArcMatrices& arcs) {
  return lambda_update(state.alpha, x_new, z_new, state.rho, arcs);
}

// One full round against the observed theta_k: x-update, neighbor exchange,
// z-update, dual update, k <- k + 1.
inline AdmmState step(const AdmmState& state, const ParameterState& theta,
                      const ArcMatrices& arcs) {
  AdmmState next;
  next.rho = state.rho;
  next.x = x_update(state, theta, arcs);
  const NodeInbox inbox = exchange(next.x, arcs);
  next.z = z_update(next.x, inbox, arcs);
  next.alpha = lambda_update(state.alpha, next.x, next.z, state.rho, arcs);
  next.k = state.k + 1;
  return next;
}

// Round iteration against one fixed theta with the per-node normal-equation
// factors computed once. Produces bit-identical iterates to step(state, theta,
// arcs): the cached factor is the LDLT of the same matrix assembled by the
// same expressions, and the z / alpha updates evaluate the same sums. Used by
// the warm start and by frozen-problem experiments, where theta does not
// change between rounds.
class FrozenEngine {
 public:
  FrozenEngine(const ParameterState& theta, const ArcMatrices& arcs, double rho)
      : arcs_(&arcs), rho_(rho) {
    if (!(rho > 0.0)) throw ConfigError("FrozenEngine: rho must be > 0");
    factors_.reserve(arcs.n_nodes);
    data_pull_.reserve(arcs.n_nodes);
    for (int i = 0; i < arcs.n_nodes; ++i) {
      const auto& Hi = theta.H[i];
      Eigen::MatrixXd M = Hi.transpose() * Hi;
      M.diagonal().array() += 2.0 * rho * arcs.degree[i];
      factors_.emplace_back(M.ldlt());
      data_pull_.emplace_back(Hi.transpose() * theta.y[i]);
    }
  }

  AdmmState step(const AdmmState& state) const {
    const ArcMatrices& arcs = *arcs_;
    const int p = arcs.p;
    AdmmState next;
    next.rho = state.rho;
    next.x.resize(arcs.x_dim());
    for (int i = 0; i < arcs.n_nodes; ++i) {
      Eigen::VectorXd dual_pull = Eigen::VectorXd::Zero(p);
      Eigen::VectorXd z_pull = Eigen::VectorXd::Zero(p);
      for (int e : arcs.arcs_at[i]) {
        const auto [src, dst] = arcs.arcs[e];
        const auto alpha_e = state.alpha.segment(e * p, p);
        if (src == i)
          dual_pull += alpha_e;
        else
          dual_pull -= alpha_e;
        z_pull += state.z.segment(e * p, p);
      }
      const Eigen::VectorXd rhs = data_pull_[i] - dual_pull + state.rho * z_pull;
      next.x.segment(i * p, p) = factors_[i].solve(rhs);
    }
    next.z.resize(arcs.z_dim());
    for (int e = 0; e < arcs.m_arcs; ++e) {
      const auto [src, dst] = arcs.arcs[e];
      next.z.segment(e * p, p) =
          0.5 * (next.x.segment(src * p, p) + next.x.segment(dst * p, p));
    }
    next.alpha = lambda_update(state.alpha, next.x, next.z, state.rho, arcs);
    next.k = state.k + 1;
    return next;
  }

 private:
  const ArcMatrices* arcs_;
  double rho_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> factors_;
  std::vector<Eigen::VectorXd> data_pull_;
};

// Debug representation carrying the full multiplier lambda = [beta; gamma]
// and applying the generic updates of the stacked formulation, without
// assuming the symmetry beta = -gamma. Used to test that the symmetry is an
// invariant rather than an assumption.
struct FullLambdaState {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // 2 * m_arcs * p
  long k = 0;
  double rho = 1.0;
};

inline FullLambdaState zero_full_state(const ArcMatrices& arcs, double rho) {
  FullLambdaState s;
  s.x = Eigen::VectorXd::Zero(arcs.x_dim());
  s.z = Eigen::VectorXd::Zero(arcs.z_dim());
  s.lambda = Eigen::VectorXd::Zero(2 * arcs.z_dim());
  s.k = 0;
  s.rho = rho;
  return s;
}

inline FullLambdaState full_lambda_step(const FullLambdaState& state,
                                        const ParameterState& theta,
                                        const ArcMatrices& arcs) {
  const int p = arcs.p;
  const int zd = arcs.z_dim();
  const auto beta = state.lambda.head(zd);   // multiplier of A_s x = z
  const auto gamma = state.lambda.tail(zd);  // multiplier of A_d x = z
  FullLambdaState next;
  next.rho = state.rho;

  // x-update: (H_i^T H_i + 2 rho d_i I) x_i =
  //   H_i^T y_i - (A_s^T beta + A_d^T gamma)_i + rho ((A_s + A_d)^T z)_i.
  next.x.resize(arcs.x_dim());
  for (int i = 0; i < arcs.n_nodes; ++i) {
    Eigen::VectorXd dual_pull = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd z_pull = Eigen::VectorXd::Zero(p);
    for (int e : arcs.arcs_at[i]) {
      const auto [src, dst] = arcs.arcs[e];
      if (src == i) dual_pull += beta.segment(e * p, p);
      if (dst == i) dual_pull += gamma.segment(e * p, p);
      z_pull += state.z.segment(e * p, p);
    }
    const auto& Hi = theta.H[i];
    Eigen::MatrixXd M = Hi.transpose() * Hi;
    M.diagonal().array() += 2.0 * state.rho * arcs.degree[i];
    const Eigen::VectorXd rhs =
        Hi.transpose() * theta.y[i] - dual_pull + state.rho * z_pull;
    next.x.segment(i * p, p) = M.ldlt().solve(rhs);
  }

  // Generic z-update: z = ((A_s + A_d) x)/2 + (beta + gamma) / (2 rho).
  next.z.resize(zd);
  for (int e = 0; e < arcs.m_arcs; ++e) {
    const auto [src, dst] = arcs.arcs[e];
    next.z.segment(e * p, p) =
        0.5 * (next.x.segment(src * p, p) + next.x.segment(dst * p, p)) +
        (beta.segment(e * p, p) + gamma.segment(e * p, p)) / (2.0 * state.rho);
  }

  // lambda <- lambda + rho (A x + B z), blockwise.
  next.lambda.resize(2 * zd);
  for (int e = 0; e < arcs.m_arcs; ++e) {
    const auto [src, dst] = arcs.arcs[e];
    next.lambda.segment(e * p, p) =
        beta.segment(e * p, p) +
        state.rho * (next.x.segment(src * p, p) - next.z.segment(e * p, p));
    next.lambda.segment(zd + e * p, p) =
        gamma.segment(e * p, p) +
        state.rho * (next.x.segment(dst * p, p) - next.z.segment(e * p, p));
  }
  next.k = state.k + 1;
  return next;
}

}  // namespace admmtrack

#endif  // ADMMTRACK_ENGINE_HPP_
