#ifndef ADMMTRACK_WARMSTART_HPP_
#define ADMMTRACK_WARMSTART_HPP_

#include <string>

#include "admmtrack/engine.hpp"
#include "admmtrack/errors.hpp"
#include "admmtrack/oracle.hpp"

namespace admmtrack {

// Pre-solves the frozen k = 0 problem from z = 0, alpha = 0 until the
// G-distance to the (oracle-measured) optimum is at most eps0. Returns the
// reached iterate relabeled k = 0. Only O(1/k) progress is guaranteed when
// curvature is absent, hence the iteration cap.
inline AdmmState warm_start(const ParameterState& theta0, const ArcMatrices& arcs,
                            double rho, double eps0, long max_iters,
                            double mu_tol, const EoFactorization& eo) {
  if (!(eps0 > 0.0)) throw ConfigError("warm_start: eps0 must be > 0");
  const OptimalPoint opt = solve_optimal(theta0, arcs, mu_tol, eo);
  const FrozenEngine frozen(theta0, arcs, rho);
  AdmmState state = zero_state(arcs, rho);
  for (long it = 0; it <= max_iters; ++it) {
    if (g_deviation(state, opt) <= eps0) {
      state.k = 0;
      return state;
    }
    state = frozen.step(state);
  }
  throw NumericalError("warm_start: not converged to " + std::to_string(eps0) +
                       " within " + std::to_string(max_iters) + " iterations");
}

inline AdmmState warm_start(const ParameterState& theta0, const ArcMatrices& arcs,
                            double rho, double eps0, long max_iters = 100000,
                            double mu_tol = 1e-12) {
  return warm_start(theta0, arcs, rho, eps0, max_iters, mu_tol, EoFactorization(arcs));
}

}  // namespace admmtrack

#endif  // ADMMTRACK_WARMSTART_HPP_
