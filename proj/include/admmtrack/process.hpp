#ifndef ADMMTRACK_PROCESS_HPP_
#define ADMMTRACK_PROCESS_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "admmtrack/errors.hpp"
#include "admmtrack/rng.hpp"

namespace admmtrack {

// AR(1) mixing weight and shapes of the per-node least-squares data.
struct ProcessConfig {
  double epsilon_ar = 0.01;  // in [0, 1]; 0 only as a frozen-process test mode
  int rows_per_node = 3;
  int p = 3;
  int n_nodes = 10;

  void validate() const {
    if (epsilon_ar < 0.0 || epsilon_ar > 1.0)
      throw ConfigError("ProcessConfig: epsilon_ar must be in [0, 1]");
    if (rows_per_node < 1) throw ConfigError("ProcessConfig: rows_per_node must be >= 1");
    if (p < 1) throw ConfigError("ProcessConfig: p must be >= 1");
    if (n_nodes < 1) throw ConfigError("ProcessConfig: n_nodes must be >= 1");
  }
};

// One draw of the parameter process: per-node data (H_i, y_i) of the
// least-squares objective sum_i 0.5 * ||H_i x_i - y_i||^2, plus the time index.
struct ParameterState {
  std::vector<Eigen::MatrixXd> H;  // rows_per_node x p each
  std::vector<Eigen::VectorXd> y;  // rows_per_node each
  long k = 0;

  int n_nodes() const { return static_cast<int>(H.size()); }
  int p() const { return H.empty() ? 0 : static_cast<int>(H[0].cols()); }
  int rows_per_node() const { return H.empty() ? 0 : static_cast<int>(H[0].rows()); }
};

// Stationary per-entry variance of the recursion v' = (1-e) v + e w,
// w ~ N(0,1): the fixed point of s2 = (1-e)^2 s2 + e^2.
inline double stationary_variance(double epsilon_ar) {
  if (epsilon_ar <= 0.0) return 0.0;
  return epsilon_ar / (2.0 - epsilon_ar);
}

// Draws Theta_0 ~ pi. Entries are filled in a fixed (node, H row-major, then
// y) order so that a given stream position always maps to the same entry.
inline ParameterState stationary_sample(const ProcessConfig& cfg, rng::Stream& stream) {
  cfg.validate();
  const double sd = std::sqrt(stationary_variance(cfg.epsilon_ar));
  ParameterState s;
  s.H.reserve(cfg.n_nodes);
  s.y.reserve(cfg.n_nodes);
  for (int i = 0; i < cfg.n_nodes; ++i) {
    Eigen::MatrixXd Hi(cfg.rows_per_node, cfg.p);
    for (int r = 0; r < cfg.rows_per_node; ++r)
      for (int c = 0; c < cfg.p; ++c) Hi(r, c) = sd * stream.gaussian();
    Eigen::VectorXd yi(cfg.rows_per_node);
    for (int r = 0; r < cfg.rows_per_node; ++r) yi(r) = sd * stream.gaussian();
    s.H.push_back(std::move(Hi));
    s.y.push_back(std::move(yi));
  }
  s.k = 0;
  return s;
}

// One AR(1) transition: H' = (1-e) H + e V, y' = (1-e) y + e W with fresh
// standard Gaussian innovations, drawn in the same fixed order as above.
inline ParameterState ar1_step(const ParameterState& state, const ProcessConfig& cfg,
                               rng::Stream& stream) {
  cfg.validate();
  if (state.n_nodes() != cfg.n_nodes || state.p() != cfg.p ||
      state.rows_per_node() != cfg.rows_per_node)
    throw ConfigError("ar1_step: state shapes do not match config");
  const double e = cfg.epsilon_ar;
  ParameterState out;
  out.H.reserve(cfg.n_nodes);
  out.y.reserve(cfg.n_nodes);
  for (int i = 0; i < cfg.n_nodes; ++i) {
    Eigen::MatrixXd Hi(cfg.rows_per_node, cfg.p);
    for (int r = 0; r < cfg.rows_per_node; ++r)
      for (int c = 0; c < cfg.p; ++c)
        Hi(r, c) = (1.0 - e) * state.H[i](r, c) + e * stream.gaussian();
    Eigen::VectorXd yi(cfg.rows_per_node);
    for (int r = 0; r < cfg.rows_per_node; ++r)
      yi(r) = (1.0 - e) * state.y[i](r) + e * stream.gaussian();
    out.H.push_back(std::move(Hi));
    out.y.push_back(std::move(yi));
  }
  out.k = state.k + 1;
  return out;
}

struct Curvature {
  double mu = 0.0;  // strong convexity constant of the stacked objective
  double L = 0.0;   // Lipschitz constant of its gradient
};

// The stacked objective acts blockwise, so mu = min_i lambda_min(H_i^T H_i)
// and L = max_i lambda_max(H_i^T H_i). mu is clamped at 0 against tiny
// negative eigenvalues from rounding.
inline Curvature curvature_constants(const ParameterState& state) {
  Curvature c;
  if (state.H.empty()) return c;
  double mu = std::numeric_limits<double>::infinity();
  double L = 0.0;
  for (const auto& Hi : state.H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hi.transpose() * Hi);
    mu = std::min(mu, es.eigenvalues().minCoeff());
    L = std::max(L, es.eigenvalues().maxCoeff());
  }
  c.mu = std::max(0.0, mu);
  c.L = std::max(0.0, L);
  return c;
}

// Gradient of f_i at x_i: H_i^T (H_i x_i - y_i).
inline Eigen::VectorXd local_gradient(const ParameterState& state, int node,
                                      const Eigen::VectorXd& x_i) {
  if (node < 0 || node >= state.n_nodes())
    throw std::out_of_range("local_gradient: node index out of range");
  const auto& Hi = state.H[node];
  if (x_i.size() != Hi.cols())
    throw ConfigError("local_gradient: x_i has wrong length");
  return Hi.transpose() * (Hi * x_i - state.y[node]);
}

// CSV dump, one row per node: node index, then H_i row-major, then y_i.
// Header carries the shapes. Used for replay and debugging.
inline std::string to_csv(const ParameterState& state) {
  std::ostringstream os;
  os.precision(17);
  os << "node,rows,p,k\n";
  for (int i = 0; i < state.n_nodes(); ++i) {
    os << i << ',' << state.rows_per_node() << ',' << state.p() << ',' << state.k;
    for (int r = 0; r < state.rows_per_node(); ++r)
      for (int c = 0; c < state.p(); ++c) os << ',' << state.H[i](r, c);
    for (int r = 0; r < state.rows_per_node(); ++r) os << ',' << state.y[i](r);
    os << '\n';
  }
  return os.str();
}

inline ParameterState state_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("state_from_csv: empty input");
  ParameterState s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    auto next = [&]() -> double {
      if (!std::getline(ls, field, ',')) throw ConfigError("state_from_csv: short row");
      return std::stod(field);
    };
    (void)next();  // node index, positional
    const int rows = static_cast<int>(next());
    const int p = static_cast<int>(next());
    s.k = static_cast<long>(next());
    Eigen::MatrixXd Hi(rows, p);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < p; ++c) Hi(r, c) = next();
    Eigen::VectorXd yi(rows);
    for (int r = 0; r < rows; ++r) yi(r) = next();
    s.H.push_back(std::move(Hi));
    s.y.push_back(std::move(yi));
  }
  if (s.H.empty()) throw ConfigError("state_from_csv: no node rows");
  return s;
}

}  // namespace admmtrack

#endif  // ADMMTRACK_PROCESS_HPP_
