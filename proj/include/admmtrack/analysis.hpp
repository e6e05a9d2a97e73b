#ifndef ADMMTRACK_ANALYSIS_HPP_
#define ADMMTRACK_ANALYSIS_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "admmtrack/config.hpp"
#include "admmtrack/engine.hpp"
#include "admmtrack/errors.hpp"
#include "admmtrack/graph.hpp"
#include "admmtrack/oracle.hpp"
#include "admmtrack/process.hpp"
#include "admmtrack/rng.hpp"
#include "admmtrack/warmstart.hpp"

namespace admmtrack {

// One experiment fixes a single graph (drawn from the config seed); all
// tracks share it and only the parameter process is redrawn per track.
struct Experiment {
  Graph graph;
  GraphSpectrum spectrum;
  ArcMatrices arcs;
  EoFactorization eo;

  Experiment(Graph g, GammaConvention convention, int p)
      : graph(std::move(g)),
        spectrum(laplacian_spectrum(graph, convention)),
        arcs(arc_matrices(graph, p)),
        eo(arcs) {}
};

inline Experiment make_experiment(const SimConfig& cfg) {
  cfg.validate();
  return Experiment(generate_random_graph(cfg.n_nodes, cfg.edge_prob, cfg.seed),
                    cfg.gamma_l_convention, cfg.dim_p);
}

// Per-step log of one track, indices 0..T-1 holding steps k = 1..T.
struct TrackRecord {
  long track_len = 0;
  long warm_start_iters = 0;
  std::vector<double> mse_u_G;    // ||u(k) - u*(Theta_k)||_G^2
  std::vector<double> mse_u;      // unweighted squared distance on (z, alpha)
  std::vector<double> mse_primal; // ||x(k) - x*(Theta_k)||^2
  std::vector<double> mse_dual;   // ||alpha(k) - alpha*(Theta_k)||^2
  std::vector<double> q;
  std::vector<double> g;
  std::vector<double> delta;
  std::vector<double> dx_star;      // ||x*(Theta_k) - x*(Theta_{k-1})||
  std::vector<double> dgrad_star;   // gradient increment norm at the optima
  std::vector<double> dx4;          // dx_star^4
  std::vector<double> dl4;          // ||lambda* increment||^4 = (sqrt(2)||d alpha*||)^4
  std::vector<double> lemma1_slack; // rhs - lhs of the per-step inequality
  std::vector<char> lemma1_pass;    // slack within the relative tolerance
};

// Trace hook: called with (k, x) after warm start (k = 0) and after every
// round. Used by the CLI --trace flag.
using TraceSink = std::function<void(long k, const Eigen::VectorXd& x)>;

inline TrackRecord run_track(const SimConfig& cfg, const Experiment& exp,
                             std::uint64_t track_index,
                             const TraceSink* trace = nullptr) {
  const ProcessConfig pc = cfg.process();
  rng::Stream stream(cfg.seed, rng::kDomainTrack, track_index);

  ParameterState theta = stationary_sample(pc, stream);
  AdmmState state;
  try {
    state = warm_start(theta, exp.arcs, cfg.rho, cfg.warm_start_eps,
                       cfg.warm_start_max_iters, cfg.mu_tol, exp.eo);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (track " +
                         std::to_string(track_index) + ", seed " +
                         std::to_string(cfg.seed) + ")");
  }
  if (trace) (*trace)(0, state.x);

  OptimalPoint opt = solve_optimal(theta, exp.arcs, cfg.mu_tol, exp.eo);

  TrackRecord rec;
  rec.track_len = cfg.track_len;
  const auto reserve = static_cast<std::size_t>(cfg.track_len);
  for (auto* v : {&rec.mse_u_G, &rec.mse_u, &rec.mse_primal, &rec.mse_dual, &rec.q,
                  &rec.g, &rec.delta, &rec.dx_star, &rec.dgrad_star, &rec.dx4,
                  &rec.dl4, &rec.lemma1_slack})
    v->reserve(reserve);
  rec.lemma1_pass.reserve(reserve);

  for (long k = 1; k <= cfg.track_len; ++k) {
    const ParameterState theta_new = ar1_step(theta, pc, stream);
    const AdmmState state_new = step(state, theta_new, exp.arcs);
    const OptimalPoint opt_new = solve_optimal(theta_new, exp.arcs, cfg.mu_tol, exp.eo);
    const ContractionQuantities cq =
        contraction(theta_new, theta, opt_new, opt, exp.arcs, exp.spectrum, cfg.rho,
                    cfg.phi, cfg.mu_tol);
    const Lemma1Check chk = check_lemma1(state, state_new, opt_new, opt, cq);

    const double gd = g_deviation(state_new, opt_new);
    rec.mse_u_G.push_back(gd * gd);
    rec.mse_u.push_back((state_new.z - opt_new.z_star).squaredNorm() +
                        (state_new.alpha - opt_new.alpha_star).squaredNorm());
    rec.mse_primal.push_back((state_new.x - opt_new.x_star).squaredNorm());
    rec.mse_dual.push_back((state_new.alpha - opt_new.alpha_star).squaredNorm());
    rec.q.push_back(cq.q);
    rec.g.push_back(cq.g);
    rec.delta.push_back(cq.delta);
    rec.dx_star.push_back(cq.dx_star);
    rec.dgrad_star.push_back(cq.dgrad_star);
    rec.dx4.push_back(std::pow(cq.dx_star, 4));
    const double dalpha = (opt_new.alpha_star - opt.alpha_star).norm();
    rec.dl4.push_back(std::pow(std::sqrt(2.0) * dalpha, 4));
    rec.lemma1_slack.push_back(chk.slack);
    rec.lemma1_pass.push_back(chk.pass ? 1 : 0);

    if (trace) (*trace)(k, state_new.x);

    theta = theta_new;
    state = state_new;
    opt = opt_new;
  }
  return rec;
}

inline TrackRecord run_track(const SimConfig& cfg, std::uint64_t track_index) {
  const Experiment exp = make_experiment(cfg);
  return run_track(cfg, exp, track_index);
}

namespace detail {

// Runs f(0..n-1) on `threads` workers. Results must be written to
// preallocated per-index slots; any exception is rethrown on the caller.
template <typename F>
inline void parallel_for(long n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  threads = static_cast<int>(std::min<long>(threads, n));
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

inline MeanSem mean_sem(const std::vector<double>& v) {
  MeanSem out;
  const auto n = v.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sem = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return out;
}

}  // namespace detail

// Across-track averages per step, with standard errors of the mean.
struct MeanCurves {
  std::vector<double> mse_primal_mean, mse_primal_sem;
  std::vector<double> mse_dual_mean, mse_dual_sem;
  std::vector<double> mse_uG_mean, mse_uG_sem;
};

// Pooled fourth-moment estimates of the optimal-point increments. The SEM is
// computed across per-track means: tracks are independent while steps within
// a track are correlated, so the per-track aggregation gives an honest error
// bar.
struct MomentEstimates {
  double B_x4_hat = 0.0;
  double B_x4_sem = 0.0;
  double B_lambda4_hat = 0.0;
  double B_lambda4_sem = 0.0;
  long samples = 0;
  double B_x = 0.0;       // fourth root of B_x4_hat
  double B_lambda = 0.0;  // fourth root of B_lambda4_hat
};

struct MonteCarloResult {
  MeanCurves curves;
  MomentEstimates moments;
  std::vector<TrackRecord> records;
};

inline MonteCarloResult monte_carlo(const SimConfig& cfg, int threads = 1) {
  cfg.validate();
  if (cfg.num_tracks < 2) throw ConfigError("monte_carlo: num_tracks must be >= 2");
  const Experiment exp = make_experiment(cfg);
  const long n = cfg.num_tracks;
  const long T = cfg.track_len;

  MonteCarloResult out;
  out.records.resize(n);
  detail::parallel_for(n, threads, [&](long t) {
    out.records[t] = run_track(cfg, exp, static_cast<std::uint64_t>(t));
  });

  auto curve = [&](auto field, std::vector<double>& mean, std::vector<double>& sem) {
    mean.resize(T);
    sem.resize(T);
    std::vector<double> column(n);
    for (long k = 0; k < T; ++k) {
      for (long t = 0; t < n; ++t) column[t] = (out.records[t].*field)[k];
      const auto ms = detail::mean_sem(column);
      mean[k] = ms.mean;
      sem[k] = ms.sem;
    }
  };
  curve(&TrackRecord::mse_primal, out.curves.mse_primal_mean, out.curves.mse_primal_sem);
  curve(&TrackRecord::mse_dual, out.curves.mse_dual_mean, out.curves.mse_dual_sem);
  curve(&TrackRecord::mse_u_G, out.curves.mse_uG_mean, out.curves.mse_uG_sem);

  auto pooled = [&](auto field, double& hat, double& sem) {
    std::vector<double> track_means(n);
    double total = 0.0;
    for (long t = 0; t < n; ++t) {
      const auto& v = out.records[t].*field;
      double s = 0.0;
      for (double x : v) s += x;
      track_means[t] = s / static_cast<double>(v.size());
      total += s;
    }
    hat = total / static_cast<double>(n * T);
    const auto ms = detail::mean_sem(track_means);
    sem = ms.sem;
  };
  pooled(&TrackRecord::dx4, out.moments.B_x4_hat, out.moments.B_x4_sem);
  pooled(&TrackRecord::dl4, out.moments.B_lambda4_hat, out.moments.B_lambda4_sem);
  out.moments.samples = n * T;
  out.moments.B_x = std::pow(out.moments.B_x4_hat, 0.25);
  out.moments.B_lambda = std::pow(out.moments.B_lambda4_hat, 0.25);
  return out;
}

// Degree-4 deviation polynomial of the limsup bound:
//   (rho m / n)^2 Bx^4
//   + 4 (rho m^{3/2} / (n^{3/2} sqrt(2 gamma_L))) Bx^3 Bl
//   + 4 (sqrt(rho m) / (sqrt(n) (2 rho gamma_L)^{3/2})) Bl^3 Bx
//   + 6 (m / (n gamma_L)) Bx^2 Bl^2
//   + (1 / (4 rho^2 gamma_L^2)) Bl^4.
inline double bound_B1(double B_x, double B_lambda, double rho, double m, double n,
                       double gamma_L) {
  if (!(rho > 0.0) || !(m > 0.0) || !(n > 0.0) || !(gamma_L > 0.0))
    throw ConfigError("bound_B1: rho, m, n, gamma_L must be > 0");
  if (B_x < 0.0 || B_lambda < 0.0)
    throw ConfigError("bound_B1: B_x and B_lambda must be >= 0");
  const double bx = B_x, bl = B_lambda;
  double v = std::pow(rho * m / n, 2) * std::pow(bx, 4);
  v += 4.0 * (rho * std::pow(m, 1.5) / (std::pow(n, 1.5) * std::sqrt(2.0 * gamma_L))) *
       (bx * bx * bx * bl);
  v += 4.0 * (std::sqrt(rho * m) / (std::sqrt(n) * std::pow(2.0 * rho * gamma_L, 1.5))) *
       (bl * bl * bl * bx);
  v += 6.0 * (m / (n * gamma_L)) * (bx * bx * bl * bl);
  v += (1.0 / (4.0 * rho * rho * gamma_L * gamma_L)) * std::pow(bl, 4);
  return v;
}

// Degree-2 companion polynomial:
//   (rho m / n) Bx^2 + 2 sqrt(m / (n gamma_L)) Bx Bl + (1 / (2 rho gamma_L)) Bl^2.
inline double bound_B2(double B_x, double B_lambda, double rho, double m, double n,
                       double gamma_L) {
  if (!(rho > 0.0) || !(m > 0.0) || !(n > 0.0) || !(gamma_L > 0.0))
    throw ConfigError("bound_B2: rho, m, n, gamma_L must be > 0");
  if (B_x < 0.0 || B_lambda < 0.0)
    throw ConfigError("bound_B2: B_x and B_lambda must be >= 0");
  return (rho * m / n) * B_x * B_x +
         2.0 * std::sqrt(m / (n * gamma_L)) * B_x * B_lambda +
         (1.0 / (2.0 * rho * gamma_L)) * B_lambda * B_lambda;
}

// Least-squares fit of log E[prod q] against the window length.
struct DecayFit {
  double C_hat = 1.0;
  double gamma_hat = 1.0;
  double r_squared = 0.0;
  int max_window = 0;
  long windows_per_length = 0;
  std::vector<double> mean_product;  // index w-1 holds window length w
  std::vector<double> sem;
};

// q_sampler(track, step) must return q(Theta_step) of an independently drawn
// stationary track; step runs 1..max_window. The guard threshold below flags
// fits indistinguishable from no decay (q identically 1 yields gamma_hat = 1
// exactly, e.g. when rows_per_node < p forces mu = 0).
template <typename QSampler>
inline DecayFit fit_decay(QSampler&& q_sampler, long num_tracks, int max_window) {
  if (num_tracks < 2 || max_window < 2)
    throw ConfigError("fit_decay: need num_tracks >= 2 and max_window >= 2");
  DecayFit fit;
  fit.max_window = max_window;
  fit.windows_per_length = num_tracks;
  std::vector<double> sum(max_window, 0.0), sumsq(max_window, 0.0);
  for (long t = 0; t < num_tracks; ++t) {
    double prod = 1.0;
    for (int w = 1; w <= max_window; ++w) {
      prod *= q_sampler(t, w);
      sum[w - 1] += prod;
      sumsq[w - 1] += prod * prod;
    }
  }
  fit.mean_product.resize(max_window);
  fit.sem.resize(max_window);
  const double nn = static_cast<double>(num_tracks);
  for (int w = 0; w < max_window; ++w) {
    fit.mean_product[w] = sum[w] / nn;
    const double var =
        std::max(0.0, (sumsq[w] - nn * fit.mean_product[w] * fit.mean_product[w]) /
                          (nn - 1.0));
    fit.sem[w] = std::sqrt(var / nn);
  }

  // Plain least squares of y = log(mean) on x = window length.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int w = 1; w <= max_window; ++w) {
    const double y = std::log(fit.mean_product[w - 1]);
    sx += w;
    sy += y;
    sxx += static_cast<double>(w) * w;
    sxy += w * y;
  }
  const double W = max_window;
  const double slope = (W * sxy - sx * sy) / (W * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / W;
  fit.gamma_hat = std::exp(slope);
  fit.C_hat = std::exp(intercept);

  double ss_res = 0, ss_tot = 0;
  const double y_mean = sy / W;
  for (int w = 1; w <= max_window; ++w) {
    const double y = std::log(fit.mean_product[w - 1]);
    const double yhat = intercept + slope * w;
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - y_mean) * (y - y_mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);

  if (fit.gamma_hat >= 1.0 - 1e-9)
    throw NumericalError("estimate_decay: degenerate decay, gamma_hat = " +
                         std::to_string(fit.gamma_hat));
  return fit;
}

// Estimates (C, gamma) of the geometric bound on E[prod q(Theta_i)] from
// stationary process tracks. Tracks are simulated fresh (process only, no
// ADMM iterates) on the experiment's fixed graph.
inline DecayFit estimate_decay(const SimConfig& cfg, const Experiment& exp,
                               int max_window = 40, long num_tracks = 4000) {
  cfg.validate();
  const ProcessConfig pc = cfg.process();
  std::vector<double> qbuf;
  qbuf.reserve(static_cast<std::size_t>(num_tracks) * max_window);
  for (long t = 0; t < num_tracks; ++t) {
    rng::Stream stream(cfg.seed, rng::kDomainDecay, static_cast<std::uint64_t>(t));
    ParameterState theta = stationary_sample(pc, stream);
    for (int w = 1; w <= max_window; ++w) {
      theta = ar1_step(theta, pc, stream);
      const Curvature c = curvature_constants(theta);
      const double delta =
          contraction_delta(c.mu, c.L, exp.spectrum, cfg.rho, cfg.phi, cfg.mu_tol);
      qbuf.push_back(1.0 / (1.0 + delta));
    }
  }
  return fit_decay(
      [&](long t, int w) { return qbuf[static_cast<std::size_t>(t) * max_window + w - 1]; },
      num_tracks, max_window);
}

inline DecayFit estimate_decay(const SimConfig& cfg, int max_window = 40,
                               long num_tracks = 4000) {
  const Experiment exp = make_experiment(cfg);
  return estimate_decay(cfg, exp, max_window, num_tracks);
}

// Assembled limsup bound and its empirical comparison.
struct BoundReport {
  double B1 = 0.0;
  double B2 = 0.0;
  double C_hat = 1.0;
  double gamma_hat = 1.0;
  double theorem1_rhs = 0.0;   // 2 C / (1 - gamma^{1/2})^2 * sqrt(B1)
  double observed_plateau = 0.0;  // last-quarter mean of the mse_uG curve
  bool bound_satisfied = false;
};

inline BoundReport assemble_bound_report(const MomentEstimates& est, const DecayFit& fit,
                                         const SimConfig& cfg, const Experiment& exp,
                                         const MeanCurves& curves) {
  if (!(fit.gamma_hat < 1.0))
    throw NumericalError("theorem1_rhs: requires gamma_hat < 1");
  BoundReport rep;
  const double m = exp.arcs.m_arcs;
  const double n = exp.arcs.n_nodes;
  rep.B1 = bound_B1(est.B_x, est.B_lambda, cfg.rho, m, n, exp.spectrum.gamma_L);
  rep.B2 = bound_B2(est.B_x, est.B_lambda, cfg.rho, m, n, exp.spectrum.gamma_L);
  rep.C_hat = fit.C_hat;
  rep.gamma_hat = fit.gamma_hat;
  const double denom = 1.0 - std::sqrt(fit.gamma_hat);
  rep.theorem1_rhs = 2.0 * fit.C_hat / (denom * denom) * std::sqrt(rep.B1);

  const long T = static_cast<long>(curves.mse_uG_mean.size());
  const long start = (3 * T) / 4;  // last quarter of the horizon
  double s = 0.0;
  for (long k = start; k < T; ++k) s += curves.mse_uG_mean[k];
  rep.observed_plateau = T > start ? s / static_cast<double>(T - start) : 0.0;
  rep.bound_satisfied = rep.theorem1_rhs >= rep.observed_plateau;
  return rep;
}

inline BoundReport theorem1_rhs(const MomentEstimates& est, const DecayFit& fit,
                                const SimConfig& cfg, const MeanCurves& curves) {
  const Experiment exp = make_experiment(cfg);
  return assemble_bound_report(est, fit, cfg, exp, curves);
}

}  // namespace admmtrack

#endif  // ADMMTRACK_ANALYSIS_HPP_
