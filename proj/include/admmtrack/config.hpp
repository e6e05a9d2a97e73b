#ifndef ADMMTRACK_CONFIG_HPP_
#define ADMMTRACK_CONFIG_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "admmtrack/errors.hpp"
#include "admmtrack/graph.hpp"
#include "admmtrack/process.hpp"

namespace admmtrack {

// Experiment configuration. The file format is flat "key = value" text, one
// pair per line; '#' starts a comment; unknown keys are rejected.
struct SimConfig {
  int n_nodes = 10;
  double edge_prob = 0.5;
  int dim_p = 3;
  int rows_per_node = 3;
  double epsilon_ar = 0.01;
  double rho = 10.0;
  double phi = 2.0;
  GammaConvention gamma_l_convention = GammaConvention::kSecondLargest;
  long track_len = 300;
  long num_tracks = 200;
  double warm_start_eps = 1e-6;
  long warm_start_max_iters = 500000;
  double mu_tol = 1e-12;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  ProcessConfig process() const {
    ProcessConfig pc;
    pc.epsilon_ar = epsilon_ar;
    pc.rows_per_node = rows_per_node;
    pc.p = dim_p;
    pc.n_nodes = n_nodes;
    return pc;
  }

  void validate() const {
    auto fail = [](const std::string& key, const std::string& constraint) {
      throw ConfigError("config: " + key + " must be " + constraint);
    };
    if (n_nodes < 2) fail("n_nodes", ">= 2");
    if (!(edge_prob > 0.0) || edge_prob > 1.0) fail("edge_prob", "in (0, 1]");
    if (dim_p < 1) fail("dim_p", ">= 1");
    if (rows_per_node < 1) fail("rows_per_node", ">= 1");
    if (epsilon_ar < 0.0 || epsilon_ar > 1.0) fail("epsilon_ar", "in [0, 1]");
    if (!(rho > 0.0)) fail("rho", "> 0");
    if (!(phi > 1.0)) fail("phi", "> 1");
    if (track_len < 1) fail("track_len", ">= 1");
    if (num_tracks < 1) fail("num_tracks", ">= 1");
    if (!(warm_start_eps > 0.0)) fail("warm_start_eps", "> 0");
    if (warm_start_max_iters < 0) fail("warm_start_max_iters", ">= 0");
    if (!(mu_tol > 0.0)) fail("mu_tol", "> 0");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, int line);

template <>
inline double parse_number<double>(const std::string& key, const std::string& value,
                                   int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": not a number: '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": trailing characters in '" + value + "'");
  return v;
}

template <>
inline long parse_number<long>(const std::string& key, const std::string& value,
                               int line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": not an integer: '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": trailing characters in '" + value + "'");
  return v;
}

template <>
inline int parse_number<int>(const std::string& key, const std::string& value,
                             int line) {
  return static_cast<int>(parse_number<long>(key, value, line));
}

template <>
inline std::uint64_t parse_number<std::uint64_t>(const std::string& key,
                                                 const std::string& value, int line) {
  if (!value.empty() && value[0] == '-')
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": must be nonnegative, got '" + value + "'");
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": not an unsigned integer: '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("config line " + std::to_string(line) + ": " + key +
                      ": trailing characters in '" + value + "'");
  return v;
}

}  // namespace detail

inline SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected 'key = value', got '" + s + "'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line) +
                        ": empty key or value");
    if (key == "n_nodes") cfg.n_nodes = detail::parse_number<int>(key, value, line);
    else if (key == "edge_prob") cfg.edge_prob = detail::parse_number<double>(key, value, line);
    else if (key == "dim_p") cfg.dim_p = detail::parse_number<int>(key, value, line);
    else if (key == "rows_per_node") cfg.rows_per_node = detail::parse_number<int>(key, value, line);
    else if (key == "epsilon_ar") cfg.epsilon_ar = detail::parse_number<double>(key, value, line);
    else if (key == "rho") cfg.rho = detail::parse_number<double>(key, value, line);
    else if (key == "phi") cfg.phi = detail::parse_number<double>(key, value, line);
    else if (key == "gamma_l_convention") {
      if (value == "second_largest")
        cfg.gamma_l_convention = GammaConvention::kSecondLargest;
      else if (value == "smallest_nonzero")
        cfg.gamma_l_convention = GammaConvention::kSmallestNonzero;
      else
        throw ConfigError("config line " + std::to_string(line) +
                          ": gamma_l_convention must be 'second_largest' or "
                          "'smallest_nonzero'");
    }
    else if (key == "track_len") cfg.track_len = detail::parse_number<long>(key, value, line);
    else if (key == "num_tracks") cfg.num_tracks = detail::parse_number<long>(key, value, line);
    else if (key == "warm_start_eps") cfg.warm_start_eps = detail::parse_number<double>(key, value, line);
    else if (key == "warm_start_max_iters") cfg.warm_start_max_iters = detail::parse_number<long>(key, value, line);
    else if (key == "mu_tol") cfg.mu_tol = detail::parse_number<double>(key, value, line);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(key, value, line);
    else if (key == "out_dir") cfg.out_dir = value;
    else
      throw ConfigError("config line " + std::to_string(line) + ": unknown key '" +
                        key + "'");
  }
  cfg.validate();
  return cfg;
}

inline SimConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline std::string emit_config(const SimConfig& cfg) {
  std::ostringstream os;
  os << "n_nodes = " << cfg.n_nodes << '\n'
     << "edge_prob = " << detail::fmt_double(cfg.edge_prob) << '\n'
     << "dim_p = " << cfg.dim_p << '\n'
     << "rows_per_node = " << cfg.rows_per_node << '\n'
     << "epsilon_ar = " << detail::fmt_double(cfg.epsilon_ar) << '\n'
     << "rho = " << detail::fmt_double(cfg.rho) << '\n'
     << "phi = " << detail::fmt_double(cfg.phi) << '\n'
     << "gamma_l_convention = " << to_string(cfg.gamma_l_convention) << '\n'
     << "track_len = " << cfg.track_len << '\n'
     << "num_tracks = " << cfg.num_tracks << '\n'
     << "warm_start_eps = " << detail::fmt_double(cfg.warm_start_eps) << '\n'
     << "warm_start_max_iters = " << cfg.warm_start_max_iters << '\n'
     << "mu_tol = " << detail::fmt_double(cfg.mu_tol) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "out_dir = " << cfg.out_dir << '\n';
  return os.str();
}

}  // namespace admmtrack

#endif  // ADMMTRACK_CONFIG_HPP_
