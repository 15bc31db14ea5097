#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../classical.hpp"
#include "../dicke.hpp"
#include "../full_engine.hpp"
#include "../models.hpp"
#include "../observables.hpp"
#include "../spectral.hpp"
#include "../svg.hpp"
#include "config.hpp"
#include "parallel.hpp"
#include "result_table.hpp"

namespace kicktop {

// Full-engine state vectors grow as 2^N; past this cap a single trajectory
// stops being desk-scale.
inline constexpr int kFullEvolutionCap = 20;

struct ExperimentOutput {
  ResultTable table;
  // extra artifacts keyed by filename suffix (".density", ...)
  std::vector<std::pair<std::string, ResultTable>> extra;
};

namespace detail_runner {

inline std::set<std::string> keys_of(std::initializer_list<const char*> names) {
  std::set<std::string> keys = {"output", "svg", "threads"};
  for (const char* n : names) keys.insert(n);
  return keys;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void echo_config(ResultTable& t, const ConfigView& cfg) {
  t.add_meta("experiment", cfg.kind());
  for (const auto& [k, v] : cfg.raw()) t.add_meta(k, v);
}

// Records a value the run actually used, defaults included, so the output
// alone is enough to regenerate it.
inline void effective(ResultTable& t, const std::string& key, const std::string& value) {
  t.add_meta(key + ".effective", value);
}

inline void effective(ResultTable& t, const std::string& key, double value) {
  effective(t, key, fmt(value));
}

inline TopParams top_params(const ConfigView& cfg) {
  TopParams tp;
  tp.k = cfg.number("k");
  tp.p = cfg.number("p", std::numbers::pi / 2);
  tp.N = static_cast<int>(cfg.integer("N", 0));
  try {
    tp.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  return tp;
}

inline DisorderKind disorder_kind(const ConfigView& cfg) {
  const std::string s = cfg.str("disorder", "interaction");
  if (s == "interaction") return DisorderKind::interaction;
  if (s == "field") return DisorderKind::field;
  throw ConfigError("disorder must be 'interaction' or 'field', got '" + s + "'");
}

inline std::vector<std::pair<double, double>> initial_states(const ConfigView& cfg) {
  if (cfg.has("preset") && cfg.has("state"))
    throw ConfigError("give either 'state' or 'preset', not both");
  if (cfg.has("preset")) return {state_preset(cfg.str("preset"))};
  if (cfg.has("state")) return cfg.state_list("state");
  throw ConfigError("missing initial state: set 'state = theta phi' or 'preset = ...'");
}

inline unsigned threads(const ConfigView& cfg) {
  return static_cast<unsigned>(cfg.integer("threads", 0));
}

inline std::uint64_t master_seed(const ConfigView& cfg, long realizations) {
  if (realizations > 0 && !cfg.has("seed"))
    throw ConfigError("a master 'seed' is required when realizations > 0");
  return cfg.seed("seed", 0);
}

struct MeanErr {
  double mean = 0.0, err = 0.0;
};

inline MeanErr across(const std::vector<double>& v) {
  MeanErr m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= double(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.err = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
  }
  return m;
}

inline void check_full_capacity(int N) {
  if (N > kFullEvolutionCap)
    throw CapacityError("full-engine evolution needs 2^N amplitudes; N = " + std::to_string(N) +
                        " exceeds the cap of " + std::to_string(kFullEvolutionCap));
}

// One disordered trajectory; calls record(step, state) at every kick
// including step 0.
template <class F>
void full_trajectory(const TopParams& tp, const DisorderRealization& real,
                     double theta, double phi, long kicks, F&& record) {
  const FullFloquet op(tp, real);
  FullState s = embed_dicke(coherent_state(theta, phi, tp.N));
  record(0L, s);
  for (long n = 1; n <= kicks; ++n) {
    op.step(s);
    record(n, s);
  }
}

} // namespace detail_runner

// --- entropy-time ------------------------------------------------------------

// Disorder-averaged S_Q after each kick for one initial state. Clean runs
// use the collective-spin engine; disordered runs use the full engine and a
// partial trace.
inline ExperimentOutput run_entropy_time(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w", "realizations", "seed",
                                     "state", "preset", "kicks", "q", "record_every"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  const double w = cfg.number("w", 0.0);
  const int q = static_cast<int>(cfg.integer("q", 1));
  const long kicks = cfg.integer("kicks", 1000);
  const long every = cfg.integer("record_every", 1);
  if (every < 1) throw ConfigError("record_every must be >= 1");
  const auto [theta, phi] = initial_states(cfg).at(0);
  const long realizations = w == 0.0 ? 0 : cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, realizations);
  const DisorderKind kind = disorder_kind(cfg);

  const std::size_t samples = std::size_t(kicks / every) + 1;
  ExperimentOutput out;
  out.table.columns = {"n[kicks]", "S" + std::to_string(q) + "[1]",
                       "stderr[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "w", w);
  effective(out.table, "q", double(q));
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "record_every", double(every));
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));
  effective(out.table, "engine", w == 0.0 ? "symmetric" : "full");

  std::vector<double> mean(samples, 0.0), err(samples, 0.0);
  if (w == 0.0) {
    const Eigen::MatrixXcd u0 = symmetric_floquet(tp);
    const SymmetricState start = coherent_state(theta, phi, tp.N);
    std::size_t idx = 0;
    evolve_symmetric_observe(start, u0, kicks, [&](long n, const SymmetricState& s) {
      if (n % every) return;
      mean[idx++] = q == 1 ? single_qubit_entropy_from_J(expectation_J(s), tp.j())
                           : symmetric_bipartite_entropy(s, q);
    });
    // spot-check the fast path against the full engine on small systems
    if (tp.N <= 10) {
      const long probe = std::min<long>(kicks, 50);
      const FullFloquet op(tp, DisorderRealization::none(tp.N));
      SymmetricState sym = start;
      FullState full = embed_dicke(start);
      for (long n = 1; n <= probe; ++n) {
        sym = apply_operator(u0, sym);
        op.step(full);
        const double a = q == 1 ? single_qubit_entropy_from_J(expectation_J(sym), tp.j())
                                : symmetric_bipartite_entropy(sym, q);
        const double b = linear_entropy(reduced_density(full, q));
        if (std::abs(a - b) > 1e-8)
          throw ValidationError("entropy-time: symmetric/full engine cross-check failed at kick " +
                                std::to_string(n));
      }
      out.table.add_meta("crosscheck", "symmetric vs full engine, " + std::to_string(probe) +
                                           " kicks, within 1e-8");
    }
  } else {
    check_full_capacity(tp.N);
    const auto curves = ordered_parallel_map(
        std::size_t(realizations), threads(cfg), [&](std::size_t r) {
          std::vector<double> curve(samples);
          std::size_t idx = 0;
          const auto real = DisorderRealization::generate(kind, tp.N, w, subseed(seed, r));
          full_trajectory(tp, real, theta, phi, kicks, [&](long n, const FullState& s) {
            if (n % every) return;
            curve[idx++] = linear_entropy(reduced_density(s, q));
          });
          return curve;
        });
    for (std::size_t i = 0; i < samples; ++i) {
      std::vector<double> vals(curves.size());
      for (std::size_t r = 0; r < curves.size(); ++r) vals[r] = curves[r][i];
      const MeanErr m = across(vals);
      mean[i] = m.mean;
      err[i] = m.err;
    }
  }
  for (std::size_t i = 0; i < samples; ++i)
    out.table.add_row({double(i * every), mean[i], err[i]});
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));

  if (cfg.has("svg")) {
    svg::Series s{"S" + std::to_string(q), {}, {}};
    for (const auto& row : out.table.rows) {
      s.x.push_back(row[0]);
      s.y.push_back(row[1]);
    }
    svg::line_plot(cfg.str("svg"), {s}, "kicks", "linear entropy");
  }
  return out;
}

// --- revival-scan -------------------------------------------------------------

// Clean S1 curves for several N, reported against n, n/sqrt(N) and n/N so
// the Ehrenfest and revival scalings can be read off directly.
inline ExperimentOutput run_revival_scan(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw,
                       keys_of({"k", "p", "N_list", "state", "preset", "kicks", "record_every"}));
  const Timer timer;

  if (cfg.has("N")) throw ConfigError("revival-scan takes 'N_list', not 'N'");
  std::vector<long> n_list;
  for (double v : cfg.list("N_list")) n_list.push_back(static_cast<long>(v));
  const double k = cfg.number("k");
  const double p = cfg.number("p", std::numbers::pi / 2);
  const long kicks = cfg.integer("kicks", 1000);
  const long every = cfg.integer("record_every", 1);
  const auto [theta, phi] = initial_states(cfg).at(0);

  ExperimentOutput out;
  out.table.columns = {"N[qubits]", "n[kicks]", "n_over_sqrtN[1]", "n_over_N[1]", "S1[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", p);
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "record_every", double(every));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));

  for (long N : n_list) {
    const TopParams tp{k, p, static_cast<int>(N)};
    const Eigen::MatrixXcd u0 = symmetric_floquet(tp);
    evolve_symmetric_observe(coherent_state(theta, phi, tp.N), u0, kicks,
                             [&](long n, const SymmetricState& s) {
                               if (n % every) return;
                               const double s1 = single_qubit_entropy_from_J(
                                   expectation_J(s), tp.j());
                               out.table.add_row({double(N), double(n),
                                                  n / std::sqrt(double(N)),
                                                  double(n) / double(N), s1});
                             });
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));

  if (cfg.has("svg")) {
    std::vector<svg::Series> series;
    for (long N : n_list) series.push_back({"N=" + std::to_string(N), {}, {}});
    for (const auto& row : out.table.rows) {
      for (std::size_t i = 0; i < n_list.size(); ++i)
        if (long(row[0]) == n_list[i]) {
          series[i].x.push_back(row[2]);
          series[i].y.push_back(row[4]);
        }
    }
    svg::line_plot(cfg.str("svg"), series, "n / sqrt(N)", "S1");
  }
  return out;
}

// --- chi ----------------------------------------------------------------------

// Disorder-averaged overlap with the symmetric subspace, either after each
// kick (chi-time) or time-averaged against w (chi-vs-w).
inline ExperimentOutput run_chi_time(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w", "realizations", "seed",
                                     "state", "preset", "kicks", "record_every"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  check_full_capacity(tp.N);
  const double w = cfg.number("w", 0.0);
  const long kicks = cfg.integer("kicks", 1000);
  const long every = cfg.integer("record_every", 1);
  const auto [theta, phi] = initial_states(cfg).at(0);
  const long realizations = w == 0.0 ? 1 : cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, w == 0.0 ? 0 : realizations);
  const DisorderKind kind = disorder_kind(cfg);

  const std::size_t samples = std::size_t(kicks / every) + 1;
  const auto curves =
      ordered_parallel_map(std::size_t(realizations), threads(cfg), [&](std::size_t r) {
        std::vector<double> curve(samples);
        std::size_t idx = 0;
        const auto real = DisorderRealization::generate(kind, tp.N, w, subseed(seed, r));
        full_trajectory(tp, real, theta, phi, kicks, [&](long n, const FullState& s) {
          if (n % every) return;
          curve[idx++] = chi_overlap(s);
        });
        return curve;
      });

  ExperimentOutput out;
  out.table.columns = {"n[kicks]", "chi[1]", "stderr[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "w", w);
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "record_every", double(every));
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> vals(curves.size());
    for (std::size_t r = 0; r < curves.size(); ++r) vals[r] = curves[r][i];
    const MeanErr m = across(vals);
    out.table.add_row({double(i * every), m.mean, m.err});
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));
  return out;
}

inline ExperimentOutput run_chi_vs_w(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w_list", "realizations",
                                     "seed", "state", "preset", "kicks", "average_from",
                                     "average_to"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  check_full_capacity(tp.N);
  if (cfg.has("w")) throw ConfigError("chi-vs-w takes 'w_list', not 'w'");
  const std::vector<double> w_list = cfg.list("w_list");
  const long kicks = cfg.integer("kicks", 1000);
  // saturation window: the default averages the second half of the run
  const long avg_from = cfg.integer("average_from", kicks / 2);
  const long avg_to = cfg.integer("average_to", kicks);
  if (avg_from < 0 || avg_to > kicks || avg_from >= avg_to)
    throw ConfigError("need 0 <= average_from < average_to <= kicks");
  const auto [theta, phi] = initial_states(cfg).at(0);
  const long realizations = cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, realizations);
  const DisorderKind kind = disorder_kind(cfg);

  ExperimentOutput out;
  out.table.columns = {"w[1]", "chi_avg[1]", "stderr[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));
  out.table.add_meta("average_window", std::to_string(avg_from) + ".." + std::to_string(avg_to));

  for (double w : w_list) {
    const auto vals =
        ordered_parallel_map(std::size_t(realizations), threads(cfg), [&](std::size_t r) {
          const auto real = DisorderRealization::generate(kind, tp.N, w, subseed(seed, r));
          double sum = 0.0;
          long count = 0;
          full_trajectory(tp, real, theta, phi, kicks, [&](long n, const FullState& s) {
            if (n >= avg_from && n <= avg_to) {
              sum += chi_overlap(s);
              ++count;
            }
          });
          return sum / double(count);
        });
    const MeanErr m = across(vals);
    out.table.add_row({w, m.mean, m.err});
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));
  return out;
}

// --- deff-vs-w ------------------------------------------------------------

// Effective dimension of a coherent state in the Floquet eigenbasis,
// averaged over disorder, for each w. Dense diagonalization; capped N.
inline ExperimentOutput run_deff(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w_list", "realizations",
                                     "seed", "state", "preset", "alpha", "dense_cap"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  const int cap = static_cast<int>(cfg.integer("dense_cap", kDenseFloquetCap));
  if (tp.N > cap)
    throw CapacityError("deff-vs-w: N exceeds the dense diagonalization cap");
  if (cfg.has("w")) throw ConfigError("deff-vs-w takes 'w_list', not 'w'");
  const std::vector<double> w_list = cfg.list("w_list");
  const double alpha = cfg.number("alpha", 1e-4);
  const auto [theta, phi] = initial_states(cfg).at(0);
  const long realizations = cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, realizations);
  const DisorderKind kind = disorder_kind(cfg);
  const FullState state = embed_dicke(coherent_state(theta, phi, tp.N));

  ExperimentOutput out;
  out.table.columns = {"w[1]", "deff[states]", "stderr[states]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "alpha", alpha);
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));

  for (double w : w_list) {
    const long reps = w == 0.0 ? 1 : realizations; // w = 0 is deterministic
    std::vector<double> vals(reps);
    for (long r = 0; r < reps; ++r) {
      const auto real = DisorderRealization::generate(kind, tp.N, w, subseed(seed, r));
      const Eigen::MatrixXcd u = build_dense_floquet(tp, real, cap);
      const UnitaryEigensystem eig = unitary_eigensystem(u);
      vals[r] = double(effective_dimension(state, eig, alpha));
    }
    const MeanErr m = across(vals);
    out.table.add_row({w, m.mean, m.err});
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));
  return out;
}

// --- phase-space ------------------------------------------------------------

// Time-averaged S_Q over a grid of initial coherent states; the heatmap data
// behind the pseudo phase-space portraits.
inline ExperimentOutput run_phase_space(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w", "realizations", "seed",
                                     "kicks", "q", "grid", "average_from", "average_to"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  const double w = cfg.number("w", 0.0);
  const int q = static_cast<int>(cfg.integer("q", 1));
  const long kicks = cfg.integer("kicks", 2000);
  const long avg_from = cfg.integer("average_from", std::max(1L, kicks / 5));
  const long avg_to = cfg.integer("average_to", kicks);
  if (avg_from < 0 || avg_to > kicks || avg_from >= avg_to)
    throw ConfigError("need 0 <= average_from < average_to <= kicks");

  int nt = 32, np = 32;
  if (cfg.has("grid")) {
    const std::string g = cfg.str("grid");
    const auto x = g.find('x');
    if (x == std::string::npos) throw ConfigError("grid must look like '32x32'");
    try {
      nt = std::stoi(g.substr(0, x));
      np = std::stoi(g.substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("grid must look like '32x32'");
    }
    if (nt < 1 || np < 1) throw ConfigError("grid sizes must be positive");
  }
  const long realizations = w == 0.0 ? 1 : cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, w == 0.0 ? 0 : realizations);
  const DisorderKind kind = disorder_kind(cfg);
  constexpr double pi = std::numbers::pi;

  ExperimentOutput out;
  out.table.columns = {"theta[rad]", "phi[rad]", "S" + std::to_string(q) + "_avg[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "w", w);
  effective(out.table, "q", double(q));
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  out.table.add_meta("grid.effective", std::to_string(nt) + "x" + std::to_string(np));
  out.table.add_meta("average_window", std::to_string(avg_from) + ".." + std::to_string(avg_to));

  std::vector<double> cell(nt * np, 0.0);
  if (w == 0.0) {
    const Eigen::MatrixXcd u0 = symmetric_floquet(tp);
    const auto values = ordered_parallel_map(
        std::size_t(nt) * np, threads(cfg), [&](std::size_t c) {
          const double theta = (double(c / np) + 0.5) * pi / nt;
          const double phi = -pi + (double(c % np) + 0.5) * 2.0 * pi / np;
          double sum = 0.0;
          long count = 0;
          evolve_symmetric_observe(coherent_state(theta, phi, tp.N), u0, avg_to,
                                   [&](long n, const SymmetricState& s) {
                                     if (n < avg_from) return;
                                     sum += q == 1 ? single_qubit_entropy_from_J(
                                                         expectation_J(s), tp.j())
                                                   : symmetric_bipartite_entropy(s, q);
                                     ++count;
                                   });
          return sum / double(count);
        });
    cell.assign(values.begin(), values.end());
  } else {
    check_full_capacity(tp.N);
    // disorder realizations are shared across grid cells
    std::vector<DisorderRealization> reals;
    for (long r = 0; r < realizations; ++r)
      reals.push_back(DisorderRealization::generate(kind, tp.N, w, subseed(seed, r)));
    std::vector<FullFloquet> ops;
    ops.reserve(reals.size());
    for (const auto& real : reals) ops.emplace_back(tp, real);

    const auto values = ordered_parallel_map(
        std::size_t(nt) * np, threads(cfg), [&](std::size_t c) {
          const double theta = (double(c / np) + 0.5) * pi / nt;
          const double phi = -pi + (double(c % np) + 0.5) * 2.0 * pi / np;
          const FullState start = embed_dicke(coherent_state(theta, phi, tp.N));
          double total = 0.0;
          for (const auto& op : ops) {
            FullState s = start;
            double sum = 0.0;
            long count = 0;
            for (long n = 1; n <= avg_to; ++n) {
              op.step(s);
              if (n >= avg_from) {
                sum += linear_entropy(reduced_density(s, q));
                ++count;
              }
            }
            total += sum / double(count);
          }
          return total / double(reals.size());
        });
    cell.assign(values.begin(), values.end());
  }

  for (int it = 0; it < nt; ++it)
    for (int ip = 0; ip < np; ++ip)
      out.table.add_row({(it + 0.5) * pi / nt, -pi + (ip + 0.5) * 2.0 * pi / np,
                         cell[std::size_t(it) * np + ip]});
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));

  if (cfg.has("svg")) {
    // heatmap rows vary with theta
    std::vector<double> img(cell.size());
    for (int it = 0; it < nt; ++it)
      for (int ip = 0; ip < np; ++ip) img[std::size_t(it) * np + ip] = cell[it * np + ip];
    svg::heatmap(cfg.str("svg"), img, np, nt, -pi, pi, 0.0, pi, "phi", "theta");
  }
  return out;
}

// --- spacing-stats ------------------------------------------------------------

// Pooled unfolded nearest-neighbor spacings of the positive-parity Floquet
// block across disorder realizations, with KS distances to the Poisson and
// COE references and the eigenangle density of the first realization.
inline ExperimentOutput run_spacing(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, keys_of({"k", "p", "N", "disorder", "w", "realizations", "seed",
                                     "bins", "s_max", "unfold_window", "collapse_degenerate",
                                     "density_bins", "dense_cap"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  const int cap = static_cast<int>(cfg.integer("dense_cap", kDenseFloquetCap));
  if (tp.N > cap)
    throw CapacityError("spacing-stats: N exceeds the dense diagonalization cap");
  const double w = cfg.number("w", 0.0);
  const long realizations = cfg.integer("realizations", 20);
  const std::uint64_t seed = master_seed(cfg, realizations);
  const DisorderKind kind = disorder_kind(cfg);
  const int bins = static_cast<int>(cfg.integer("bins", 50));
  const double s_max = cfg.number("s_max", 4.0);
  UnfoldOptions uopt;
  uopt.collapse_degenerate = cfg.str("collapse_degenerate", "false") == "true";
  const int density_bins = static_cast<int>(cfg.integer("density_bins", 60));

  // Unfolding scale: by default ~2% of the block, i.e. the mean-density
  // scale. A window much smaller than the band size resolves the banded
  // density at intermediate disorder and changes the statistics.
  const long block_levels = long(1) << (tp.N - 1);
  uopt.window =
      static_cast<int>(cfg.integer("unfold_window", std::max(10L, block_levels / 50)));

  std::vector<double> pooled;
  std::vector<double> density;
  for (long r = 0; r < realizations; ++r) {
    const auto real = DisorderRealization::generate(kind, tp.N, w, subseed(seed, r));
    const Eigen::MatrixXcd u = build_dense_floquet(tp, real, cap);
    const ParityBlocks blocks = parity_blocks(u, tp.N);
    const auto angles = eigenangles(blocks.plus);
    if (r == 0) density = eigenangle_density(angles, density_bins);
    const auto spacings = unfold(angles, uopt);
    pooled.insert(pooled.end(), spacings.begin(), spacings.end());
  }

  const double ks_p = ks_distance(pooled, SpacingRef::poisson);
  const double ks_c = ks_distance(pooled, SpacingRef::coe);
  const SpacingHistogram hist = spacing_histogram(pooled, bins, s_max);

  ExperimentOutput out;
  out.table.columns = {"s[1]", "density[1]", "poisson[1]", "coe[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "w", w);
  effective(out.table, "realizations", double(realizations));
  effective(out.table, "disorder", to_string(kind));
  effective(out.table, "bins", double(bins));
  effective(out.table, "s_max", s_max);
  effective(out.table, "density_bins", double(density_bins));
  out.table.add_meta("parity_block", "plus");
  out.table.add_meta("unfold_window.effective", std::to_string(uopt.window));
  out.table.add_meta("pooled_spacings", std::to_string(pooled.size()));
  out.table.add_meta("ks_poisson", fmt(ks_p));
  out.table.add_meta("ks_coe", fmt(ks_c));
  for (int b = 0; b < bins; ++b) {
    const double mid = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    out.table.add_row({mid, hist.density[b], reference_pdf(SpacingRef::poisson, mid),
                       reference_pdf(SpacingRef::coe, mid)});
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));

  ResultTable dens;
  dens.columns = {"angle[rad]", "density[1/rad]"};
  dens.add_meta("experiment", cfg.kind() + ".density");
  dens.add_meta("realization", "0");
  for (int b = 0; b < density_bins; ++b) {
    const double mid = -std::numbers::pi + (b + 0.5) * 2.0 * std::numbers::pi / density_bins;
    dens.add_row({mid, density[b]});
  }
  out.extra.emplace_back(".density", std::move(dens));

  if (cfg.has("svg")) {
    std::vector<svg::Series> refs(2);
    refs[0].label = "poisson";
    refs[1].label = "coe";
    for (int i = 0; i <= 200; ++i) {
      const double s = s_max * i / 200.0;
      refs[0].x.push_back(s);
      refs[0].y.push_back(reference_pdf(SpacingRef::poisson, s));
      refs[1].x.push_back(s);
      refs[1].y.push_back(reference_pdf(SpacingRef::coe, s));
    }
    svg::histogram(cfg.str("svg"), hist.edges, hist.density, refs, "unfolded spacing s");
  }
  return out;
}

// --- classical-compare --------------------------------------------------------

// Side-by-side clean quantum S1 and the classical ensemble entropy, with the
// ensemble width matched to the coherent state (sigma = 1/sqrt(2j)).
inline ExperimentOutput run_classical_compare(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw,
                       keys_of({"k", "p", "N", "w", "state", "preset", "kicks", "points",
                                "seed", "sigma"}));
  const Timer timer;

  const TopParams tp = top_params(cfg);
  if (cfg.number("w", 0.0) != 0.0)
    throw ConfigError("classical-compare is only meaningful at w = 0");
  const long kicks = cfg.integer("kicks", 200);
  const long points = cfg.integer("points", 10000);
  const auto [theta, phi] = initial_states(cfg).at(0);
  const std::uint64_t seed = cfg.seed("seed", 1);
  const double sigma = cfg.number("sigma", 1.0 / std::sqrt(2.0 * tp.j()));

  const Eigen::MatrixXcd u0 = symmetric_floquet(tp);
  std::vector<double> quantum(kicks + 1);
  evolve_symmetric_observe(coherent_state(theta, phi, tp.N), u0, kicks,
                           [&](long n, const SymmetricState& s) {
                             quantum[n] = single_qubit_entropy_from_J(expectation_J(s), tp.j());
                           });

  ClassicalEnsemble ens = sample_gaussian_ensemble(theta, phi, sigma, std::size_t(points), seed);
  ExperimentOutput out;
  out.table.columns = {"n[kicks]", "S1_quantum[1]", "S_classical[1]", "difference[1]"};
  echo_config(out.table, cfg);
  effective(out.table, "p", tp.p);
  effective(out.table, "kicks", double(kicks));
  effective(out.table, "points", double(points));
  effective(out.table, "seed", double(seed));
  effective(out.table, "state", fmt(theta) + " " + fmt(phi));
  out.table.add_meta("sigma.effective", fmt(sigma));
  for (long n = 0; n <= kicks; ++n) {
    if (n > 0) step_ensemble(ens, tp.k);
    const double sc = classical_linear_entropy(ens);
    out.table.add_row({double(n), quantum[n], sc, quantum[n] - sc});
  }
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));

  if (cfg.has("svg")) {
    svg::Series a{"quantum", {}, {}}, b{"classical", {}, {}};
    for (const auto& row : out.table.rows) {
      a.x.push_back(row[0]);
      a.y.push_back(row[1]);
      b.x.push_back(row[0]);
      b.y.push_back(row[2]);
    }
    svg::line_plot(cfg.str("svg"), {a, b}, "kicks", "linear entropy");
  }
  return out;
}

// --- fit ------------------------------------------------------------------

// Least-squares fit of a named model to (n, S) pairs read from a table file.
inline ExperimentOutput run_fit(const RawConfig& raw) {
  using namespace detail_runner;
  const ConfigView cfg(raw, std::set<std::string>{"model", "data", "from", "to", "guess", "N",
                                                  "sigma_sq", "output", "columns"});
  const Timer timer;

  const std::string model = cfg.require("model");
  const std::string path = cfg.require("data");
  std::ifstream in(path);
  if (!in) throw ConfigError("fit: cannot open data file " + path);
  FitData data;
  const double from = cfg.number("from", -1e300);
  const double to = cfg.number("to", 1e300);
  long col_n = 0, col_s = 1;
  if (cfg.has("columns")) {
    const auto cols = cfg.list("columns");
    if (cols.size() != 2) throw ConfigError("fit: 'columns' must be two indices");
    col_n = long(cols[0]);
    col_s = long(cols[1]);
  }
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ss(t);
    std::vector<double> fields;
    std::string tok;
    bool numeric = true;
    while (ss >> tok) {
      try {
        fields.push_back(std::stod(tok));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) continue; // header row
    if (long(fields.size()) <= std::max(col_n, col_s))
      throw ConfigError("fit: data row has too few columns");
    const double n = fields[col_n];
    if (n < from || n > to) continue;
    data.n.push_back(n);
    data.s.push_back(fields[col_s]);
  }

  FitResult r;
  std::vector<std::string> names;
  if (model == "regular") {
    const int N = static_cast<int>(cfg.integer("N", 0));
    if (N < 1) throw ConfigError("fit: regular model needs N");
    double s_inf = 0.4, alpha = 0.2;
    if (cfg.has("guess")) {
      const auto g = cfg.list("guess");
      if (g.size() != 2) throw ConfigError("fit: regular model takes 2 guesses (S_inf, alpha)");
      s_inf = g[0];
      alpha = g[1];
    }
    r = fit_regular(data, N, s_inf, alpha);
    names = {"S_inf", "alpha"};
  } else if (model == "noisy") {
    double s0 = 0.4, D = 0.01, alpha = 1e-4;
    if (cfg.has("guess")) {
      const auto g = cfg.list("guess");
      if (g.size() != 3) throw ConfigError("fit: noisy model takes 3 guesses (S0, D, alpha)");
      s0 = g[0];
      D = g[1];
      alpha = g[2];
    }
    r = fit_noisy(data, s0, D, alpha);
    names = {"S0", "D", "alpha"};
  } else if (model == "chaotic") {
    const double sigma_sq = cfg.number("sigma_sq");
    double alpha = 1.0, lambda = 1.0;
    if (cfg.has("guess")) {
      const auto g = cfg.list("guess");
      if (g.size() != 2) throw ConfigError("fit: chaotic model takes 2 guesses (alpha, lambda)");
      alpha = g[0];
      lambda = g[1];
    }
    r = fit_chaotic(data, sigma_sq, alpha, lambda);
    names = {"alpha", "lambda"};
  } else {
    throw ConfigError("fit: unknown model '" + model + "' (regular | noisy | chaotic)");
  }

  ExperimentOutput out;
  out.table.columns = {"n[kicks]", "data[1]", "fit[1]"};
  echo_config(out.table, cfg);
  for (std::size_t i = 0; i < names.size(); ++i)
    out.table.add_meta("fit." + names[i], fmt(r.params[i]));
  out.table.add_meta("fit.rss", fmt(r.rss));
  out.table.add_meta("fit.converged", r.converged ? "true" : "false");
  out.table.add_meta("fit.iterations", std::to_string(r.iterations));

  auto evaluate = [&](double n) {
    if (model == "regular")
      return regular_model(n, RegularFit{r.params[0], r.params[1],
                                         static_cast<int>(cfg.integer("N", 1))});
    if (model == "noisy") return noisy_fit_model(n, NoisyFit{r.params[0], r.params[1], r.params[2]});
    return chaotic_var(n, ChaoticModel{r.params[0], r.params[1], cfg.number("sigma_sq")});
  };
  for (std::size_t i = 0; i < data.n.size(); ++i)
    out.table.add_row({data.n[i], data.s[i], evaluate(data.n[i])});
  out.table.add_meta("wall_time_s", fmt(timer.seconds()));
  return out;
}

// --- dispatch -------------------------------------------------------------

inline ExperimentOutput run_experiment(const RawConfig& raw) {
  if (raw.kind == "entropy-time") return run_entropy_time(raw);
  if (raw.kind == "revival-scan") return run_revival_scan(raw);
  if (raw.kind == "chi-time") return run_chi_time(raw);
  if (raw.kind == "chi-vs-w") return run_chi_vs_w(raw);
  if (raw.kind == "deff-vs-w") return run_deff(raw);
  if (raw.kind == "phase-space") return run_phase_space(raw);
  if (raw.kind == "spacing-stats") return run_spacing(raw);
  if (raw.kind == "classical-compare") return run_classical_compare(raw);
  if (raw.kind == "fit") return run_fit(raw);
  throw ConfigError("unknown experiment kind [" + raw.kind + "]");
}

// Writes the main table to cfg 'output' (or the fallback) plus any extra
// artifacts with their suffixes appended.
inline void write_experiment_output(const ExperimentOutput& out, const std::string& path) {
  out.table.save(path);
  for (const auto& [suffix, table] : out.extra) table.save(path + suffix);
}

} // namespace kicktop
