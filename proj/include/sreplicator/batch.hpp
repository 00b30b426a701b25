#pragma once

// Independent replicate runs. Run r uses seed derive_seed(seed_base, r), and
// results are assembled by run index, so output does not depend on the
// number of worker threads.

#include "sreplicator/estimators.hpp"
#include "sreplicator/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sreplicator {

/// Runs fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency) and returns the results in index order. The first exception
/// thrown by any task is rethrown.
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct RunSummary {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  Vector final_state;
  Vector log_final;           // log X_i(T)
  double min_coordinate = 1.0;  // min_i X_i(T)
  Vector time_average;
  CooccurrenceMatrix cooccurrence;
};

inline RunSummary summarize(const Trajectory& traj, double burn_in) {
  RunSummary s;
  const std::size_t last = traj.size() - 1;
  s.final_state = traj.state(last);
  s.log_final = traj.log_state(last);
  s.min_coordinate = std::exp(s.log_final.minCoeff());
  s.time_average = time_average(traj, burn_in).coords();
  s.cooccurrence = cooccurrence(traj, burn_in);
  return s;
}

/// n_runs independent simulations; cfg.seed is ignored in favour of the
/// derived per-run seeds. burn_in < 0 selects 1% of the horizon.
inline std::vector<RunSummary> batch_simulate(const Game& game, const SimConfig& cfg, std::size_t n_runs,
                                              std::uint64_t seed_base, double burn_in = -1.0,
                                              std::size_t workers = 0) {
  if (n_runs < 1) throw std::invalid_argument("n_runs >= 1");
  const double bi = burn_in < 0.0 ? 0.01 * cfg.t_final : burn_in;
  return parallel_map(n_runs, workers, [&](std::size_t r) {
    SimConfig run_cfg = cfg;
    run_cfg.seed = rng::derive_seed(seed_base, r);
    RunSummary s = summarize(simulate(game, run_cfg), bi);
    s.run_index = r;
    s.seed = run_cfg.seed;
    return s;
  });
}

}  // namespace sreplicator
