#pragma once
// Shared plumbing: deterministic per-stream RNG, a parallel-for with ordered
// results, and a couple of small numeric helpers used across modules.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace echolab {

using Complex = std::complex<double>;
using Eigen::ArrayXd;
using Eigen::ArrayXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// --- Counter-based substreams -----------------------------------------------
//
// Every parallel work item derives its own generator from (seed, stream_id)
// through splitmix64, so results do not depend on thread scheduling.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream_id) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ stream_id));
}

// --- Thread count ------------------------------------------------------------

inline int thread_count() {
  if (const char* env = std::getenv("ECHO_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; any
// reduction the caller performs afterwards over per-index storage is
// deterministic because each index owns its slot.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = thread_count();
  if (threads == 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int used = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(used);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < used; ++t) {
    const std::int64_t lo = n * t / used;
    const std::int64_t hi = n * (t + 1) / used;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- Small numeric helpers ---------------------------------------------------

// Reduce an angle to [0, 2π).
inline double wrap_2pi(double x) {
  x = std::fmod(x, kTwoPi);
  return x < 0 ? x + kTwoPi : x;
}

// Reduce to [−π, π).
inline double wrap_pi(double x) {
  x = std::fmod(x + kPi, kTwoPi);
  if (x < 0) x += kTwoPi;
  return x - kPi;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 1.0;
  std::size_t n = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i];
    sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit f;
  f.n = x.size();
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0;
  const double ybar = sy / n;
  double ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (x.size() > 2) f.stderr_slope = std::sqrt(ss_res / (n - 2) / (sxx - sx * sx / n));
  return f;
}

}  // namespace echolab
