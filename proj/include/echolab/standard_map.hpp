#pragma once
// Classical standard map: ensembles, Lyapunov exponent, angular correlation
// and momentum diffusion.
//
// std_map_step implements the textbook kick-first form
//     p' = p + K sinθ ,  θ' = θ + p' .
// Ensemble propagation used for the quantum comparison follows the quantum
// module's Floquet ordering (see KickOrder); with drift_then_kick the step is
//     θ' = θ + p ,  p' = p + K sinθ' .
// Both are area-preserving and conjugate to each other.
//
// Ensemble reductions are accumulated per fixed-size index block and then
// summed in block order, so results are bit-identical for any thread count.

#include "echolab/common.hpp"
#include "echolab/rotor.hpp"

namespace echolab {

struct PhasePoint {
  double theta;  // [0, 2π)
  double p;      // [−π, π)
};

inline PhasePoint std_map_step(PhasePoint pt, double K) {
  const double p1 = wrap_pi(pt.p + K * std::sin(pt.theta));
  const double t1 = wrap_2pi(pt.theta + p1);
  return {t1, p1};
}

struct ClassicalEnsemble {
  std::vector<PhasePoint> points;
  std::vector<PhasePoint> initial_points;
  std::uint64_t seed = 0;
};

inline ClassicalEnsemble make_ensemble(const Region& region, std::int64_t n,
                                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_ensemble: n must be >= 1");
  if (region.theta_hi <= region.theta_lo || region.p_hi <= region.p_lo)
    throw std::invalid_argument("make_ensemble: empty region");
  ClassicalEnsemble ens;
  ens.seed = seed;
  ens.points.resize(n);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  parallel_for(n, [&](std::int64_t i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    const double th = region.theta_lo + (region.theta_hi - region.theta_lo) * uni(rng);
    const double pp = region.p_lo + (region.p_hi - region.p_lo) * uni(rng);
    ens.points[i] = {wrap_2pi(th * kTwoPi), wrap_pi(pp * kTwoPi)};
  });
  ens.initial_points = ens.points;
  return ens;
}

// Largest Lyapunov exponent by tangent-map iteration with periodic
// renormalization, averaged over random chaotic-sea initial points.
inline double lyapunov(double K, int n_transient, std::int64_t n_iter, std::uint64_t seed,
                       int n_points = 16, double* spread_out = nullptr) {
  if (n_iter < 10000) throw std::invalid_argument("lyapunov: n_iter must be >= 1e4");
  std::vector<double> estimates(n_points);
  parallel_for(n_points, [&](std::int64_t i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PhasePoint pt{uni(rng) * kTwoPi, (uni(rng) - 0.5) * kTwoPi};
    for (int t = 0; t < n_transient; ++t) pt = std_map_step(pt, K);
    double v0 = 1.0, v1 = 0.0;  // tangent vector (δθ, δp)
    double log_sum = 0.0;
    for (std::int64_t t = 0; t < n_iter; ++t) {
      // Tangent map of (p' = p + K sinθ, θ' = θ + p'):
      //   δp' = δp + K cosθ δθ ;  δθ' = δθ + δp'
      const double c = K * std::cos(pt.theta);
      const double dp = v1 + c * v0;
      const double dth = v0 + dp;
      v0 = dth;
      v1 = dp;
      pt = std_map_step(pt, K);
      if ((t + 1) % 10 == 0) {
        const double r = std::sqrt(v0 * v0 + v1 * v1);
        log_sum += std::log(r);
        v0 /= r;
        v1 /= r;
      }
    }
    const double r = std::sqrt(v0 * v0 + v1 * v1);
    log_sum += std::log(r);
    estimates[i] = log_sum / static_cast<double>(n_iter);
  });
  double mean = 0;
  for (double e : estimates) mean += e;
  mean /= n_points;
  double var = 0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  const double spread = std::sqrt(var / n_points);
  if (spread_out) *spread_out = spread;
  if (K != 0.0 && mean > 0 && spread > 0.1 * std::abs(mean))
    throw std::runtime_error("lyapunov: estimates spread above 10%, not converged");
  return mean;
}

struct ClassicalSeries {
  std::vector<double> t;
  std::vector<double> value;
};

namespace detail {
inline constexpr std::int64_t kBlock = 8192;
}

// C(t) = |⟨exp{iγ[θ_t − θ_0]}⟩|² with θ accumulated (unwrapped) along each
// trajectory. The stepping follows `order` so quantum and classical runs are
// like-for-like.
inline ClassicalSeries angular_correlation(const ClassicalEnsemble& ens, double K, double gamma,
                                           int T, KickOrder order = KickOrder::drift_then_kick) {
  if (T < 1) throw std::invalid_argument("angular_correlation: T must be >= 1");
  const std::int64_t n = static_cast<std::int64_t>(ens.initial_points.size());
  const std::int64_t n_blocks = (n + detail::kBlock - 1) / detail::kBlock;
  std::vector<std::vector<Complex>> block_sums(n_blocks);
  parallel_for(n_blocks, [&](std::int64_t b) {
    auto& sums = block_sums[b];
    sums.assign(T + 1, Complex(0, 0));
    const std::int64_t lo = b * detail::kBlock;
    const std::int64_t hi = std::min(n, lo + detail::kBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      PhasePoint pt = ens.initial_points[i];
      double acc = 0.0;  // unwrapped angular displacement
      sums[0] += Complex(1, 0);
      for (int t = 1; t <= T; ++t) {
        if (order == KickOrder::drift_then_kick) {
          acc += pt.p;
          const double t1 = wrap_2pi(pt.theta + pt.p);
          const double p1 = wrap_pi(pt.p + K * std::sin(t1));
          pt = {t1, p1};
        } else {
          const double p1 = wrap_pi(pt.p + K * std::sin(pt.theta));
          acc += p1;
          pt = {wrap_2pi(pt.theta + p1), p1};
        }
        sums[t] += std::polar(1.0, gamma * acc);
      }
    }
  });
  ClassicalSeries out;
  out.t.resize(T + 1);
  out.value.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    Complex s(0, 0);
    for (std::int64_t b = 0; b < n_blocks; ++b) s += block_sums[b][t];
    out.t[t] = t;
    out.value[t] = std::norm(s / static_cast<double>(n));
  }
  return out;
}

// ⟨(p_t − p_0)²⟩ with unwrapped momentum; slope ≈ K²/2 in the quasilinear regime.
inline ClassicalSeries momentum_msd(const ClassicalEnsemble& ens, double K, int T,
                                    KickOrder order = KickOrder::drift_then_kick) {
  const std::int64_t n = static_cast<std::int64_t>(ens.initial_points.size());
  const std::int64_t n_blocks = (n + detail::kBlock - 1) / detail::kBlock;
  std::vector<std::vector<double>> block_sums(n_blocks);
  parallel_for(n_blocks, [&](std::int64_t b) {
    auto& sums = block_sums[b];
    sums.assign(T + 1, 0.0);
    const std::int64_t lo = b * detail::kBlock;
    const std::int64_t hi = std::min(n, lo + detail::kBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      const PhasePoint start = ens.initial_points[i];
      double theta = start.theta;
      double p = start.p;  // unwrapped
      for (int t = 1; t <= T; ++t) {
        if (order == KickOrder::drift_then_kick) {
          theta = wrap_2pi(theta + p);
          p += K * std::sin(theta);
        } else {
          p += K * std::sin(theta);
          theta = wrap_2pi(theta + p);
        }
        const double d = p - start.p;
        sums[t] += d * d;
      }
    }
  });
  ClassicalSeries out;
  out.t.resize(T + 1);
  out.value.assign(T + 1, 0.0);
  for (int t = 0; t <= T; ++t) {
    double s = 0;
    for (std::int64_t b = 0; b < n_blocks; ++b) s += block_sums[b][t];
    out.t[t] = t;
    out.value[t] = s / static_cast<double>(n);
  }
  return out;
}

}  // namespace echolab
