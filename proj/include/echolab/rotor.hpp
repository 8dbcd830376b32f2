#pragma once
// Quantum kicked rotor on the torus: split-operator Floquet step, a dense
// unitary oracle for small N, and echo-amplitude records for packet mixtures.

#include <optional>

#include "echolab/grid.hpp"

namespace echolab {

enum class KickOrder { kick_then_drift, drift_then_kick };
enum class PerturbationSplit { asymmetric, symmetric };

struct KickedRotorParams {
  double K = 10.0;
  double eps = 0.0;  // perturbation strength; σ_quantum = eps / grid.hbar
  TorusGrid grid;
  KickOrder kick_order = KickOrder::drift_then_kick;
  PerturbationSplit split = PerturbationSplit::asymmetric;

  double sigma_quantum() const { return eps / grid.hbar; }

  // Drift coefficient c in exp(−i c p²/(2ħ)) for the two branches.
  double drift_coeff(bool perturbed) const {
    if (split == PerturbationSplit::asymmetric) return perturbed ? 1.0 + eps : 1.0;
    return perturbed ? 1.0 + 0.5 * eps : 1.0 - 0.5 * eps;
  }
};

namespace detail {

inline void apply_kick(WaveFunction& psi, double K) {
  const double inv_h = 1.0 / psi.grid.hbar;
  for (int j = 0; j < psi.grid.N; ++j)
    psi.amp[j] *= std::polar(1.0, -K * std::cos(psi.grid.theta(j)) * inv_h);
}

inline void apply_drift(WaveFunction& psi, double c) {
  const double inv_2h = 1.0 / (2.0 * psi.grid.hbar);
  for (int n = 0; n < psi.grid.N; ++n) {
    const double p = psi.grid.p(n);
    psi.amp[n] *= std::polar(1.0, -c * p * p * inv_2h);
  }
}

}  // namespace detail

// One Floquet period. Input and output are in the position basis.
inline WaveFunction kr_step(const WaveFunction& psi_in, const KickedRotorParams& params,
                            bool perturbed) {
  if (std::abs(psi_in.norm2() - 1.0) > 1e-6)
    throw std::invalid_argument("kr_step: input state is not normalized");
  WaveFunction psi = (psi_in.basis == Basis::position)
                         ? psi_in
                         : transform(psi_in, Basis::position);
  const double c = params.drift_coeff(perturbed);
  if (params.kick_order == KickOrder::kick_then_drift) {
    detail::apply_kick(psi, params.K);
    psi = transform(psi, Basis::momentum);
    detail::apply_drift(psi, c);
    psi = transform(psi, Basis::position);
  } else {
    psi = transform(psi, Basis::momentum);
    detail::apply_drift(psi, c);
    psi = transform(psi, Basis::position);
    detail::apply_kick(psi, params.K);
  }
  return psi;
}

// Dense N×N Floquet unitary built from explicit DFT matrices and diagonal
// phase factors; independent code path used as a correctness oracle.
inline Eigen::MatrixXcd dense_floquet_matrix(const KickedRotorParams& params, bool perturbed) {
  const int N = params.grid.N;
  if (N > 64) throw std::invalid_argument("dense_floquet_matrix: N must be <= 64");
  Eigen::MatrixXcd F(N, N);  // position -> momentum unitary DFT
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (int n = 0; n < N; ++n)
    for (int j = 0; j < N; ++j)
      F(n, j) = scale * std::polar(1.0, -params.grid.p(n) * params.grid.theta(j) / params.grid.hbar);
  Eigen::VectorXcd kick(N), drift(N);
  for (int j = 0; j < N; ++j)
    kick[j] = std::polar(1.0, -params.K * std::cos(params.grid.theta(j)) / params.grid.hbar);
  const double c = params.drift_coeff(perturbed);
  for (int n = 0; n < N; ++n) {
    const double p = params.grid.p(n);
    drift[n] = std::polar(1.0, -c * p * p / (2.0 * params.grid.hbar));
  }
  const Eigen::MatrixXcd Fh = F.adjoint();
  if (params.kick_order == KickOrder::kick_then_drift)
    return Fh * drift.asDiagonal() * F * kick.asDiagonal();
  return kick.asDiagonal() * Fh * drift.asDiagonal() * F;
}

inline WaveFunction dense_oracle_step(const WaveFunction& psi_in, const KickedRotorParams& params,
                                      bool perturbed) {
  WaveFunction psi = (psi_in.basis == Basis::position)
                         ? psi_in
                         : transform(psi_in, Basis::position);
  psi.amp = dense_floquet_matrix(params, perturbed) * psi.amp;
  return psi;
}

// --- Mixtures ----------------------------------------------------------------

struct Region {
  // bounds in units of (θ/2π, p/2π)
  double theta_lo = 0.2, theta_hi = 0.3;
  double p_lo = 0.3, p_hi = 0.4;

  double area() const { return (theta_hi - theta_lo) * (p_hi - p_lo) * kTwoPi * kTwoPi; }
};

struct MixtureEntry {
  double weight;
  double theta0, p0;
  double sigma_theta;
};

struct MixtureSpec {
  std::vector<MixtureEntry> entries;
  Region region;
  std::uint64_t seed = 0;

  double area() const { return region.area(); }
};

// Uniform random packet centers in the region; equal weights; width σ_θ=√(ħ/2)
// unless overridden.
inline MixtureSpec make_mixture(const TorusGrid& grid, const Region& region, int n_packets,
                                std::uint64_t seed, double sigma_theta = -1.0) {
  if (n_packets < 1) throw std::invalid_argument("make_mixture: need at least one packet");
  if (sigma_theta <= 0.0) sigma_theta = std::sqrt(grid.hbar / 2.0);
  MixtureSpec mix;
  mix.region = region;
  mix.seed = seed;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < n_packets; ++k) {
    auto rng = substream(seed, static_cast<std::uint64_t>(k));
    const double th = region.theta_lo + (region.theta_hi - region.theta_lo) * uni(rng);
    const double pp = region.p_lo + (region.p_hi - region.p_lo) * uni(rng);
    mix.entries.push_back({1.0 / n_packets, th * kTwoPi, wrap_pi(pp * kTwoPi), sigma_theta});
  }
  return mix;
}

// Deterministic grid placement (used to show seed independence of fitted rates).
inline MixtureSpec make_grid_mixture(const TorusGrid& grid, const Region& region, int per_side,
                                     double sigma_theta = -1.0) {
  if (sigma_theta <= 0.0) sigma_theta = std::sqrt(grid.hbar / 2.0);
  MixtureSpec mix;
  mix.region = region;
  const int n = per_side * per_side;
  for (int a = 0; a < per_side; ++a)
    for (int b = 0; b < per_side; ++b) {
      const double fx = (a + 0.5) / per_side;
      const double fy = (b + 0.5) / per_side;
      const double th = region.theta_lo + (region.theta_hi - region.theta_lo) * fx;
      const double pp = region.p_lo + (region.p_hi - region.p_lo) * fy;
      mix.entries.push_back({1.0 / n, th * kTwoPi, wrap_pi(pp * kTwoPi), sigma_theta});
    }
  return mix;
}

struct EchoRecord {
  std::vector<int> times;                 // 0..T
  Eigen::MatrixXcd f;                     // [packet k × time t]
  std::optional<std::vector<Eigen::MatrixXcd>> cross;  // per t: g_{kk'}(t)
  Eigen::MatrixXcd gram;                  // ⟨ψ_k|ψ_k'⟩ at t=0
  std::vector<double> weights;
};

// Echo amplitudes f_k(t) = ⟨ψ_k^{(0)}(t) | ψ_k^{(ε)}(t)⟩ via two forward
// evolutions, optionally with the cross tensor g_{kk'}(t).
inline EchoRecord echo_amplitudes(const MixtureSpec& mixture, const KickedRotorParams& params,
                                  int T, bool want_cross = false) {
  if (T < 1) throw std::invalid_argument("echo_amplitudes: T must be >= 1");
  const int Kn = static_cast<int>(mixture.entries.size());
  EchoRecord rec;
  rec.times.resize(T + 1);
  for (int t = 0; t <= T; ++t) rec.times[t] = t;
  rec.f.resize(Kn, T + 1);
  rec.weights.resize(Kn);
  for (int k = 0; k < Kn; ++k) rec.weights[k] = mixture.entries[k].weight;

  std::vector<WaveFunction> base(Kn);
  parallel_for(Kn, [&](std::int64_t k) {
    const auto& e = mixture.entries[k];
    base[k] = gaussian_packet(params.grid, e.theta0, e.p0, e.sigma_theta);
  });

  rec.gram.resize(Kn, Kn);
  for (int k = 0; k < Kn; ++k)
    for (int k2 = 0; k2 < Kn; ++k2) rec.gram(k, k2) = inner_product(base[k], base[k2]);

  if (!want_cross) {
    parallel_for(Kn, [&](std::int64_t k) {
      WaveFunction u = base[k], v = base[k];
      rec.f(k, 0) = 1.0;
      for (int t = 1; t <= T; ++t) {
        u = kr_step(u, params, false);
        v = kr_step(v, params, true);
        if (std::abs(u.norm2() - 1.0) > 1e-6 || std::abs(v.norm2() - 1.0) > 1e-6)
          throw std::runtime_error("echo_amplitudes: norm drift beyond 1e-6 at t=" +
                                   std::to_string(t));
        rec.f(k, t) = inner_product(u, v);
      }
    });
    return rec;
  }

  // Cross amplitudes need all states at each time; evolve in lockstep.
  std::vector<WaveFunction> u = base, v = base;
  rec.cross.emplace();
  rec.cross->reserve(T + 1);
  rec.cross->push_back(rec.gram);
  for (int k = 0; k < Kn; ++k) rec.f(k, 0) = 1.0;
  for (int t = 1; t <= T; ++t) {
    parallel_for(Kn, [&](std::int64_t k) {
      u[k] = kr_step(u[k], params, false);
      v[k] = kr_step(v[k], params, true);
    });
    Eigen::MatrixXcd g(Kn, Kn);
    parallel_for(Kn, [&](std::int64_t k) {
      for (int k2 = 0; k2 < Kn; ++k2) g(k, k2) = inner_product(u[k], v[k2]);
    });
    for (int k = 0; k < Kn; ++k) rec.f(k, t) = g(k, k);
    rec.cross->push_back(std::move(g));
  }
  return rec;
}

}  // namespace echolab
