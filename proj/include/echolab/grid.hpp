#pragma once
// Torus-quantized Hilbert space: grid, wavefunctions, basis transforms and
// Gaussian packets.
//
// Conventions:
//   position nodes  θ_j = 2πj/N,            j = 0..N−1
//   momentum nodes  p_n = ħ_eff (n − N/2),  n = 0..N−1, spanning [−π, π)
//   ħ_eff = 2π/N
//
// The position→momentum transform is the unitary DFT in these conventions,
//   ψ̃_n = N^{−1/2} Σ_j ψ_j exp(−i p_n θ_j / ħ) ,
// which reduces to a standard FFT of (−1)^j ψ_j because
// p_n θ_j/ħ = 2πj(n − N/2)/N.

#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "echolab/common.hpp"

namespace echolab {

struct TorusGrid {
  int N = 0;
  double hbar = 0.0;  // effective Planck constant 2π/N

  double theta(int j) const { return kTwoPi * j / N; }
  double p(int n) const { return hbar * (n - N / 2); }
};

inline TorusGrid make_grid(int N) {
  if (N < 2) throw std::invalid_argument("make_grid: N must be >= 2");
  return TorusGrid{N, kTwoPi / N};
}

enum class Basis { position, momentum };

struct WaveFunction {
  TorusGrid grid;
  Basis basis = Basis::position;
  VectorXcd amp;

  double norm2() const { return amp.squaredNorm(); }
};

inline Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (a.grid.N != b.grid.N || a.basis != b.basis)
    throw std::invalid_argument("inner_product: grid or basis mismatch");
  return a.amp.dot(b.amp);  // Eigen's dot conjugates the left factor
}

// Unitary centered DFT; works for any N (Eigen FFT handles non powers of two).
inline WaveFunction transform(const WaveFunction& psi, Basis target) {
  if (psi.basis == target) return psi;
  const int N = psi.grid.N;
  WaveFunction out{psi.grid, target, VectorXcd(N)};
  std::vector<Complex> buf_in(N), buf_out(N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  // kissfft caches plans per size inside the FFT object; keep one per thread.
  static thread_local Eigen::FFT<double> fft;
  if (target == Basis::momentum) {
    for (int j = 0; j < N; ++j)
      buf_in[j] = (j & 1) ? -psi.amp[j] : psi.amp[j];
    fft.fwd(buf_out, buf_in);
    for (int n = 0; n < N; ++n) out.amp[n] = buf_out[n] * scale;
  } else {
    for (int n = 0; n < N; ++n) buf_in[n] = psi.amp[n];
    fft.inv(buf_out, buf_in);
    // Eigen's inv includes a 1/N factor; ×√N yields the unitary inverse.
    const double inv_scale = std::sqrt(static_cast<double>(N));
    for (int j = 0; j < N; ++j) {
      const Complex v = buf_out[j] * inv_scale;
      out.amp[j] = (j & 1) ? -v : v;
    }
  }
  return out;
}

// Periodicized Gaussian packet centered at (θ₀, p₀) with position width σ_θ.
// Winding images are added until the largest new term falls below 1e−16.
inline WaveFunction gaussian_packet(const TorusGrid& grid, double theta0, double p0,
                                    double sigma_theta) {
  if (sigma_theta <= 0.0) throw std::invalid_argument("gaussian_packet: sigma must be > 0");
  if (sigma_theta > kPi / 4)
    throw std::invalid_argument("gaussian_packet: sigma too large for the torus");
  WaveFunction psi{grid, Basis::position, VectorXcd::Zero(grid.N)};
  const double inv4s2 = 1.0 / (4.0 * sigma_theta * sigma_theta);
  for (int w = 0;; ++w) {
    double max_term = 0.0;
    for (int sign = (w == 0 ? 0 : -1); sign <= 1; sign += 2) {
      const double shift = kTwoPi * w * (w == 0 ? 1 : sign);
      for (int j = 0; j < grid.N; ++j) {
        const double d = grid.theta(j) - theta0 + shift;
        const double mag = std::exp(-d * d * inv4s2);
        max_term = std::max(max_term, mag);
        psi.amp[j] += mag * std::polar(1.0, p0 * d / grid.hbar);
      }
      if (w == 0) break;
    }
    if (max_term < 1e-16) break;
    if (w > 64) break;  // σ ≤ π/4 converges long before this
  }
  psi.amp /= std::sqrt(psi.norm2());
  return psi;
}

// Expectation helpers used by tests (circular mean of θ, mean p, variance of p).
inline double circular_mean_theta(const WaveFunction& psi) {
  Complex z = 0;
  for (int j = 0; j < psi.grid.N; ++j)
    z += std::norm(psi.amp[j]) * std::polar(1.0, psi.grid.theta(j));
  return wrap_2pi(std::arg(z));
}

inline double mean_p(const WaveFunction& psi) {
  WaveFunction mom = transform(psi, Basis::momentum);
  double m = 0;
  for (int n = 0; n < mom.grid.N; ++n) m += std::norm(mom.amp[n]) * mom.grid.p(n);
  return m;
}

inline double var_p(const WaveFunction& psi) {
  WaveFunction mom = transform(psi, Basis::momentum);
  const double mu = mean_p(psi);
  double v = 0;
  for (int n = 0; n < mom.grid.N; ++n) {
    const double d = mom.grid.p(n) - mu;
    v += std::norm(mom.amp[n]) * d * d;
  }
  return v;
}

}  // namespace echolab
