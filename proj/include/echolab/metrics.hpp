#pragma once
// Echo observables from raw amplitude records: allegiance, averaged fidelity,
// mixed-state fidelity, the decomposition identity, saturation estimates and
// exponential-rate fits.

#include <cmath>

#include "echolab/common.hpp"
#include "echolab/rotor.hpp"

namespace echolab {

// |Σ_k p_k f_k(t)|²
inline std::vector<double> allegiance(const std::vector<double>& p, const Eigen::MatrixXcd& f) {
  if (static_cast<Eigen::Index>(p.size()) != f.rows())
    throw std::invalid_argument("allegiance: weight/amplitude shape mismatch");
  std::vector<double> out(f.cols());
  for (Eigen::Index t = 0; t < f.cols(); ++t) {
    Complex s(0, 0);
    for (Eigen::Index k = 0; k < f.rows(); ++k) s += p[k] * f(k, t);
    out[t] = std::norm(s);
  }
  return out;
}

// Σ_k p_k |f_k(t)|²
inline std::vector<double> averaged_fidelity(const std::vector<double>& p,
                                             const Eigen::MatrixXcd& f) {
  if (static_cast<Eigen::Index>(p.size()) != f.rows())
    throw std::invalid_argument("averaged_fidelity: weight/amplitude shape mismatch");
  std::vector<double> out(f.cols());
  for (Eigen::Index t = 0; t < f.cols(); ++t) {
    double s = 0;
    for (Eigen::Index k = 0; k < f.rows(); ++k) s += p[k] * std::norm(f(k, t));
    out[t] = s;
  }
  return out;
}

struct MixedFidelityResult {
  std::vector<double> value;
  double orthogonality_defect = 0.0;  // max off-diagonal |Gram| entry
  bool certified = false;             // defect < 1e−3
};

// F(t) = Σ_{kk'} p_k p_{k'} |g_{kk'}(t)|² / Tr(ρ²), with Tr(ρ²) evaluated from
// the weights and the packet Gram matrix (exact quadratic form, no
// orthogonality assumption in the purity).
inline MixedFidelityResult mixed_state_fidelity(const std::vector<double>& p,
                                                const std::vector<Eigen::MatrixXcd>& cross,
                                                const Eigen::MatrixXcd& gram) {
  const Eigen::Index K = gram.rows();
  if (static_cast<Eigen::Index>(p.size()) != K)
    throw std::invalid_argument("mixed_state_fidelity: weight shape mismatch");
  MixedFidelityResult res;
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b)
      if (a != b) res.orthogonality_defect = std::max(res.orthogonality_defect,
                                                      std::abs(gram(a, b)));
  res.certified = res.orthogonality_defect < 1e-3;
  // Tr(ρ²) = Σ_{kk'} p_k p_k' |⟨ψ_k|ψ_k'⟩|²
  double purity = 0;
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b) purity += p[a] * p[b] * std::norm(gram(a, b));
  res.value.reserve(cross.size());
  for (const auto& g : cross) {
    double s = 0;
    for (Eigen::Index a = 0; a < K; ++a)
      for (Eigen::Index b = 0; b < K; ++b) s += p[a] * p[b] * std::norm(g(a, b));
    res.value.push_back(s / purity);
  }
  return res;
}

// F̄ − 𝓕 − Σ_k p_k |f_k − f̄|² ; identically zero up to rounding.
inline std::vector<double> decomposition_check(const std::vector<double>& p,
                                               const Eigen::MatrixXcd& f) {
  const auto fbar = averaged_fidelity(p, f);
  const auto alleg = allegiance(p, f);
  std::vector<double> out(f.cols());
  for (Eigen::Index t = 0; t < f.cols(); ++t) {
    Complex mean(0, 0);
    for (Eigen::Index k = 0; k < f.rows(); ++k) mean += p[k] * f(k, t);
    double fluct = 0;
    for (Eigen::Index k = 0; k < f.rows(); ++k) fluct += p[k] * std::norm(f(k, t) - mean);
    out[t] = fbar[t] - alleg[t] - fluct;
  }
  return out;
}

struct ExpFit {
  double rate = 0.0;
  double stderr = 0.0;
  double r2 = 1.0;
  double log_resid_rms = 0.0;
  std::size_t n_points = 0;
  double t_first = 0.0, t_last = 0.0;
};

// Least-squares slope of −ln(series) vs t over [t1, t2]. Points below
// 3× saturation (when provided) are excluded.
inline ExpFit fit_exp_rate(const std::vector<double>& t, const std::vector<double>& series,
                           double t1, double t2, double saturation = 0.0) {
  if (t.size() != series.size()) throw std::invalid_argument("fit_exp_rate: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 - 1e-12 || t[i] > t2 + 1e-12) continue;
    if (saturation > 0 && series[i] < 3.0 * saturation) continue;
    if (series[i] <= 0)
      throw std::invalid_argument("fit_exp_rate: non-positive value in window");
    xs.push_back(t[i]);
    ys.push_back(-std::log(series[i]));
  }
  if (xs.size() < 4) throw std::invalid_argument("fit_exp_rate: window has fewer than 4 points");
  LinearFit lf = linear_fit(xs, ys);
  ExpFit fit;
  fit.rate = lf.slope;
  fit.stderr = lf.stderr_slope;
  fit.r2 = lf.r2;
  fit.n_points = xs.size();
  fit.t_first = xs.front();
  fit.t_last = xs.back();
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (lf.slope * xs[i] + lf.intercept);
    ss += r * r;
  }
  fit.log_resid_rms = std::sqrt(ss / xs.size());
  return fit;
}

struct SaturationEstimates {
  double sat_avg;    // 1/N
  double sat_alleg;  // 1/(N·M)
  long M;            // number of quantum cells in the mixture area
};

inline SaturationEstimates saturation_estimates(int N, double mixture_area, double hbar) {
  const double cell = kTwoPi * hbar;
  if (mixture_area <= cell)
    throw std::invalid_argument("saturation_estimates: mixture area below one quantum cell");
  long M = std::lround(mixture_area / cell);
  if (M < 1) M = 1;
  return {1.0 / N, 1.0 / (static_cast<double>(N) * M), M};
}

// Mean of the series over t ∈ [t1, t2] — plateau estimator.
inline double plateau_mean(const std::vector<double>& t, const std::vector<double>& series,
                           double t1, double t2) {
  double s = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t1 - 1e-12 && t[i] <= t2 + 1e-12) {
      s += series[i];
      ++n;
    }
  if (n == 0) throw std::invalid_argument("plateau_mean: empty window");
  return s / n;
}

// First time the series drops below `level`, by log-linear interpolation
// between bracketing samples; returns −1 if it never does.
inline double crossing_time(const std::vector<double>& t, const std::vector<double>& series,
                            double level) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (series[i] < level && series[i - 1] >= level) {
      const double la = std::log(series[i - 1]);
      const double lb = std::log(series[i]);
      const double frac = (la - std::log(level)) / (la - lb);
      return t[i - 1] + frac * (t[i] - t[i - 1]);
    }
  }
  return -1.0;
}

}  // namespace echolab
