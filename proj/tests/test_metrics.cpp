#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "echolab/metrics.hpp"

using namespace echolab;

namespace {

Eigen::MatrixXcd random_amplitudes(int K, int T, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXcd f(K, T);
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      const double r = uni(rng);  // |f| <= 1 as for genuine echo amplitudes
      f(k, t) = std::polar(r, kTwoPi * uni(rng));
    }
  return f;
}

std::vector<double> random_weights(int K, std::uint64_t seed) {
  auto rng = substream(seed, 1);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  std::vector<double> p(K);
  double s = 0;
  for (auto& w : p) {
    w = uni(rng);
    s += w;
  }
  for (auto& w : p) w /= s;
  return p;
}

}  // namespace

TEST_CASE("allegiance and averaged fidelity: basic identities") {
  const auto f = random_amplitudes(6, 10, 3);
  const auto p = random_weights(6, 3);
  const auto alleg = allegiance(p, f);
  const auto favg = averaged_fidelity(p, f);
  for (int t = 0; t < 10; ++t) {
    CHECK(alleg[t] >= 0.0);
    CHECK(favg[t] <= 1.0 + 1e-12);
    CHECK(alleg[t] <= favg[t] + 1e-14);  // Jensen
  }
  // single pure state: allegiance == averaged == |f|^2
  const auto f1 = random_amplitudes(1, 10, 4);
  const std::vector<double> p1{1.0};
  const auto a1 = allegiance(p1, f1);
  const auto b1 = averaged_fidelity(p1, f1);
  for (int t = 0; t < 10; ++t) {
    CHECK(a1[t] == doctest::Approx(std::norm(f1(0, t))).epsilon(1e-14));
    CHECK(a1[t] == doctest::Approx(b1[t]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(allegiance(random_weights(5, 1), f), std::invalid_argument);
}

TEST_CASE("Jensen chain on 1000 random amplitude sets") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const int K = 2 + static_cast<int>(s % 7);
    const auto f = random_amplitudes(K, 4, s);
    const auto p = random_weights(K, s);
    const auto alleg = allegiance(p, f);
    const auto favg = averaged_fidelity(p, f);
    for (int t = 0; t < 4; ++t) CHECK(alleg[t] <= favg[t] + 1e-14);
  }
}

TEST_CASE("decomposition identity < 1e-12 on random inputs") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = random_amplitudes(8, 12, s);
    const auto p = random_weights(8, s);
    for (double r : decomposition_check(p, f)) CHECK(std::abs(r) < 1e-12);
  }
  // K=1: identically zero
  const auto f1 = random_amplitudes(1, 12, 5);
  for (double r : decomposition_check({1.0}, f1)) CHECK(r == 0.0);
}

TEST_CASE("metrics invariant under a common global phase") {
  const auto f = random_amplitudes(5, 8, 9);
  const auto p = random_weights(5, 9);
  Eigen::MatrixXcd g = f * std::polar(1.0, 1.234);
  const auto a0 = allegiance(p, f);
  const auto a1 = allegiance(p, g);
  const auto b0 = averaged_fidelity(p, f);
  const auto b1 = averaged_fidelity(p, g);
  for (int t = 0; t < 8; ++t) {
    CHECK(a0[t] == doctest::Approx(a1[t]).epsilon(1e-13));
    CHECK(b0[t] == doctest::Approx(b1[t]).epsilon(1e-13));
  }
}

TEST_CASE("mixed_state_fidelity: orthonormal packets, echo identity at t=0") {
  const int K = 4;
  const auto p = random_weights(K, 2);
  const Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(K, K);
  std::vector<Eigen::MatrixXcd> cross{gram};  // t=0 cross tensor = Gram
  const auto res = mixed_state_fidelity(p, cross, gram);
  CHECK(res.certified);
  CHECK(res.orthogonality_defect == 0.0);
  CHECK(res.value[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed_state_fidelity: t=0 value within 10x the orthogonality defect") {
  const int K = 3;
  const std::vector<double> p{0.5, 0.3, 0.2};
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(K, K);
  gram(0, 1) = gram(1, 0) = 5e-4;  // near-orthogonal
  const auto res = mixed_state_fidelity(p, {gram}, gram);
  CHECK(res.certified);
  CHECK(std::abs(res.value[0] - 1.0) < 10.0 * res.orthogonality_defect);
  gram(0, 2) = gram(2, 0) = 5e-2;  // defect above threshold -> approximate
  CHECK_FALSE(mixed_state_fidelity(p, {gram}, gram).certified);
}

TEST_CASE("mixed_state_fidelity: single pure state reduces to |f|^2") {
  const Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(1, 1);
  const Complex f(0.3, -0.4);
  Eigen::MatrixXcd g(1, 1);
  g(0, 0) = f;
  const auto res = mixed_state_fidelity({1.0}, {g}, gram);
  CHECK(res.value[0] == doctest::Approx(std::norm(f)).epsilon(1e-14));
}

TEST_CASE("fit_exp_rate: exact exponential") {
  std::vector<double> t, v;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(i);
    v.push_back(std::exp(-1.1 * i));
  }
  const auto fit = fit_exp_rate(t, v, 0, 10);
  CHECK(fit.rate == doctest::Approx(1.1).epsilon(1e-6));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_exp_rate: plateau auto-truncation via saturation") {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(i);
    v.push_back(std::exp(-1.1 * i) + 1e-4);
  }
  const auto fit = fit_exp_rate(t, v, 0, 20, 1e-4);  // excludes points below 3e-4
  CHECK(fit.rate == doctest::Approx(1.1).epsilon(0.05));
  // without truncation the additive floor biases the slope much harder
  const auto raw = fit_exp_rate(t, v, 0, 20);
  CHECK(std::abs(fit.rate - 1.1) < std::abs(raw.rate - 1.1));
}

TEST_CASE("fit_exp_rate: constant series gives rate 0") {
  std::vector<double> t, v;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(i);
    v.push_back(0.37);
  }
  CHECK(fit_exp_rate(t, v, 0, 10).rate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_exp_rate: rescaling invariance and error cases") {
  std::vector<double> t, v, v2;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(i);
    v.push_back(std::exp(-0.7 * i));
    v2.push_back(123.0 * std::exp(-0.7 * i));
  }
  CHECK(fit_exp_rate(t, v, 0, 10).rate ==
        doctest::Approx(fit_exp_rate(t, v2, 0, 10).rate).epsilon(1e-12));
  std::vector<double> bad = v;
  bad[5] = -1.0;
  CHECK_THROWS_AS(fit_exp_rate(t, bad, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(fit_exp_rate(t, v, 0, 0.5), std::invalid_argument);  // < 4 points
}

TEST_CASE("saturation_estimates: reference-region arithmetic") {
  const double area = 0.1 * 0.1 * kTwoPi * kTwoPi;  // (0.2pi)^2
  const auto s = saturation_estimates(8192, area, kTwoPi / 8192);
  CHECK(s.M == 82);
  CHECK(s.sat_avg == doctest::Approx(1.22e-4).epsilon(1e-2));
  CHECK(s.sat_alleg == doctest::Approx(1.5e-6).epsilon(0.01));
}

TEST_CASE("saturation_estimates: single-cell mixture and rejection") {
  const double hbar = 0.01;
  const auto s = saturation_estimates(100, kTwoPi * hbar * 1.4, hbar);
  CHECK(s.M == 1);
  CHECK(s.sat_alleg == doctest::Approx(s.sat_avg));
  CHECK_THROWS_AS(saturation_estimates(100, kTwoPi * hbar * 0.5, hbar),
                  std::invalid_argument);
}

TEST_CASE("crossing_time and plateau_mean") {
  std::vector<double> t, v;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    v.push_back(std::exp(-2.0 * 0.1 * i));
  }
  CHECK(crossing_time(t, v, 0.5) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-3));
  CHECK(crossing_time(t, v, 1e-12) == -1.0);
  CHECK(plateau_mean(t, v, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(plateau_mean(t, v, 50.0, 60.0), std::invalid_argument);
}
