// echo-lab: reproducible experiment runner for quantum-echo decay studies.
//
//   echo-lab run <config> [--set key=value ...]
//   echo-lab fit <csv> --col <name> --window t1:t2
//   echo-lab plot <csv>
//
// `run` executes one experiment described by a flat key=value config, writes
// curves.csv, report.txt, manifest.txt (a complete re-runnable config) and
// plot.svg into the output directory, and exits 0 iff every acceptance flag
// of the run passes.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "echolab/config.hpp"
#include "echolab/csvio.hpp"
#include "echolab/metrics.hpp"
#include "echolab/oscillator.hpp"
#include "echolab/rotor.hpp"
#include "echolab/standard_map.hpp"
#include "echolab/svgplot.hpp"

namespace {

using namespace echolab;

constexpr const char* kVersion = "echo-lab 1.0.0";

// Default chaotic drive: three strong overlapping resonances.
constexpr const char* kDefaultModes = "1:2.0:0.3,2:1.5:1.4,3:1.5:2.6";
constexpr double kDefaultW0 = 6.0;

struct Flag {
  std::string name;
  bool pass;
  std::string detail;
};

struct RunReport {
  std::vector<Flag> flags;
  std::vector<std::pair<std::string, std::string>> fields;
  double wall_seconds = 0.0;

  void field(const std::string& k, double v) { fields.emplace_back(k, format_double(v)); }
  void field(const std::string& k, const std::string& v) { fields.emplace_back(k, v); }
  void flag(const std::string& name, bool pass, const std::string& detail) {
    flags.push_back({name, pass, detail});
  }
  bool all_pass() const {
    for (const auto& f : flags)
      if (!f.pass) return false;
    return true;
  }
};

DriveSpec parse_modes(const std::string& s) {
  DriveSpec drive;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    DriveMode mo;
    if (std::sscanf(item.c_str(), "%d:%lf:%lf", &mo.m, &mo.g, &mo.chi) != 3)
      throw std::runtime_error("config: bad drive mode '" + item + "' (want m:g:chi)");
    drive.modes.push_back(mo);
  }
  if (drive.modes.empty()) throw std::runtime_error("config: empty drive mode list");
  return drive;
}

OscillatorParams oscillator_params(Config& cfg) {
  OscillatorParams params;
  params.w0 = cfg.get_double("w0", kDefaultW0);
  params.hbar = cfg.get_double("hbar", 1e-3);
  params.dt = cfg.get_double("dt", 1e-3);
  params.drive = parse_modes(cfg.get_string("modes", kDefaultModes));
  return params;
}

PDensitySpec p_density_spec(Config& cfg, const std::string& prefix, PKind default_kind,
                            Complex default_center, double default_width,
                            std::int64_t default_n) {
  PDensitySpec P;
  const std::string kind = cfg.get_string(prefix + "kind", default_kind == PKind::gaussian_ring
                                                               ? "gaussian_ring"
                                                               : default_kind == PKind::exponential
                                                                     ? "exponential"
                                                                     : "delta");
  if (kind == "gaussian_ring") P.kind = PKind::gaussian_ring;
  else if (kind == "exponential") P.kind = PKind::exponential;
  else if (kind == "delta") P.kind = PKind::delta;
  else throw std::runtime_error("config: unknown " + prefix + "kind '" + kind + "'");
  P.center = Complex(cfg.get_double(prefix + "center_re", default_center.real()),
                     cfg.get_double(prefix + "center_im", default_center.imag()));
  P.width = cfg.get_double(prefix + "width", default_width);
  P.n_samples = cfg.get_int(prefix + "samples", default_n);
  P.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  return P;
}

Region region_from(Config& cfg) {
  Region r;
  r.theta_lo = cfg.get_double("region_theta_lo", 0.2);
  r.theta_hi = cfg.get_double("region_theta_hi", 0.3);
  r.p_lo = cfg.get_double("region_p_lo", 0.3);
  r.p_hi = cfg.get_double("region_p_hi", 0.4);
  return r;
}

void check_expected_rate(Config& cfg, RunReport& rep, const std::string& flag_name, double rate) {
  const double expect = cfg.get_double("expect_rate", 0.0);
  const double tol = cfg.get_double("expect_rate_tol", 0.15);
  if (expect > 0) {
    const bool ok = std::abs(rate - expect) <= tol * expect;
    rep.flag(flag_name, ok,
             "rate " + format_double(rate) + " vs expected " + format_double(expect) +
                 " +/- " + format_double(100 * tol) + "%");
  }
}

// --- kicked-rotor echo -------------------------------------------------------

void run_kr_echo(Config& cfg, RunReport& rep, CsvTable& curves) {
  const int N = static_cast<int>(cfg.get_int("N", 8192));
  KickedRotorParams params;
  params.grid = make_grid(N);
  params.K = cfg.get_double("K", 10.0);
  params.eps = cfg.get_double("eps_over_hbar", 1.1) * params.grid.hbar;
  const int T = static_cast<int>(cfg.get_int("T", 40));
  const int n_packets = static_cast<int>(cfg.get_int("packets", 100));
  const bool want_cross = cfg.get_bool("cross", false);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const Region region = region_from(cfg);
  const MixtureSpec mix = make_mixture(params.grid, region, n_packets, seed);

  const EchoRecord rec = echo_amplitudes(mix, params, T, want_cross);
  const auto alleg = allegiance(rec.weights, rec.f);
  const auto favg = averaged_fidelity(rec.weights, rec.f);
  const auto decomp = decomposition_check(rec.weights, rec.f);

  curves.header = {"t", "allegiance", "avg_fidelity"};
  std::vector<double> ts(rec.times.begin(), rec.times.end());
  curves.columns = {ts, alleg, favg};
  std::vector<double> fluct(alleg.size());
  for (std::size_t i = 0; i < alleg.size(); ++i) fluct[i] = favg[i] - alleg[i];
  if (want_cross) {
    const auto mixed = mixed_state_fidelity(rec.weights, *rec.cross, rec.gram);
    curves.header.push_back("mixed_fidelity");
    curves.columns.push_back(mixed.value);
    rep.field("orthogonality_defect", mixed.orthogonality_defect);
    rep.field("mixed_fidelity_certified", mixed.certified ? "true" : "false");
  }
  curves.header.push_back("fluct");
  curves.columns.push_back(fluct);

  double max_decomp = 0;
  for (double d : decomp) max_decomp = std::max(max_decomp, std::abs(d));
  rep.field("decomposition_residual_max", max_decomp);
  rep.flag("decomposition_identity", max_decomp < 1e-12,
           "max residual " + format_double(max_decomp));

  const auto sat = saturation_estimates(N, mix.area(), params.grid.hbar);
  rep.field("sat_avg", sat.sat_avg);
  rep.field("sat_alleg", sat.sat_alleg);
  rep.field("cells_M", static_cast<double>(sat.M));

  const double t1 = cfg.get_double("fit_t1", 1.0);
  const double t2 = cfg.get_double("fit_t2", 7.0);
  const ExpFit fit = fit_exp_rate(ts, alleg, t1, t2, sat.sat_alleg);
  rep.field("allegiance_rate", fit.rate);
  rep.field("allegiance_rate_stderr", fit.stderr);
  rep.field("allegiance_fit_r2", fit.r2);
  check_expected_rate(cfg, rep, "fig1_allegiance_rate", fit.rate);
}

// --- classical standard map --------------------------------------------------

void run_kr_classical(Config& cfg, RunReport& rep, CsvTable& curves) {
  const double K = cfg.get_double("K", 10.0);
  const double gamma = cfg.get_double("gamma", 2.0);
  const auto n = cfg.get_int("n", 1000000);
  const int T = static_cast<int>(cfg.get_int("T", 40));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const Region region = region_from(cfg);
  const ClassicalEnsemble ens = make_ensemble(region, n, seed);
  const ClassicalSeries corr = angular_correlation(ens, K, gamma, T);
  curves.header = {"t", "correlation"};
  curves.columns = {corr.t, corr.value};

  const double t1 = cfg.get_double("fit_t1", 1.0);
  const double t2 = cfg.get_double("fit_t2", 7.0);
  const ExpFit fit = fit_exp_rate(corr.t, corr.value, t1, t2, 1.0 / static_cast<double>(n));
  rep.field("correlation_rate", fit.rate);
  rep.field("correlation_rate_stderr", fit.stderr);
  check_expected_rate(cfg, rep, "classical_correlation_rate", fit.rate);

  double spread = 0;
  const double lam = lyapunov(K, 100, cfg.get_int("lyapunov_iters", 100000), seed, 16, &spread);
  rep.field("lyapunov", lam);
  rep.field("lyapunov_spread", spread);
}

// --- oscillator: phase correlation / allegiance / FGR ------------------------

void run_osc_classical(Config& cfg, RunReport& rep, CsvTable& curves) {
  OscillatorParams params = oscillator_params(cfg);
  PDensitySpec P = p_density_spec(cfg, "p_", PKind::gaussian_ring, 2.0, 0.05, 100000);
  const double T = cfg.get_double("T", 40.0);
  const int store = static_cast<int>(cfg.get_int("store_stride", 25));
  const double c = cfg.get_double("c", 1.0);
  const double sigma = cfg.get_double("sigma", 0.1);

  const ComplexSeries corr = phase_correlation(P, params, c, T, store);
  const ActionCumulant cum = action_cumulant(P, params, T, store);
  const RealSeries a_hi = allegiance_classical(P, params, sigma, T, store);
  const RealSeries a_lo = allegiance_classical(P, params, 0.5 * sigma, T, store);
  const RealSeries fgr_hi = fgr_prediction(cum.chi2, sigma);
  const RealSeries fgr_lo = fgr_prediction(cum.chi2, 0.5 * sigma);

  curves.header = {"t",      "corr_abs2", "allegiance_hi", "allegiance_lo", "fgr_hi",
                   "fgr_lo", "chi2",      "mean_I",        "kernel_row"};
  std::vector<double> cabs2(corr.value.size());
  for (std::size_t i = 0; i < corr.value.size(); ++i) cabs2[i] = std::norm(corr.value[i]);
  curves.columns = {corr.t,        cabs2,          a_hi.value,        a_lo.value,
                    fgr_hi.value,  fgr_lo.value,   cum.chi2.value,    cum.mean_I.value,
                    cum.kernel_row.value};

  rep.field("K_int", cum.K_int);
  rep.field("tau_I", cum.tau_I);
  rep.field("mean_I_slope", cum.D);
  rep.field("kernel_decays", cum.kernel_decays ? "true" : "false");

  // FGR agreement: sup-norm of |allegiance - prediction| over each curve's own
  // first decade (all points with allegiance >= 0.1).
  auto supnorm_first_decade = [](const RealSeries& a, const RealSeries& f) {
    double md = 0;
    for (std::size_t i = 0; i < a.value.size(); ++i)
      if (a.value[i] >= 0.1) md = std::max(md, std::abs(a.value[i] - f.value[i]));
    return md;
  };
  const double md_hi = supnorm_first_decade(a_hi, fgr_hi);
  const double md_lo = supnorm_first_decade(a_lo, fgr_lo);
  rep.field("fgr_maxdiff_sigma", md_hi);
  rep.field("fgr_maxdiff_half_sigma", md_lo);

  // sigma scaling: both log-rates fitted over one common window, the first
  // decade of the faster (full-sigma) curve, so curvature in chi2 cancels.
  double td = crossing_time(a_hi.t, a_hi.value, 0.1);
  if (td < 0) td = a_hi.t.back();
  const ExpFit fit_hi = fit_exp_rate(a_hi.t, a_hi.value, 0.0, td);
  const ExpFit fit_lo = fit_exp_rate(a_lo.t, a_lo.value, 0.0, td);
  const double ratio = fit_lo.rate > 0 ? fit_hi.rate / fit_lo.rate : -1.0;
  rep.field("rate_sigma", fit_hi.rate);
  rep.field("rate_half_sigma", fit_lo.rate);
  rep.field("rate_ratio", ratio);
  rep.field("rate_window_hi", td);
  if (cfg.get_bool("check_fgr", false)) {
    rep.flag("fgr_supnorm", md_hi <= 0.1 && md_lo <= 0.1,
             "max |allegiance - FGR| over first decades = " + format_double(md_hi) + ", " +
                 format_double(md_lo));
    rep.flag("fgr_sigma_scaling", ratio >= 3.2 && ratio <= 4.8,
             "rate(sigma)/rate(sigma/2) = " + format_double(ratio));
  }
  check_expected_rate(cfg, rep, "allegiance_rate", fit_hi.rate);
}

// --- oscillator: semiclassical vs early-time ---------------------------------

void run_osc_semiclassical(Config& cfg, RunReport& rep, CsvTable& curves) {
  OscillatorParams params = oscillator_params(cfg);
  const Complex alpha0(cfg.get_double("alpha0_re", 1.5), cfg.get_double("alpha0_im", 0.0));
  const double sigma = cfg.get_double("sigma", 20.0);
  const double T = cfg.get_double("T", 1.2);
  const auto n_mc = cfg.get_int("n_mc", 20000);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const int store = static_cast<int>(cfg.get_int("store_stride", 20));
  const double eps = sigma * params.hbar;

  const SemiclassicalResult mc = semiclassical_amplitude(alpha0, params, sigma, T, n_mc, seed, store);
  const EarlyTimeResult early = early_time_fidelity(alpha0, params, eps, params.hbar, T, store);

  curves.header = {"t", "F_mc", "F_early", "grad_alpha_abs", "dphi_dw_abs"};
  std::vector<double> Fmc(mc.f.value.size());
  for (std::size_t i = 0; i < Fmc.size(); ++i) Fmc[i] = std::norm(mc.f.value[i]);
  curves.columns = {mc.f.t, Fmc, early.F.value, early.grad_alpha_abs.value,
                    early.dphi_dw_abs.value};

  rep.field("mc_max_stderr", mc.max_stderr);
  rep.field("fd_step_halving_disagreement", early.fd_disagreement);
  double maxrel = 0;
  for (std::size_t i = 0; i < Fmc.size(); ++i)
    if (Fmc[i] > 0.5 && early.F.value[i] > 0.5)
      maxrel = std::max(maxrel, std::abs(Fmc[i] - early.F.value[i]) / early.F.value[i]);
  rep.field("earlytime_mc_maxrel_above_0.5", maxrel);
  rep.flag("earlytime_vs_mc", maxrel <= 0.10,
           "max relative difference while F>0.5: " + format_double(maxrel));

  // local instability: log-growth rate of |dphi/dalpha| over the window
  std::vector<double> ts2, lg;
  for (std::size_t i = 0; i < early.grad_alpha_abs.t.size(); ++i)
    if (early.grad_alpha_abs.value[i] > 1e-8 && early.grad_alpha_abs.t[i] > 0.1) {
      ts2.push_back(early.grad_alpha_abs.t[i]);
      lg.push_back(std::log(early.grad_alpha_abs.value[i]));
    }
  if (ts2.size() >= 4) {
    const LinearFit lf = linear_fit(ts2, lg);
    rep.field("derivative_growth_rate", lf.slope);
    rep.flag("local_instability", lf.slope > 0,
             "derivative growth rate " + format_double(lf.slope));
  } else {
    rep.flag("local_instability", false, "insufficient points for growth fit");
  }
}

// --- oscillator: strong-perturbation allegiance ------------------------------

void run_osc_allegiance(Config& cfg, RunReport& rep, CsvTable& curves) {
  OscillatorParams params = oscillator_params(cfg);
  PDensitySpec P = p_density_spec(cfg, "p_", PKind::gaussian_ring, 2.0, 0.05, 100000);
  const double T = cfg.get_double("T", 12.0);
  const int store = static_cast<int>(cfg.get_int("store_stride", 50));
  const double s1 = cfg.get_double("sigma1", 1.0);
  const double s2 = cfg.get_double("sigma2", 2.0);

  const RealSeries a1 = allegiance_classical(P, params, s1, T, store);
  const RealSeries a2 = allegiance_classical(P, params, s2, T, store);
  const ComplexSeries c1 = phase_correlation(P, params, 1.0, T, store);
  std::vector<double> c1abs2(c1.value.size());
  for (std::size_t i = 0; i < c1.value.size(); ++i) c1abs2[i] = std::norm(c1.value[i]);

  curves.header = {"t", "allegiance_sigma1", "allegiance_sigma2", "corr_c1_abs2"};
  curves.columns = {a1.t, a1.value, a2.value, c1abs2};

  // Fit all three on the window where the c=1 correlator falls 0.2 -> 1e-3;
  // the asymptotic decay there is set by the chaotic decorrelation rate.
  const double tA = crossing_time(c1.t, c1abs2, cfg.get_double("fit_level_lo", 0.2));
  double tB = crossing_time(c1.t, c1abs2, cfg.get_double("fit_level_hi", 1e-3));
  if (tB < 0) tB = c1.t.back();
  if (tA < 0 || tB <= tA) throw std::runtime_error("osc_allegiance: no usable fit window");
  const ExpFit f1 = fit_exp_rate(a1.t, a1.value, tA, tB);
  const ExpFit f2 = fit_exp_rate(a2.t, a2.value, tA, tB);
  const ExpFit fc = fit_exp_rate(c1.t, c1abs2, tA, tB);
  rep.field("rate_sigma1", f1.rate);
  rep.field("rate_sigma2", f2.rate);
  rep.field("rate_corr_c1", fc.rate);
  rep.field("fit_window_lo", tA);
  rep.field("fit_window_hi", tB);
  const double r12 = f1.rate / f2.rate;
  const double r1c = f1.rate / fc.rate;
  const double r2c = f2.rate / fc.rate;
  rep.flag("sigma_independence", r12 > 0.8 && r12 < 1.25,
           "rate(sigma1)/rate(sigma2) = " + format_double(r12));
  rep.flag("matches_inverse_tau_c",
           r1c > 0.8 && r1c < 1.25 && r2c > 0.8 && r2c < 1.25,
           "rates/corr-rate = " + format_double(r1c) + ", " + format_double(r2c));
}

// --- Glauber round trip ------------------------------------------------------

void run_glauber_roundtrip(Config& cfg, RunReport& rep, CsvTable& curves) {
  const double hbar = cfg.get_double("hbar", 0.01);
  const double width = cfg.get_double("p_width", 0.1);
  const int n_max = static_cast<int>(cfg.get_int("n_max", 200));
  PDensitySpec P;
  P.kind = PKind::exponential;
  P.width = width;
  const FockWeights rho = p_to_fock(P, hbar, n_max);
  // analytic: geometric weights
  std::vector<double> analytic(n_max + 1);
  const double q = width / (width + hbar);
  for (int n = 0; n <= n_max; ++n) analytic[n] = (1.0 - q) * std::pow(q, n);
  double max_w_diff = 0;
  for (int n = 0; n <= n_max; ++n) max_w_diff = std::max(max_w_diff, std::abs(rho.rho[n] - analytic[n]));
  rep.field("fock_weight_maxdiff", max_w_diff);

  const int n_I = static_cast<int>(cfg.get_int("n_I", 200));
  const double I_max = cfg.get_double("I_max", 8.0 * width);
  std::vector<double> I_grid(n_I);
  for (int i = 0; i < n_I; ++i) I_grid[i] = I_max * (i + 0.5) / n_I;
  const std::vector<double> P_back = fock_to_p(rho, hbar, I_grid);
  double max_p_diff = 0;
  std::vector<double> P_in(n_I);
  for (int i = 0; i < n_I; ++i) {
    P_in[i] = p_density(P, I_grid[i]);
    max_p_diff = std::max(max_p_diff, std::abs(P_back[i] - P_in[i]));
  }
  rep.field("roundtrip_maxdiff", max_p_diff);
  rep.flag("glauber_roundtrip", max_w_diff < 1e-4 && max_p_diff < 1e-4,
           "weight maxdiff " + format_double(max_w_diff) + ", density maxdiff " +
               format_double(max_p_diff));

  curves.header = {"I", "P_in", "P_back"};
  curves.columns = {I_grid, P_in, P_back};
}

// --- driver ------------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  Config cfg = Config::from_file(config_path);
  for (const auto& kv : overrides) cfg.set_from_override(kv);

  const std::string kind = cfg.require_string("experiment");
  const std::string outdir = cfg.get_string("output_dir", "out");
  std::filesystem::create_directories(outdir);

  RunReport rep;
  CsvTable curves;
  const auto t0 = std::chrono::steady_clock::now();
  if (kind == "kr_echo") run_kr_echo(cfg, rep, curves);
  else if (kind == "kr_classical") run_kr_classical(cfg, rep, curves);
  else if (kind == "osc_classical") run_osc_classical(cfg, rep, curves);
  else if (kind == "osc_semiclassical") run_osc_semiclassical(cfg, rep, curves);
  else if (kind == "osc_allegiance") run_osc_allegiance(cfg, rep, curves);
  else if (kind == "glauber_roundtrip") run_glauber_roundtrip(cfg, rep, curves);
  else throw std::runtime_error("config: unknown experiment '" + kind + "'");
  const bool make_plot = cfg.get_bool("plot", true);
  cfg.reject_unknown();
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_csv(outdir + "/curves.csv", curves);
  {
    std::ofstream mf(outdir + "/manifest.txt", std::ios::binary);
    mf << "# " << kVersion << "\n" << cfg.manifest();
  }
  std::ostringstream report;
  report << "experiment = " << kind << "\n";
  for (const auto& [k, v] : rep.fields) report << k << " = " << v << "\n";
  report << "wall_seconds = " << format_double(rep.wall_seconds) << "\n";
  for (const auto& f : rep.flags)
    report << "flag " << f.name << " = " << (f.pass ? "PASS" : "FAIL") << "  (" << f.detail
           << ")\n";
  report << "overall = " << (rep.all_pass() ? "PASS" : "FAIL") << "\n";
  {
    std::ofstream rf(outdir + "/report.txt", std::ios::binary);
    rf << report.str();
  }
  std::cout << report.str();
  if (make_plot && curves.n_rows() >= 2 && curves.columns.size() >= 2) {
    // CSV is written (and its bytes fixed) before any plotting happens.
    PlotOptions opt;
    if (kind == "kr_echo" || kind == "kr_classical") opt.reference_rates = {1.61, 1.1};
    opt.title = kind;
    std::ofstream pf(outdir + "/plot.svg", std::ios::binary);
    pf << svg_plot_logy(curves, opt);
  }
  return rep.all_pass() ? 0 : 1;
}

int cmd_fit(const std::string& csv_path, const std::string& col, const std::string& window) {
  double t1 = 0, t2 = 0;
  if (std::sscanf(window.c_str(), "%lf:%lf", &t1, &t2) != 2)
    throw std::runtime_error("fit: window must be t1:t2");
  const CsvTable table = read_csv(csv_path);
  const auto& t = table.columns[0];
  const ExpFit fit = fit_exp_rate(t, table.col(col), t1, t2);
  std::cout << "column = " << col << "\n"
            << "window = " << format_double(t1) << ":" << format_double(t2) << "\n"
            << "rate = " << format_double(fit.rate) << "\n"
            << "stderr = " << format_double(fit.stderr) << "\n"
            << "r2 = " << format_double(fit.r2) << "\n"
            << "log_resid_rms = " << format_double(fit.log_resid_rms) << "\n"
            << "n_points = " << fit.n_points << "\n";
  return 0;
}

int cmd_plot(const std::string& csv_path) {
  const CsvTable table = read_csv(csv_path);
  PlotOptions opt;
  opt.title = std::filesystem::path(csv_path).stem().string();
  const std::string out = std::filesystem::path(csv_path).replace_extension(".svg").string();
  std::ofstream pf(out, std::ios::binary);
  pf << svg_plot_logy(table, opt);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echo-lab: echo-decay experiments for chaotic quantum and classical models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  run->add_option("config", config_path, "flat key=value config file")->required();
  run->add_option("--set", overrides, "override a config key (key=value)");

  auto* fit = app.add_subcommand("fit", "fit an exponential rate to a CSV column");
  std::string csv_path, col, window;
  fit->add_option("csv", csv_path, "input CSV")->required();
  fit->add_option("--col", col, "column name")->required();
  fit->add_option("--window", window, "fit window t1:t2")->required();

  auto* plot = app.add_subcommand("plot", "render a log-y SVG plot of a CSV");
  std::string plot_csv;
  plot->add_option("csv", plot_csv, "input CSV")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (fit->parsed()) return cmd_fit(csv_path, col, window);
    if (plot->parsed()) return cmd_plot(plot_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
