#include "chiral/lab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "chiral/chain/evolve.hpp"
#include "chiral/chain/observables.hpp"
#include "chiral/chain/operators.hpp"
#include "chiral/chain/scans.hpp"
#include "chiral/chain/spectrum.hpp"
#include "chiral/lab/estimates.hpp"
#include "chiral/lab/presets.hpp"
#include "chiral/reservoir.hpp"
#include "chiral/trajectories.hpp"

namespace chiral::lab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();
constexpr int kMatrixDumpMaxSpins = 8;

struct Writer {
  fs::path dir;
  Metadata meta;
  std::vector<std::string> files;

  void csv(const std::string& name, const Table& t) {
    write_csv(dir / name, meta, t);
    files.push_back(name);
  }
  void matrix(const std::string& name, const MatrixXc& m) {
    write_matrix(dir / name, meta, m);
    files.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text(dir / name, body);
    files.push_back(name);
  }
};

std::string fmt(Real v) { return format_real(v); }

std::string fmt_g(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> adjacent_names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int j = 1; j < n; ++j) out.push_back(prefix + "_" + std::to_string(j) + "_" + std::to_string(j + 1));
  return out;
}

std::vector<std::string> dimer_names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int j = 1; j + 1 <= n; j += 2) out.push_back(prefix + "_" + std::to_string(j) + "_" + std::to_string(j + 1));
  return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); }
void append(std::vector<Real>& a, const std::vector<Real>& b) { a.insert(a.end(), b.begin(), b.end()); }

// purity, S_{j,j+1} (j = 1..N-1), n_j (j = 1..N)
std::vector<std::string> rho_header(int n) {
  std::vector<std::string> h = {"purity"};
  append(h, adjacent_names("S", n));
  for (int j = 1; j <= n; ++j) h.push_back("n_" + std::to_string(j));
  return h;
}

std::vector<Real> rho_row(const chain::DensityMatrix& rho, int n) {
  std::vector<Real> row = {chain::purity(rho)};
  for (int j = 0; j + 1 < n; ++j) row.push_back(chain::entropy(chain::reduced_pair(rho, j, j + 1)));
  for (int j = 0; j < n; ++j) row.push_back(chain::reduced_site(rho, j)(1, 1).real());
  return row;
}

VectorXc initial_state(const chain::ChainParams& c, const std::string& initial) {
  if (initial == "dimer") return chain::dimer_product(c).state;
  return chain::ground_state(c.n_spins);
}

reservoir::SweepOptions sweep_options(const ExperimentConfig& cfg) {
  reservoir::SweepOptions o;
  o.recenter = cfg.sweep.recenter;
  o.grid_points = cfg.grid.points;
  o.k_min = cfg.grid.k_min;
  o.k_max = cfg.grid.k_max;
  return o;
}

Table validity_table(const reservoir::ValidityReport& r) {
  Table t;
  t.header = {"group", "check", "lhs", "rhs", "ratio", "ok"};
  for (const auto& c : r.checks) t.add_text_row({c.group, c.name, fmt(c.lhs), fmt(c.rhs), fmt(c.ratio), c.ok ? "1" : "0"});
  return t;
}

void summarize_validity(const SetupReport& s, std::vector<std::string>& out) {
  const auto& r = s.report;
  for (const char* g : {"markov", "rwa", "temperature", "deep_lattice", "expansion", "quasi_bec"}) {
    if (!r.evaluated(g)) {
      out.push_back(std::string(g) + ": not evaluated");
      continue;
    }
    Real worst = 0.0;
    for (const auto& c : r.checks)
      if (c.group == g) worst = std::max(worst, c.ratio);
    out.push_back(std::string(g) + ": " + (r.group_ok(g) ? "PASS" : "FAIL") + " (worst ratio " + fmt_g(worst) +
                  ", threshold " + fmt_g(r.threshold) + ")");
  }
  out.push_back(std::string("approximations verdict: ") + (s.approximations_ok ? "PASS" : "FAIL"));
  for (const auto& n : s.notes) out.push_back("note: " + n);
}

// ---- reservoir modes ----

void mode_spectrum(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  using namespace reservoir;
  const auto pw = solve_plane_wave(cfg.reservoir);
  const auto sp = bdg_modes(cfg.reservoir, pw, default_k_grid(cfg.grid.points, cfg.grid.k_min, cfg.grid.k_max));
  Table t;
  t.header = {"k", "omega_minus", "omega_plus", "q_up_minus", "q_down_minus", "q_up_plus", "q_down_plus",
              "norm_minus", "norm_plus"};
  for (std::size_t i = 0; i < sp.k.size(); ++i) {
    const auto& lo = sp.lower[i];
    const auto& up = sp.upper[i];
    t.add_row({sp.k[i], lo.omega, up.omega, lo.q_up, lo.q_down, up.q_up, up.q_down,
               lo.zero_mode ? kNaN : lo.symplectic_norm(), up.symplectic_norm()});
  }
  w.csv("spectrum.csv", t);
  res.summary.push_back("q = " + fmt_g(pw.q) + ", k_m = " + fmt_g(pw.k_m) + ", mu = " + fmt_g(pw.mu));

  const Real omega = cfg.sweep.recenter ? recentered_omega(sp) : cfg.omega;
  try {
    auto ch = resonant_channels(sp, omega);
    const auto [gl, gr] = decay_rates(ch, sp, omega);
    Table c;
    c.header = {"side", "k_res", "v_group", "gamma", "eta", "q_up", "q_down"};
    for (const auto* x : {&ch.left, &ch.right})
      c.add_text_row({to_string(x->side), fmt(x->k_res), fmt(x->v_group), fmt(x->gamma), fmt(x->eta), fmt(x->q_up),
                      fmt(x->q_down)});
    w.csv("channels.csv", c);
    res.summary.push_back("omega = " + fmt_g(omega) + ": gamma_L = " + fmt_g(gl) + ", gamma_R = " + fmt_g(gr) +
                          ", gamma_L/gamma_R = " + fmt_g(gl / gr));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInChiralWindow) throw;
    res.manifest.notes.push_back(e.what());
    res.summary.push_back(std::string("no chiral channels: ") + e.what());
  }
}

Table asymmetry_table(const std::vector<reservoir::AsymmetryRow>& rows) {
  Table t;
  t.header = {"omega0", "omega", "gamma_l", "gamma_r", "ratio", "polarization", "q", "k_l", "k_r", "v_l", "v_r", "ok"};
  for (const auto& r : rows) {
    if (r.ok())
      t.add_row({r.omega0, r.omega, r.gamma_l, r.gamma_r, r.ratio, r.polarization, r.q, r.k_l, r.k_r, r.v_l, r.v_r, 1});
    else
      t.add_row({r.omega0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, 0});
  }
  return t;
}

std::vector<reservoir::AsymmetryRow> checked_sweep(const reservoir::ReservoirParams& p, Real omega,
                                                   const std::vector<Real>& grid, const reservoir::SweepOptions& o,
                                                   RunResult& res) {
  auto rows = reservoir::asymmetry_sweep(p, omega, grid, o);
  int failed = 0;
  for (const auto& r : rows)
    if (!r.ok()) {
      if (!failed) res.manifest.notes.push_back("omega0 = " + fmt_g(r.omega0) + ": " + r.error);
      ++failed;
    }
  if (failed == static_cast<int>(rows.size()))
    throw Error(ErrorCode::RuntimeFailure, "every sweep point failed; first: " + rows.front().error);
  if (failed) res.manifest.notes.push_back(std::to_string(failed) + " sweep points failed");
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
  for (const auto& r : rows)
    if (r.ok()) lo = std::min(lo, r.ratio), hi = std::max(hi, r.ratio);
  res.summary.push_back("gamma_L/gamma_R in [" + fmt_g(lo) + ", " + fmt_g(hi) + "] over " +
                        std::to_string(rows.size() - failed) + " points");
  return rows;
}

void mode_rates_sweep(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto rows = checked_sweep(cfg.reservoir, cfg.omega, linspace(cfg.sweep.from, cfg.sweep.to, cfg.sweep.steps),
                                  sweep_options(cfg), res);
  w.csv("rates.csv", asymmetry_table(rows));
}

// ---- chain modes ----

void mode_evolve(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto& c = cfg.chain;
  const auto l = chain::build_liouvillian(c);
  chain::EvolveOptions eo;
  eo.rtol = cfg.evolve.rtol;
  eo.atol = cfg.evolve.atol;
  Table t;
  t.header = {"t"};
  append(t.header, rho_header(c.n_spins));
  const auto grid = linspace(0.0, cfg.evolve.t_final, cfg.evolve.points);
  const auto stats = chain::evolve(
      l, chain::pure_density(initial_state(c, cfg.evolve.initial)), grid,
      [&](Real time, const chain::DensityMatrix& rho) {
        std::vector<Real> row = {time};
        append(row, rho_row(rho, c.n_spins));
        t.add_row(row);
      },
      eo);
  w.csv("evolve.csv", t);
  res.summary.push_back("final purity " + t.rows.back()[1] + " after " + std::to_string(stats.steps) + " steps");
}

void mode_steady(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto& c = cfg.chain;
  const auto ss = chain::steady_state(chain::build_liouvillian(c));
  const auto obs = chain::pair_observables(ss.rho);
  Real fid = kNaN;
  if (c.n_spins % 2 == 0 && c.delta_gamma() != 0.0) fid = chain::fidelity(ss.rho, chain::dimer_product(c).state);
  Table t;
  t.header = {"nullspace_dim", "fidelity", "purity", "residual"};
  append(t.header, dimer_names("P", c.n_spins));
  append(t.header, adjacent_names("S", c.n_spins));
  std::vector<Real> row = {static_cast<Real>(ss.nullspace_dim), fid, obs.purity, ss.residual};
  append(row, obs.purities);
  for (int j = 0; j + 1 < c.n_spins; ++j) row.push_back(chain::entropy(chain::reduced_pair(ss.rho, j, j + 1)));
  t.add_row(row);
  w.meta.emplace_back("method", ss.method);
  w.csv("steady.csv", t);
  if (c.n_spins <= kMatrixDumpMaxSpins) {
    w.matrix("rho.csv", ss.rho);
  } else {
    res.manifest.notes.push_back("density matrix not dumped above N = " + std::to_string(kMatrixDumpMaxSpins));
  }
  res.summary.push_back("nullspace_dim = " + std::to_string(ss.nullspace_dim) + ", purity = " + fmt_g(obs.purity) +
                        ", fidelity = " + fmt_g(fid) + " (" + ss.method + ")");
}

void mode_gap_scan(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto axis = cfg.scan.axis == "rabi" ? chain::GapAxis::Rabi : chain::GapAxis::GammaRatio;
  const auto rows = chain::gap_scan(cfg.chain, axis, cfg.scan.values);
  Table t;
  t.header = {cfg.scan.axis, "lambda1_re", "lambda1_im", "t_ss", "nullspace_dim", "ok"};
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      if (!failed++) res.manifest.notes.push_back(fmt_g(r.value) + ": " + r.error);
      t.add_row({r.value, kNaN, kNaN, kNaN, kNaN, 0});
      continue;
    }
    t.add_row({r.value, r.lambda1.real(), r.lambda1.imag(), r.t_ss, static_cast<Real>(r.nullspace_dim), 1});
  }
  if (failed == static_cast<int>(rows.size())) throw Error(ErrorCode::RuntimeFailure, rows.front().error);
  w.csv("gap.csv", t);
  res.summary.push_back(std::to_string(rows.size() - failed) + " gap points computed");
}

void mode_imperfection_scan(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto kind = cfg.scan.axis == "epsilon"     ? chain::Imperfection::Epsilon
                    : cfg.scan.axis == "gamma_prime" ? chain::Imperfection::GammaPrime
                                                     : chain::Imperfection::Detuning;
  const auto rows = chain::imperfection_scan(cfg.chain, kind, cfg.scan.values);
  const int n = cfg.chain.n_spins;
  Table t;
  t.header = {cfg.scan.axis, "purity", "nullspace_dim"};
  append(t.header, dimer_names("P", n));
  append(t.header, dimer_names("S", n));
  int failed = 0;
  for (const auto& r : rows) {
    std::vector<Real> row = {r.value};
    if (!r.error.empty()) {
      if (!failed++) res.manifest.notes.push_back(fmt_g(r.value) + ": " + r.error);
      row.resize(t.header.size(), kNaN);
    } else {
      row.push_back(r.purity);
      row.push_back(r.nullspace_dim);
      append(row, r.pair_purities);
      append(row, r.pair_entropies);
    }
    t.add_row(row);
  }
  if (failed == static_cast<int>(rows.size())) throw Error(ErrorCode::RuntimeFailure, rows.front().error);
  w.csv("imperfections.csv", t);
  res.summary.push_back(std::to_string(rows.size() - failed) + " steady states computed");
}

trajectories::TrajectoryEnsemble trajectory_ensemble(const chain::ChainParams& c, const VectorXc& psi0,
                                                     std::uint64_t seed, int n_traj, Real t_final, int points,
                                                     Real dt_max, bool global_purity, bool observables) {
  const auto gen = trajectories::unravel(c);
  trajectories::TrajectoryConfig tc;
  tc.seed = seed;
  tc.n_traj = n_traj;
  tc.t_final = t_final;
  tc.t_grid = linspace(0.0, t_final, points);
  tc.dt_max = dt_max;
  tc.pair_marginals = true;
  tc.global_purity = global_purity;
  if (observables) {
    tc.observables = trajectories::site_populations(c.n_spins);
    if (c.n_spins % 2 == 0 && c.delta_gamma() != 0.0)
      for (auto& o : trajectories::dimer_populations(c.n_spins, chain::dimer_product(c).alpha))
        tc.observables.push_back(std::move(o));
  }
  return trajectories::ensemble_average(gen, psi0, tc);
}

void mode_trajectories(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  const auto& c = cfg.chain;
  const auto e = trajectory_ensemble(c, initial_state(c, cfg.evolve.initial), cfg.run.seed, cfg.trajectories.n_traj,
                                     cfg.evolve.t_final, cfg.evolve.points, cfg.trajectories.dt_max,
                                     cfg.trajectories.global_purity, true);
  const MatrixXr s = e.pair_entropies();
  Table t;
  t.header = {"t"};
  for (const auto& name : e.names) {
    t.header.push_back(name);
    t.header.push_back(name + "_stderr");
  }
  append(t.header, adjacent_names("S", c.n_spins));
  if (e.purity.size()) t.header.push_back("purity");
  for (std::size_t i = 0; i < e.t.size(); ++i) {
    std::vector<Real> row = {e.t[i]};
    for (Index k = 0; k < e.mean.cols(); ++k) {
      row.push_back(e.mean(static_cast<Index>(i), k));
      row.push_back(e.stderr_(static_cast<Index>(i), k));
    }
    for (Index j = 0; j < s.cols(); ++j) row.push_back(s(static_cast<Index>(i), j));
    if (e.purity.size()) row.push_back(e.purity(static_cast<Index>(i)));
    t.add_row(row);
  }
  w.csv("trajectories.csv", t);

  Table j;
  j.header = {"t_start", "t_end"};
  append(j.header, e.channel_names);
  for (Index k = 0; k < e.jump_histogram.cols(); ++k) {
    std::vector<Real> row = {e.t[static_cast<std::size_t>(k)], e.t[static_cast<std::size_t>(k) + 1]};
    for (Index ch = 0; ch < e.jump_histogram.rows(); ++ch) row.push_back(e.jump_histogram(ch, k));
    j.add_row(row);
  }
  w.csv("jumps.csv", j);
  res.summary.push_back(std::to_string(e.n_traj) + " trajectories, " + std::to_string(e.total_jumps) + " jumps");
}

// ---- report modes ----

void estimates_outputs(const EstimatesReport& r, Writer& w, RunResult& res) {
  Table t;
  t.header = {"quantity", "value", "unit"};
  auto add = [&](const std::string& q, Real v, const std::string& u) { t.add_text_row({q, fmt(v), u}); };
  add("k0", r.units.k0_per_um(), "1/um");
  add("rho_bar", r.params.rho_bar, "k0");
  add("g_a", r.g_a, "E0/k0");
  add("a_over_l_perp", r.coupling.ratio, "1");
  add("omega", r.omega, "E0");
  add("temperature", r.params.temperature, "E0");
  add("omega0_rates", r.params.omega0, "E0");
  add("gamma_r", r.gamma_r, "E0/hbar");
  add("gamma_l", r.gamma_l, "E0/hbar");
  add("gamma_r_over_2pi", r.gamma_r_hz, "Hz");
  add("gamma_l_over_2pi", r.gamma_l_hz, "Hz");
  add("ratio_min", r.ratio_min, "1");
  add("ratio_max", r.ratio_max, "1");
  add("gamma_r_over_2pi_min", r.gamma_r_hz_min, "Hz");
  add("gamma_r_over_2pi_max", r.gamma_r_hz_max, "Hz");
  add("omega0_max", r.input.omega0_max, "E0");
  add("gamma_sc", r.photon.gamma_sc, "1/s");
  add("tau", r.photon.tau, "s");
  add("tau_d_line", r.tau_d_line_s, "s");
  add("t_ss_30_spins", r.t_ss_s, "s");
  add("t_ss_over_tau", r.t_ss_s / r.photon.tau, "1");
  add("two_delta0_over_2pi", r.two_delta0_hz, "Hz");
  add("two_delta0_quoted", r.input.two_delta0_quoted_hz, "Hz");
  w.csv("estimates.csv", t);
  w.csv("validity.csv", validity_table(r.validity.report));

  res.summary.push_back("gamma_R/2pi = " + fmt_g(r.gamma_r_hz) + " Hz at Omega0 = " + fmt_g(r.params.omega0) +
                        " E0 (range " + fmt_g(r.gamma_r_hz_min) + " .. " + fmt_g(r.gamma_r_hz_max) + " Hz)");
  res.summary.push_back("gamma_L/gamma_R in [" + fmt_g(r.ratio_min) + ", " + fmt_g(r.ratio_max) + "]");
  res.summary.push_back("photon scattering tau = " + fmt_g(r.photon.tau) + " s (D-line constants: " +
                        fmt_g(r.tau_d_line_s) + " s)");
  res.summary.push_back("t_ss(N=30) = " + fmt_g(r.t_ss_s) + " s");
  summarize_validity(r.validity, res.summary);
  for (const auto& n : r.notes) res.manifest.notes.push_back(n);
}

void mode_validate(const ExperimentConfig& cfg, Writer& w, RunResult& res) {
  SetupOptions o;
  o.threshold = cfg.run.threshold;
  o.rate_scale = cfg.rate_scale;
  o.grid = sweep_options(cfg);
  const std::optional<LatticeSection> lat = cfg.lattice.present ? std::optional(cfg.lattice) : std::nullopt;
  const auto s = validate_setup(cfg.reservoir, cfg.omega, cfg.chain.n_spins, lat, o);
  w.csv("validity.csv", validity_table(s.report));
  summarize_validity(s, res.summary);
  for (const auto& n : s.notes) res.manifest.notes.push_back(n);
}

void finish(Writer& w, RunResult& res, Clock::time_point t0) {
  res.manifest.version = code_version();
  res.manifest.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(w.dir, res.manifest, w.files);
}

Writer make_writer(const fs::path& dir, const std::string& hash, const std::string& mode, std::uint64_t seed) {
  fs::create_directories(dir);
  Writer w;
  w.dir = dir;
  w.meta = {{"config_hash", hash}, {"mode", mode}, {"seed", std::to_string(seed)}};
  return w;
}

// ---- figures ----

std::string describe(const FigurePreset& f) {
  std::ostringstream os;
  os << "figure " << f.name << "\n";
  auto list = [&](const char* k, const std::vector<Real>& v) {
    os << k << " =";
    for (Real x : v) os << " " << fmt(x);
    os << "\n";
  };
  for (const auto& c : f.curves) {
    const auto& r = c.reservoir;
    const auto& ch = c.chain;
    os << "curve " << c.label << ": omega0 " << fmt(r.omega0) << " delta0 " << fmt(r.delta0) << " rho_bar "
       << fmt(r.rho_bar) << " g " << fmt(r.g_uu) << " " << fmt(r.g_dd) << " " << fmt(r.g_ud) << " g_a " << fmt(r.g_au)
       << " " << fmt(r.g_ad) << " mass_ratio " << fmt(r.mass_ratio) << " | N " << ch.n_spins << " rabi "
       << fmt(ch.rabi.real()) << " " << fmt(ch.rabi.imag()) << " gamma_l " << fmt(ch.gamma_l) << " gamma_r "
       << fmt(ch.gamma_r) << "\n";
  }
  os << "omega " << fmt(f.omega) << " t_final " << fmt(f.t_final) << " points " << f.points << " n_traj " << f.n_traj
     << "\n";
  list("omega0_grid", f.omega0_grid);
  list("scan_values", f.scan_values);
  list("delta_gamma_grid", f.delta_gamma_grid);
  list("rabi_grid", f.rabi_grid);
  return os.str();
}

Table entropy_table(const std::vector<Real>& t, const MatrixXr& s, const VectorXr& purity, int n) {
  Table out;
  out.header = {"t"};
  append(out.header, adjacent_names("S", n));
  out.header.push_back("purity");
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<Real> row = {t[i]};
    for (Index j = 0; j < s.cols(); ++j) row.push_back(s(static_cast<Index>(i), j));
    row.push_back(purity.size() ? purity(static_cast<Index>(i)) : kNaN);
    out.add_row(row);
  }
  return out;
}

void figure_rates(const FigurePreset& f, Writer& w, RunResult& res) {
  for (std::size_t i = 0; i < f.curves.size(); ++i) {
    const auto rows = checked_sweep(f.curves[i].reservoir, f.omega, f.omega0_grid, {}, res);
    Table t;
    t.header = {"omega0", "gamma_l_over_gamma_r"};
    Table pol;
    pol.header = {"omega0", "rho_down_over_rho_up"};
    for (const auto& r : rows) {
      t.add_row({r.omega0, r.ok() ? r.ratio : kNaN});
      pol.add_row({r.omega0, r.ok() ? r.polarization : kNaN});
    }
    w.csv(f.name + "_" + f.curves[i].label + ".csv", t);
    if (i == 0) w.csv(f.name + "_polarization.csv", pol);
  }
}

void figure_evolution(const FigurePreset& f, const FigureOptions& o, Writer& w, RunResult& res) {
  const auto& c = f.curves.front().chain;
  const Real t_final = o.t_final.value_or(f.t_final);
  if (f.kind == FigureKind::Trajectories) {
    const int n_traj = o.n_traj.value_or(f.n_traj);
    const auto e = trajectory_ensemble(c, chain::ground_state(c.n_spins), o.seed, n_traj, t_final, f.points,
                                       std::numeric_limits<Real>::infinity(), true, false);
    w.csv(f.name + ".csv", entropy_table(e.t, e.pair_entropies(), e.purity, c.n_spins));
    res.summary.push_back(std::to_string(n_traj) + " trajectories, " + std::to_string(e.total_jumps) + " jumps");
    return;
  }
  const auto l = chain::build_liouvillian(c);
  const auto grid = linspace(0.0, t_final, f.points);
  MatrixXr s(f.points, c.n_spins - 1);
  VectorXr purity(f.points);
  Index i = 0;
  chain::evolve(l, chain::pure_density(chain::ground_state(c.n_spins)), grid,
                [&](Real, const chain::DensityMatrix& rho) {
                  for (int j = 0; j + 1 < c.n_spins; ++j) s(i, j) = chain::entropy(chain::reduced_pair(rho, j, j + 1));
                  purity(i++) = chain::purity(rho);
                });
  w.csv(f.name + ".csv", entropy_table(grid, s, purity, c.n_spins));
  res.summary.push_back("density-matrix evolution to t = " + fmt_g(t_final));
}

void figure_imperfections(const FigurePreset& f, Writer& w, RunResult& res) {
  for (const auto& curve : f.curves) {
    const auto rows = chain::imperfection_scan(curve.chain, f.axis, f.scan_values);
    Table t;
    t.header = {f.axis == chain::Imperfection::Epsilon ? "epsilon" : "gamma_prime"};
    append(t.header, dimer_names("P", curve.chain.n_spins));
    t.header.push_back("purity");
    for (const auto& r : rows) {
      std::vector<Real> row = {r.value};
      if (r.error.empty()) {
        append(row, r.pair_purities);
        row.push_back(r.purity);
      } else {
        res.manifest.notes.push_back(curve.label + " at " + fmt_g(r.value) + ": " + r.error);
        row.resize(t.header.size(), kNaN);
      }
      t.add_row(row);
    }
    w.csv(f.name + "_" + curve.label + ".csv", t);
  }
}

void figure_gap(const FigurePreset& f, Writer& w, RunResult& res) {
  auto write = [&](const std::string& name, const std::string& axis, const std::vector<Real>& x,
                   const std::vector<chain::GapRow>& rows) {
    Table t;
    t.header = {axis, "inv_t_ss", "t_ss"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].error.empty()) res.manifest.notes.push_back(name + " at " + fmt_g(x[i]) + ": " + rows[i].error);
      const Real tss = rows[i].error.empty() ? rows[i].t_ss : kNaN;
      t.add_row({x[i], 1.0 / tss, tss});
    }
    w.csv(name, t);
  };
  for (int n : f.gap_sizes) {
    chain::ChainParams base;
    base.n_spins = n;
    base.gamma_r = 1.0;
    for (Real rabi : f.gap_rabis) {
      base.rabi = Complex(rabi, 0.0);
      std::vector<Real> ratios;
      for (Real dg : f.delta_gamma_grid) ratios.push_back(1.0 - dg);
      write("gap_scaling_a_N" + std::to_string(n) + "_rabi" + fmt(rabi) + ".csv", "delta_gamma", f.delta_gamma_grid,
            chain::gap_scan(base, chain::GapAxis::GammaRatio, ratios));
    }
    for (Real dg : f.gap_delta_gammas) {
      base.gamma_l = 1.0 - dg;
      write("gap_scaling_b_N" + std::to_string(n) + "_dg" + fmt(dg) + ".csv", "rabi", f.rabi_grid,
            chain::gap_scan(base, chain::GapAxis::Rabi, f.rabi_grid));
    }
    base.gamma_l = 0.0;
  }
}

// Canonical "section.key = value" lines regrouped as INI sections.
std::string canonical_ini(const std::string& canonical) {
  std::istringstream in(canonical);
  std::ostringstream out;
  std::string line, current;
  while (std::getline(in, line)) {
    const auto dot = line.find('.');
    if (dot == std::string::npos) continue;
    const std::string section = line.substr(0, dot);
    if (section != current) {
      out << (current.empty() ? "" : "\n") << "[" << section << "]\n";
      current = section;
    }
    out << line.substr(dot + 1) << "\n";
  }
  return out.str();
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const std::optional<fs::path>& out_dir) {
  const auto t0 = Clock::now();
  RunResult res;
  res.dir = out_dir.value_or(fs::path(cfg.run.output));
  const std::string mode = to_string(cfg.run.mode);
  res.manifest.mode = mode;
  res.manifest.seed = cfg.run.seed;
  res.manifest.config_hash = sha256_hex(cfg.canonical);
  Writer w = make_writer(res.dir, res.manifest.config_hash, mode, cfg.run.seed);
  w.text("config.ini", canonical_ini(cfg.canonical));
  try {
    switch (cfg.run.mode) {
      case Mode::Spectrum: mode_spectrum(cfg, w, res); break;
      case Mode::RatesSweep: mode_rates_sweep(cfg, w, res); break;
      case Mode::Evolve: mode_evolve(cfg, w, res); break;
      case Mode::Steady: mode_steady(cfg, w, res); break;
      case Mode::GapScan: mode_gap_scan(cfg, w, res); break;
      case Mode::ImperfectionScan: mode_imperfection_scan(cfg, w, res); break;
      case Mode::Trajectories: mode_trajectories(cfg, w, res); break;
      case Mode::Estimates: {
        RbYbPreset p;
        p.e0_hz = cfg.units.e0_hz;
        p.mass_b_amu = cfg.units.mass_b_amu;
        estimates_outputs(estimates(p, cfg.run.threshold), w, res);
        break;
      }
      case Mode::Validate: mode_validate(cfg, w, res); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::RuntimeFailure) throw;
    throw Error(ErrorCode::RuntimeFailure, "mode " + mode + ": " + e.what());
  }
  finish(w, res, t0);
  return res;
}

RunResult run_file(const std::string& path, const std::map<std::string, std::string>& overrides,
                   const std::optional<fs::path>& out_dir) {
  return run(load_config(path, overrides), out_dir);
}

RunResult reproduce_figure(const std::string& name, const fs::path& out_dir, const FigureOptions& options) {
  const auto t0 = Clock::now();
  const FigurePreset f = figure_preset(name);
  RunResult res;
  res.dir = out_dir;
  res.manifest.mode = "figure " + name;
  res.manifest.seed = options.seed;
  std::string desc = describe(f);
  if (options.n_traj) desc += "n_traj override " + std::to_string(*options.n_traj) + "\n";
  if (options.t_final) desc += "t_final override " + fmt(*options.t_final) + "\n";
  res.manifest.config_hash = sha256_hex(desc);
  Writer w = make_writer(out_dir, res.manifest.config_hash, "figure " + name, options.seed);
  w.meta.emplace_back("figure", f.title);
  try {
    switch (f.kind) {
      case FigureKind::RatesSweep: figure_rates(f, w, res); break;
      case FigureKind::Trajectories:
      case FigureKind::DensityEvolve: figure_evolution(f, options, w, res); break;
      case FigureKind::ImperfectionScan: figure_imperfections(f, w, res); break;
      case FigureKind::GapScaling: figure_gap(f, w, res); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RuntimeFailure) throw;
    throw Error(ErrorCode::RuntimeFailure, "figure " + name + ": " + e.what());
  }
  finish(w, res, t0);
  return res;
}

RunResult run_estimates(const fs::path& out_dir, Real threshold) {
  const auto t0 = Clock::now();
  RunResult res;
  res.dir = out_dir;
  res.manifest.mode = "estimates";
  res.manifest.config_hash = sha256_hex("estimates threshold " + fmt(threshold));
  Writer w = make_writer(out_dir, res.manifest.config_hash, "estimates", 0);
  try {
    estimates_outputs(estimates({}, threshold), w, res);
  } catch (const Error& e) {
    throw Error(ErrorCode::RuntimeFailure, std::string("estimates: ") + e.what());
  }
  finish(w, res, t0);
  return res;
}

RunResult sweep(const std::string& path, const std::string& key, Real from, Real to, int steps,
                const std::optional<fs::path>& out_dir) {
  const auto t0 = Clock::now();
  if (steps < 1) throw Error(ErrorCode::ConfigError, "sweep needs --steps >= 1");
  const auto values = linspace(from, to, steps);
  // Parse once up front so a bad key fails before any work is done.
  const auto first = load_config(path, {{key, fmt(values.front())}});
  RunResult res;
  res.dir = out_dir.value_or(fs::path(first.run.output));
  res.manifest.mode = "sweep " + key;
  res.manifest.seed = first.run.seed;
  res.manifest.config_hash = sha256_hex(load_config(path).canonical + "sweep " + key + " " + fmt(from) + " " +
                                        fmt(to) + " " + std::to_string(steps));
  Writer w = make_writer(res.dir, res.manifest.config_hash, "sweep", first.run.seed);
  Table t;
  t.header = {"step", key, "status", "directory"};
  int failed = 0;
  for (int i = 0; i < steps; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%03d", i);
    try {
      const auto r = run(load_config(path, {{key, fmt(values[i])}}), res.dir / name);
      for (const auto& o : r.manifest.outputs) w.files.push_back(std::string(name) + "/" + o.file);
      t.add_text_row({std::to_string(i), fmt(values[i]), "ok", name});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      ++failed;
      res.manifest.notes.push_back(std::string(name) + ": " + e.what());
      t.add_text_row({std::to_string(i), fmt(values[i]), "failed", name});
    }
  }
  w.csv("sweep.csv", t);
  res.summary.push_back(std::to_string(steps - failed) + "/" + std::to_string(steps) + " sweep steps succeeded");
  finish(w, res, t0);
  if (failed) throw Error(ErrorCode::RuntimeFailure, std::to_string(failed) + " sweep steps failed; see " +
                                                           (res.dir / "manifest.json").string());
  return res;
}

}  // namespace chiral::lab
