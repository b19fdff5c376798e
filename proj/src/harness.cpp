#include "asqchain/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>

#include "asqchain/coupling.hpp"
#include "asqchain/dynamics.hpp"
#include "asqchain/tuneup.hpp"

namespace asq {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string spin_label(const SpinConfiguration& s) {
  std::string t;
  for (int v : s) t += v > 0 ? 'u' : 'd';
  return t;
}

// Least-squares slope of log(y) against log(x), skipping non-positive points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) continue;
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summary_json(const ClassSummary& c) {
  return {{"count", c.count}, {"median_abs_j_ghz", c.median}, {"max_abs_j_ghz", c.max}};
}

std::vector<double> zero_crossings(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> z;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    if (y[k] == 0.0) {
      z.push_back(x[k]);
      continue;
    }
    if ((y[k] < 0.0) != (y[k + 1] < 0.0) && y[k + 1] != 0.0)
      z.push_back(x[k] + (x[k + 1] - x[k]) * y[k] / (y[k] - y[k + 1]));
  }
  if (!y.empty() && y.back() == 0.0) z.push_back(x.back());
  return z;
}

// ---------------------------------------------------------------- commands

RunResult run_couplings(const ScenarioSpec& s) {
  RunResult r;
  const ChainConfig cfg = resolved_chain(s);
  const auto report = coupling_report(cfg, true);
  const int n = static_cast<int>(cfg.size());
  Table t{"couplings", "GHz (E/h); qubit indices 1-based", {"term", "i", "j", "k", "value_GHz"}, {}};
  for (int i = 0; i < n; ++i) t.rows.push_back({std::string("E"), (long long)i + 1, std::string(), std::string(), report.energies[i]});
  double jmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      t.rows.push_back({std::string("J"), (long long)i + 1, (long long)j + 1, std::string(), report.pair(i, j)});
      jmax = std::max(jmax, std::abs(report.pair(i, j)));
    }
  for (const auto& tr : report.triples)
    t.rows.push_back({std::string("J3"), (long long)tr.i + 1, (long long)tr.j + 1, (long long)tr.k + 1, tr.value});
  r.tables.push_back(std::move(t));
  const auto et = effective_total_ej(cfg);
  r.summary = {{"n_qubits", n},
               {"order", to_string(report.order)},
               {"fluxes_phi0", cfg.fluxes()},
               {"e_tilde_abs_ghz", et.magnitude},
               {"e_tilde_phase_rad", et.phase_offset},
               {"energies_ghz", report.energies},
               {"max_abs_pair_ghz", jmax},
               {"triples", report.triples.size()}};

  if (s.sweep) {
    const int q = s.sweep->qubit - 1, p = s.sweep->partner - 1;
    const std::string series = "J_" + std::to_string(q + 1) + "_" + std::to_string(p + 1);
    Table c{"curve", "sweep_var = phase drop across the swept qubit (rad); value = J (GHz)", {"sweep_var", "series", "value"}, {}};
    std::vector<double> xs, ys;
    for (double phi : s.sweep->values()) {
      std::vector<double> theta(n, 0.0);
      theta[q] = phi;
      const double j = pairwise_coupling(cfg.with_fluxes(fluxes_from_phases(theta)), q, p);
      c.rows.push_back({phi, series, j});
      xs.push_back(phi);
      ys.push_back(j);
    }
    const auto mx = std::max_element(ys.begin(), ys.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    r.summary["curve"] = {{"series", series},
                          {"max_abs_j_ghz", std::abs(*mx)},
                          {"phase_at_max_rad", xs[mx - ys.begin()]},
                          {"zero_crossings_rad", zero_crossings(xs, ys)}};
    r.tables.push_back(std::move(c));
  }
  return r;
}

RunResult run_supercurrent(const ScenarioSpec& s) {
  RunResult r;
  const int q = s.sweep->qubit - 1;
  const AsqParams& a = s.chain->asq(q);
  Table c{"curve", "sweep_var = phase drop (rad); value = supercurrent (A)", {"sweep_var", "series", "value"}, {}};
  std::vector<double> xs, diff;
  double imax = 0.0;
  for (double phi : s.sweep->values()) {
    const Mat2 op = current_operator(a, phi);
    const double up = op(0, 0).real(), down = op(1, 1).real();
    c.rows.push_back({phi, std::string("up"), up});
    c.rows.push_back({phi, std::string("down"), down});
    c.rows.push_back({phi, std::string("spin_difference"), up - down});
    xs.push_back(phi);
    diff.push_back(up - down);
    imax = std::max(imax, std::abs(up - down));
  }
  r.tables.push_back(std::move(c));
  r.summary = {{"qubit", q + 1},
               {"max_abs_spin_difference_a", imax},
               {"spin_difference_zeros_rad", zero_crossings(xs, diff)},
               {"spin_supercurrent_at_zero_a", spin_supercurrent(a, 0.0)}};
  return r;
}

RunResult run_plan(const ScenarioSpec& s) {
  RunResult r;
  const FluxPlan p = resolve_plan(s);
  const ChainConfig cfg = s.chain->with_fluxes(p.fluxes);
  const auto th = cfg.phases();
  const auto et = effective_total_ej(cfg);
  Table t{"plan", "phase in rad (theta_i - phi_E), flux in Phi0", {"qubit", "tag", "phase_rad", "flux_phi0"}, {}};
  for (std::size_t i = 0; i < p.size(); ++i)
    t.rows.push_back({(long long)i + 1, to_string(p.targets[i].tag), wrap_phase(th[i] - et.phase_offset), p.fluxes[i]});
  r.tables.push_back(std::move(t));
  json tags = json::array();
  for (const auto& tg : p.targets) tags.push_back(to_string(tg.tag));
  r.summary = {{"mode", s.plan->mode},
               {"fluxes_phi0", p.fluxes},
               {"tags", tags},
               {"phase_offset_used_rad", p.phase_offset_used},
               {"converged", p.converged},
               {"iterations", p.iterations}};
  return r;
}

RunResult run_crosstalk(const ScenarioSpec& s) {
  RunResult r;
  const FluxPlan p = resolve_plan(s);
  const ChainConfig cfg = s.chain->with_fluxes(p.fluxes);
  const auto& x = *s.crosstalk;
  const auto st = crosstalk_monte_carlo(cfg, p, x.delta, x.samples, s.seed, x.records);
  if (x.records) {
    Table t{"samples", "J in GHz (E/h); qubit indices 1-based; flux noise uniform in [-delta, delta] Phi0",
            {"sample", "i", "j", "class", "J_GHz"}, {}};
    for (const auto& rec : st.records)
      t.rows.push_back({(long long)rec.sample, (long long)rec.i + 1, (long long)rec.j + 1, to_string(rec.cls), rec.j_ghz});
    r.tables.push_back(std::move(t));
  }
  const double on = st.on_on_summary.median;
  r.summary = {{"delta_phi0", x.delta},
               {"samples", x.samples},
               {"seed", s.seed},
               {"on_on", summary_json(st.on_on_summary)},
               {"on_off", summary_json(st.on_off_summary)},
               {"off_off", summary_json(st.off_off_summary)},
               {"median_ratio_on_off", finite_or_null(on > 0 ? st.on_off_summary.median / on : NAN)},
               {"median_ratio_off_off", finite_or_null(on > 0 ? st.off_off_summary.median / on : NAN)}};

  if (s.sweep) {
    Table t{"delta_sweep", "sweep_var = delta (Phi0); value = median |J| (GHz)", {"sweep_var", "series", "value"}, {}};
    std::vector<double> ds, m_on, m_onoff, m_offoff;
    for (double d : s.sweep->values()) {
      const auto sd = crosstalk_monte_carlo(cfg, p, d, x.samples, s.seed, false);
      t.rows.push_back({d, std::string("on_on"), sd.on_on_summary.median});
      t.rows.push_back({d, std::string("on_off"), sd.on_off_summary.median});
      t.rows.push_back({d, std::string("off_off"), sd.off_off_summary.median});
      ds.push_back(d);
      m_on.push_back(sd.on_on_summary.median);
      m_onoff.push_back(sd.on_off_summary.median);
      m_offoff.push_back(sd.off_off_summary.median);
    }
    r.tables.push_back(std::move(t));
    r.summary["slopes"] = {{"on_off", finite_or_null(loglog_slope(ds, m_onoff))},
                           {"off_off", finite_or_null(loglog_slope(ds, m_offoff))}};
  }
  return r;
}

RunResult run_readout(const ScenarioSpec& s) {
  RunResult r;
  const ChainConfig cfg = resolved_chain(s);
  const auto& ro = *s.readout;
  const int n = static_cast<int>(cfg.size());
  if (n > 10) throw ValidationError("readout state tables are limited to 10 qubits");
  DressedOptions dopt;
  dopt.circuit_states = ro.circuit_states;
  Table t{"states", "frequencies in GHz; spin_config lists qubits 1..N (u = up, d = down)",
          {"spin_config", "branch", "f_GHz"}, {}};
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
    const auto spins = spins_from_index(idx, cfg.size());
    const auto d = dressed_resonator(ro.circuit, cfg, spins, ro.resonator, dopt);
    const auto label = spin_label(spins);
    t.rows.push_back({label, std::string("resonator"), d.frequency});
    t.rows.push_back({label, std::string("circuit_01"), d.circuit_transitions.at(0)});
    t.rows.push_back({label, std::string("circuit_02"), d.circuit_transitions.at(1)});
    fmin = std::min(fmin, d.frequency);
    fmax = std::max(fmax, d.frequency);
  }
  r.tables.push_back(std::move(t));
  r.summary = {{"fluxes_phi0", cfg.fluxes()},
               {"resonator_min_ghz", fmin},
               {"resonator_max_ghz", fmax},
               {"target", ro.target},
               {"target_contrast_ghz", spin_contrast(ro.circuit, cfg, ro.resonator, ro.target - 1, dopt)}};
  try {
    const auto lad = joint_readout_ladder(cfg, ro.circuit, ro.resonator);
    Table l{"ladder", "f_GHz = dressed resonator frequency; spread over sampled configurations (GHz)",
            {"n_up", "f_GHz", "spread_GHz"}, {}};
    for (std::size_t k = 0; k < lad.frequencies.size(); ++k)
      l.rows.push_back({(long long)k, lad.frequencies[k], lad.spread[k]});
    r.tables.push_back(std::move(l));
    r.summary["ladder_ghz"] = lad.frequencies;
  } catch (const ValidationError& e) {
    r.summary["ladder_ghz"] = nullptr;
    r.summary["ladder_note"] = e.what();
  }
  return r;
}

RunResult run_dispersive(const ScenarioSpec& s) {
  RunResult r;
  const auto& ro = *s.readout;
  const ChainConfig cfg = resolved_chain(s);
  const int n = static_cast<int>(cfg.size());
  const int tq = ro.target - 1;
  Table t{"sweep", "", {"sweep_var", "spin_config", "branch", "f_GHz"}, {}};

  if (ro.circuit.kind == CircuitKind::Fluxonium) {
    t.units = "sweep_var = fluxonium loop flux (Phi0); frequencies in GHz";
    ScanOptions so;
    so.flux_start = s.sweep->start;
    so.flux_stop = s.sweep->stop;
    so.points = s.sweep->points;
    so.target = tq;
    const auto scan = avoided_crossing_scan(ro.circuit, cfg, ro.resonator, so);
    for (const auto& row : scan.rows) t.rows.push_back({row.loop_flux, row.spin_config, row.branch, row.f_ghz});
    json cr = json::array();
    for (const auto& c : scan.crossings) cr.push_back({{"loop_flux_phi0", c.loop_flux}, {"min_gap_ghz", c.min_gap}});
    r.summary = {{"circuit", "fluxonium"}, {"target", ro.target}, {"crossings", cr}};
    if (scan.setpoint)
      r.summary["setpoint"] = {{"loop_flux_phi0", scan.setpoint->loop_flux},
                               {"on_contrast_ghz", scan.setpoint->on_contrast},
                               {"off_contrast_ghz", scan.setpoint->off_contrast},
                               {"on_overlap", scan.setpoint->on_overlap},
                               {"off_overlap", scan.setpoint->off_overlap}};
    else
      r.summary["setpoint"] = nullptr;
    r.tables.push_back(std::move(t));
    return r;
  }

  t.units = "sweep_var = flux of the target loop (Phi0); frequencies in GHz";
  DressedOptions dopt;
  dopt.circuit_states = ro.circuit_states;
  dopt.strict = false;
  double best = 0.0, best_x = 0.0, min_overlap = 1.0;
  for (double x : s.sweep->values()) {
    auto fl = cfg.fluxes();
    fl[tq] = x;
    const ChainConfig c = cfg.with_fluxes(fl);
    double f[2];
    for (int k = 0; k < 2; ++k) {
      SpinConfiguration spins(n, -1);
      spins[tq] = k == 0 ? 1 : -1;
      const auto d = dressed_resonator(ro.circuit, c, spins, ro.resonator, dopt);
      const std::string lab = k == 0 ? "up" : "down";
      t.rows.push_back({x, lab, std::string("resonator"), d.frequency});
      t.rows.push_back({x, lab, std::string("circuit_01"), d.circuit_transitions.at(0)});
      f[k] = d.frequency;
      min_overlap = std::min(min_overlap, d.overlap);
    }
    if (std::abs(f[0] - f[1]) > best) {
      best = std::abs(f[0] - f[1]);
      best_x = x;
    }
  }
  r.tables.push_back(std::move(t));
  DressedOptions strict;
  strict.circuit_states = ro.circuit_states;
  const ChainConfig on_cfg = cfg.with_fluxes(plan_readout(tq, ReadoutMode::OnTarget, n, cfg).fluxes);
  const ChainConfig off_cfg = cfg.with_fluxes(plan_readout(tq, ReadoutMode::OffTarget, n, cfg).fluxes);
  r.summary = {{"circuit", "transmon"},
               {"target", ro.target},
               {"max_abs_contrast_ghz", best},
               {"max_abs_contrast_mhz", best * 1e3},
               {"flux_at_max_phi0", best_x},
               {"min_branch_overlap", min_overlap},
               {"on_setpoint_contrast_ghz", spin_contrast(ro.circuit, on_cfg, ro.resonator, tq, strict)},
               {"off_setpoint_contrast_ghz", spin_contrast(ro.circuit, off_cfg, ro.resonator, tq, strict)}};
  return r;
}

json block_json(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json a = json::array(), b = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      a.push_back(m(i, j).real());
      b.push_back(m(i, j).imag());
    }
    re.push_back(a);
    im.push_back(b);
  }
  return {{"re", re}, {"im", im}};
}

RunResult run_dynamics(const ScenarioSpec& s) {
  RunResult r;
  const auto& d = *s.dynamics;
  if (d.mode == "cphase") {
    const int a = d.pair[0] - 1, b = d.pair[1] - 1;
    CphaseOptions opt;
    if (!d.spectators.empty()) opt.spectators = d.spectators;
    opt.full_unitary_max = 0;
    GateResult g;
    double j = 0.0;
    if (d.j_ghz) {
      if (d.n_qubits < 2) throw ValidationError("cphase needs n_qubits >= 2");
      SpinModel m(d.n_qubits);
      m.add_zz(a, b, *d.j_ghz);
      j = *d.j_ghz;
      g = cphase_gate(m, a, b, j, opt);
    } else {
      const ChainConfig cfg = resolved_chain(s);
      const auto rep = coupling_report(cfg, d.include_triples);
      j = rep.pair(a, b);
      g = cphase_gate(cfg, {a, b}, rep, opt);
    }
    const double infid = 1.0 - g.avg_fidelity;
    json doc = {{"pair", d.pair},
                {"j_ghz", j},
                {"gate_time_ns", g.gate_time},
                {"conditional_phase_rad", g.conditional_phase},
                {"avg_fidelity", g.avg_fidelity},
                {"infidelity", infid},
                {"pair_block", block_json(g.pair_block)}};
    if (!d.spectators.empty()) doc["spectators"] = d.spectators;
    r.documents["gate"] = doc;
    r.summary = {{"mode", "cphase"},
                 {"gate_time_ns", g.gate_time},
                 {"conditional_phase_rad", g.conditional_phase},
                 {"avg_fidelity", g.avg_fidelity},
                 {"infidelity", infid}};
    return r;
  }
  if (d.mode == "spectator") {
    const auto v = spectator_variant_from_string(d.variant);
    const std::vector<double> eps = s.sweep ? s.sweep->values() : d.epsilons;
    Table t{"spectator", "dimensionless infidelities; epsilon = three-body strength relative to J",
            {"n", "epsilon", "simulated", "formula", "ratio"}, {}};
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    json by_eps = json::array();
    std::map<int, std::vector<double>> by_n;
    for (double e : eps) {
      std::vector<double> xs, ys;
      for (int n : d.n_values) {
        const double sim = simulate_spectator_infidelity(n, e, v);
        const double form = spectator_infidelity(n, e, v);
        const double ratio = form > 0 ? sim / form : NAN;
        t.rows.push_back({(long long)n, e, sim, form, ratio});
        if (std::isfinite(ratio)) {
          rmin = std::min(rmin, ratio);
          rmax = std::max(rmax, ratio);
        }
        xs.push_back(n - 2.0);
        ys.push_back(sim);
        by_n[n].push_back(sim);
      }
      json mq = json::object();
      if (e > 0.0) {
        mq["three-body-only"] = max_qubits(d.target_fidelity, e, SpectatorVariant::ThreeBodyOnly);
        mq["with-residual"] = max_qubits(d.target_fidelity, e, SpectatorVariant::WithResidual);
      }
      by_eps.push_back({{"epsilon", e}, {"slope_vs_n_minus_2", finite_or_null(loglog_slope(xs, ys))}, {"max_qubits", mq}});
    }
    json by_n_json = json::array();
    for (const auto& [n, ys] : by_n) by_n_json.push_back({{"n", n}, {"slope_vs_epsilon", finite_or_null(loglog_slope(eps, ys))}});
    r.tables.push_back(std::move(t));
    r.summary = {{"mode", "spectator"},
                 {"variant", d.variant},
                 {"target_fidelity", d.target_fidelity},
                 {"ratio_min", finite_or_null(rmin)},
                 {"ratio_max", rmax},
                 {"by_epsilon", by_eps},
                 {"by_n", by_n_json}};
    return r;
  }
  // quench
  SpinOperatorMatrix h;
  int n = 0;
  if (!d.az.empty()) {
    const auto m = partitioning_model(d.az, d.ax);
    n = m.n_qubits;
    if (n > kDynamicsQubitCap) throw ValidationError("quench limited to " + std::to_string(kDynamicsQubitCap) + " qubits");
    h = build_spin_hamiltonian(m, kDynamicsQubitCap);
  } else {
    const ChainConfig cfg = resolved_chain(s);
    n = static_cast<int>(cfg.size());
    if (n > kDynamicsQubitCap) throw ValidationError("quench limited to " + std::to_string(kDynamicsQubitCap) + " qubits");
    h = build_spin_hamiltonian(cfg, coupling_report(cfg, d.include_triples), {d.include_triples, kDynamicsQubitCap});
  }
  const SpinConfiguration init = d.initial.empty() ? SpinConfiguration(n, 1) : d.initial;
  check_spins(init, static_cast<std::size_t>(n));
  const auto q = ising_quench(h, basis_state(init), d.t_final, d.steps);
  Table t{"timeseries", "t in ns; z/zz are Pauli expectation values; energy in GHz", {"t_ns", "observable", "value"}, {}};
  double norm_dev = 0.0;
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    for (int i = 0; i < n; ++i) t.rows.push_back({q.times[k], "z_" + std::to_string(i + 1), q.z[k][i]});
    std::size_t pi = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++pi)
        t.rows.push_back({q.times[k], "zz_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), q.zz[k][pi]});
    t.rows.push_back({q.times[k], std::string("energy"), q.energy[k]});
    norm_dev = std::max(norm_dev, std::abs(q.norm[k] - 1.0));
  }
  r.tables.push_back(std::move(t));
  r.summary = {{"mode", "quench"},
               {"n_qubits", n},
               {"t_final_ns", d.t_final},
               {"steps", d.steps},
               {"initial", init},
               {"final_z", q.z.back()},
               {"max_norm_deviation", norm_dev},
               {"energy_drift_ghz", q.energy.back() - q.energy.front()}};
  return r;
}

RunResult run_tuneup_cmd(const ScenarioSpec& s) {
  RunResult r;
  const auto& t = *s.tuneup;
  const int n = static_cast<int>(s.chain->size());
  RMat m = RMat::Identity(n, n) * t.nominal_slope;
  if (!t.mutual.empty())
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = t.mutual[i][j];
  RVec o = RVec::Zero(n);
  for (std::size_t i = 0; i < t.offsets.size(); ++i) o(static_cast<Eigen::Index>(i)) = t.offsets[i];
  VirtualDevice dev(*s.chain, BiasModel(m, o), s.readout->circuit, s.readout->resonator, t.noise, s.seed,
                    t.nominal_slope);
  TuneupOptions opt;
  opt.points_per_period = t.points_per_period;
  opt.probe = probe_from_string(t.probe);
  opt.remap = t.remap;
  if (!t.field_offset_shift.empty())
    opt.field_offset_shift = Eigen::Map<const RVec>(t.field_offset_shift.data(), n);
  const auto res = run_tuneup(dev, opt);
  const auto& cal = res.calibration;

  auto mat = [](const RMat& a) {
    json out = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
      out.push_back(row);
    }
    return out;
  };
  auto vec = [](const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json qs = json::array();
  for (const auto& q : cal.qubits)
    qs.push_back({{"qubit", q.index + 1},
                  {"e_so_ghz", q.e_so},
                  {"e_j_ghz", q.e_j},
                  {"spin_flagged", q.spin_flagged},
                  {"slope_phi0_per_ua", q.slope},
                  {"offset_phi0", q.offset},
                  {"current_zero_ua", q.current_zero},
                  {"current_phi0_ua", q.current_phi0},
                  {"fit_rms_ghz", q.fit_rms}});
  json doc = {{"e_j_ghz", cal.e_j}, {"qubits", qs}, {"remapped", cal.remapped}};
  if (cal.remapped) {
    doc["mutual_phi0_per_ua"] = mat(cal.mutual);
    doc["offsets_phi0"] = vec(cal.offsets);
  }
  doc["currents_zero_ua"] = vec(cal.currents_zero);
  doc["currents_phi0_ua"] = mat(cal.currents_phi0);
  r.documents["calibration"] = doc;

  Table tt{"truth", "GHz for energies, Phi0 for fluxes and offsets, Phi0/uA for mutuals; rel_error = abs_error when truth is 0",
           {"quantity", "truth", "estimate", "abs_error", "rel_error"}, {}};
  double flux_err = 0.0, rel_e = 0.0;
  for (const auto& row : res.report) {
    tt.rows.push_back({row.quantity, row.truth, row.estimate, row.abs_error, row.rel_error});
    if (row.quantity.rfind("flux_", 0) == 0) flux_err = std::max(flux_err, row.abs_error);
    if (row.quantity.rfind("e_so_", 0) == 0 || row.quantity == "e_j") rel_e = std::max(rel_e, row.rel_error);
  }
  r.tables.push_back(std::move(tt));
  r.summary = {{"e_j_estimate_ghz", cal.e_j},
               {"max_flux_error_phi0", flux_err},
               {"max_rel_error_e_j_e_so", rel_e},
               {"noise_ghz", t.noise},
               {"probe", t.probe},
               {"seed", s.seed}};
  return r;
}

}  // namespace

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ValidationError("format must be 'csv' or 'json'");
}

RunResult run_scenario(const ScenarioSpec& spec) {
  if (spec.command.empty()) throw ValidationError("config has no command");
  validate_for_command(spec);
  const auto& c = spec.command;
  try {
    if (c == "couplings") return run_couplings(spec);
    if (c == "supercurrent") return run_supercurrent(spec);
    if (c == "plan") return run_plan(spec);
    if (c == "crosstalk-mc") return run_crosstalk(spec);
    if (c == "readout") return run_readout(spec);
    if (c == "dispersive") return run_dispersive(spec);
    if (c == "dynamics") return run_dynamics(spec);
    if (c == "tuneup") return run_tuneup_cmd(spec);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(spec.name + " (" + c + "): " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(spec.name + " (" + c + "): " + e.what());
  }
  throw ValidationError("unknown command '" + c + "'");
}

std::string to_csv(const Table& t) {
  std::string out = "# " + t.name + "; units: " + t.units + "\n";
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ",";
      if (const auto* d = std::get_if<double>(&row[k]))
        out += fmt(*d);
      else if (const auto* i = std::get_if<long long>(&row[k]))
        out += std::to_string(*i);
      else
        out += std::get<std::string>(row[k]);
    }
    out += "\n";
  }
  return out;
}

json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(r);
  }
  return {{"table", t.name}, {"units", t.units}, {"columns", t.columns}, {"rows", rows}};
}

json summary_document(const RunResult& r, const ScenarioSpec& spec) {
  return {{"schema_version", kSchemaVersion}, {"kind", "summary"}, {"config", to_json(spec)}, {"results", r.summary}};
}

ScenarioSpec validate_summary(const json& j) {
  if (!j.is_object()) throw ValidationError("summary must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "schema_version" && it.key() != "kind" && it.key() != "config" && it.key() != "results")
      throw ValidationError("summary: unknown field '" + it.key() + "'");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw ValidationError("summary: schema_version mismatch");
  if (!j.contains("kind") || j["kind"] != "summary") throw ValidationError("summary: kind must be 'summary'");
  if (!j.contains("results") || !j["results"].is_object()) throw ValidationError("summary: results must be an object");
  if (!j.contains("config")) throw ValidationError("summary: missing config");
  auto spec = parse_config(j["config"], "summary/config");
  if (spec.command.empty()) throw ValidationError("summary: config has no command");
  return spec;
}

std::vector<std::string> write_outputs(const RunResult& r, const ScenarioSpec& spec, const std::string& out_dir,
                                       OutputFormat fmt_) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + out_dir + "': " + ec.message());
  auto wanted = [&](const std::string& name) {
    return spec.outputs.empty() || std::find(spec.outputs.begin(), spec.outputs.end(), name) != spec.outputs.end();
  };
  std::vector<std::string> written;
  auto put = [&](const std::string& file, const std::string& body) {
    const std::string path = (fs::path(out_dir) / file).string();
    std::ofstream o(path, std::ios::binary);
    if (!o) throw ValidationError("cannot write '" + path + "'");
    o << body;
    written.push_back(path);
  };
  for (const auto& t : r.tables) {
    if (!wanted(t.name)) continue;
    if (fmt_ == OutputFormat::Csv)
      put(spec.name + "_" + t.name + ".csv", to_csv(t));
    else
      put(spec.name + "_" + t.name + ".json", to_json(t).dump(2) + "\n");
  }
  for (const auto& [name, doc] : r.documents)
    if (wanted(name)) put(spec.name + "_" + name + ".json", doc.dump(2) + "\n");
  put(spec.name + "_summary.json", summary_document(r, spec).dump(2) + "\n");
  return written;
}

}  // namespace asq
