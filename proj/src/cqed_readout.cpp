#include "asqchain/cqed_readout.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "asqchain/coupling.hpp"
#include "asqchain/flux_planner.hpp"

namespace asq {

std::string to_string(CircuitKind k) { return k == CircuitKind::Transmon ? "transmon" : "fluxonium"; }

ReadoutCircuit ReadoutCircuit::transmon(double e_c, double n_g, int basis_size) {
  ReadoutCircuit c;
  c.kind = CircuitKind::Transmon;
  c.e_c = e_c;
  c.n_g = n_g;
  c.basis_size = basis_size;
  c.validate();
  return c;
}

ReadoutCircuit ReadoutCircuit::fluxonium(double e_c, double e_l, double loop_flux, int basis_size) {
  ReadoutCircuit c;
  c.kind = CircuitKind::Fluxonium;
  c.e_c = e_c;
  c.e_l = e_l;
  c.loop_flux = loop_flux;
  c.basis_size = basis_size;
  c.validate();
  return c;
}

void ReadoutCircuit::validate() const {
  if (!(std::isfinite(e_c) && e_c > 0.0)) throw ValidationError("readout e_c must be > 0");
  if (kind == CircuitKind::Fluxonium && !(std::isfinite(e_l) && e_l > 0.0))
    throw ValidationError("fluxonium readout needs e_l > 0");
  if (!std::isfinite(loop_flux) || !std::isfinite(n_g)) throw ValidationError("readout loop_flux/n_g must be finite");
  if (basis_size < 20) throw ValidationError("readout basis_size must be >= 20");
  if (basis_size > 4000) throw ValidationError("readout basis_size too large");
}

void ResonatorSpec::validate() const {
  if (!(std::isfinite(f_bare) && f_bare > 0.0)) throw ValidationError("resonator f_bare must be > 0");
  if (!(std::isfinite(g) && g >= 0.0)) throw ValidationError("resonator g must be >= 0");
  if (levels < 3 || levels > 200) throw ValidationError("resonator levels must be in [3, 200]");
}

namespace {

void check_aligned(const ChainConfig& config) {
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    if (a.e_z > 0.0 && a.theta != 0.0)
      throw ValidationError("spin-conditioned circuit potential requires aligned Zeeman fields (qubit " +
                            std::to_string(l + 1) + ")");
  }
}

// <n+1| V |n> for the harmonic part of the potential (coupling junction + ASQs).
cplx upper_hop(const ChainConfig& config, const SpinConfiguration& spins) {
  const auto th = config.phases();
  cplx h(-0.5 * config.e_j_coupling(), 0.0);
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    const cplx e = std::polar(1.0, th[l]);
    h += 0.5 * a.e_j * e;                           // cos(phi + theta)
    h += -spins[l] * a.e_so * e / cplx(0.0, 2.0);   // sin(phi + theta)
  }
  return h;
}

CircuitMatrices transmon_matrices(const ReadoutCircuit& c, const ChainConfig& config, const SpinConfiguration& spins,
                                  int basis) {
  const int d = basis % 2 == 1 ? basis : basis + 1;
  const int half = (d - 1) / 2;
  CircuitMatrices m{CMat::Zero(d, d), CMat::Zero(d, d)};
  const cplx hop = upper_hop(config, spins);
  for (int k = 0; k < d; ++k) {
    const double n = k - half - c.n_g;
    m.h(k, k) = 4.0 * c.e_c * n * n + config.e_j_coupling();
    m.n(k, k) = n;
    if (k + 1 < d) {
      m.h(k + 1, k) = hop;
      m.h(k, k + 1) = std::conj(hop);
    }
  }
  return m;
}

CircuitMatrices fluxonium_matrices(const ReadoutCircuit& c, const ChainConfig& config,
                                   const SpinConfiguration& spins, int d) {
  const double phi_zpf = std::pow(2.0 * c.e_c / c.e_l, 0.25);
  const double n_zpf = 0.5 / phi_zpf;
  const double omega = std::sqrt(8.0 * c.e_c * c.e_l);
  RMat b = RMat::Zero(d, d);
  for (int k = 1; k < d; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  const RMat phi = phi_zpf * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<RMat> es(phi);
  const RMat& v = es.eigenvectors();
  const RVec& lam = es.eigenvalues();
  auto func = [&](auto f) {
    RVec w = lam.unaryExpr(f);
    return RMat(v * w.asDiagonal() * v.transpose());
  };

  RMat h = RMat::Zero(d, d);
  for (int k = 0; k < d; ++k) h(k, k) = omega * (k + 0.5) + 0.5 * c.e_l * c.loop_flux * c.loop_flux;
  h -= c.e_l * c.loop_flux * phi;
  const double ej = config.e_j_coupling();
  h += func([ej](double x) { return ej * (1.0 - std::cos(x)); });
  const auto th = config.phases();
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    const double t = th[l], so = -spins[l] * a.e_so, jl = a.e_j;
    if (jl == 0.0 && so == 0.0) continue;
    h += func([=](double x) { return jl * std::cos(x + t) + so * std::sin(x + t); });
  }
  CircuitMatrices m;
  m.h = h.cast<cplx>();
  m.n = cplx(0.0, n_zpf) * (b.transpose() - b).cast<cplx>();
  return m;
}

SpinBranchSpectrum spectrum_at(const ReadoutCircuit& c, const ChainConfig& config, const SpinConfiguration& spins,
                               int basis, int max_levels) {
  const auto m = circuit_matrices(c, config, spins, basis);
  Eigen::SelfAdjointEigenSolver<CMat> es(m.h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("circuit eigensolver failed");
  SpinBranchSpectrum s;
  s.spins = spins;
  s.basis_size = static_cast<int>(m.h.rows());
  const int nl = std::min<int>(max_levels, static_cast<int>(m.h.rows()));
  for (int k = 0; k < nl; ++k) s.levels.push_back(es.eigenvalues()(k));
  for (int k = 1; k < nl; ++k) s.transitions.push_back(s.levels[k] - s.levels[0]);
  return s;
}

SpinBranchSpectrum converged_levels(const ReadoutCircuit& c, const ChainConfig& config,
                                    const SpinConfiguration& spins, const LevelOptions& opt) {
  check_spins(spins, config.size());
  check_aligned(config);
  c.validate();
  const int levels = std::max(opt.max_levels, 2);
  auto s = spectrum_at(c, config, spins, c.basis_size, levels);
  if (!opt.check_convergence) return s;
  const int cap = c.kind == CircuitKind::Transmon ? 641 : 960;
  int basis = c.basis_size;
  SpinBranchSpectrum best = s;
  while (true) {
    const int next = c.kind == CircuitKind::Transmon ? 2 * basis - 1 : 2 * basis;
    auto t = spectrum_at(c, config, spins, next, levels);
    if (std::abs(t.transitions[0] - s.transitions[0]) < opt.tolerance) return best;
    if (next > cap)
      throw ConvergenceError(to_string(c.kind) + " spectrum not converged at basis size " + std::to_string(next));
    basis = next;
    s = t;
    best = t;
  }
}

}  // namespace

double josephson_potential(const ChainConfig& config, const SpinConfiguration& spins, double phi) {
  check_spins(spins, config.size());
  check_aligned(config);
  const auto th = config.phases();
  const double h = std::sin(0.5 * phi);
  double u = 2.0 * config.e_j_coupling() * h * h;
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    u += a.e_j * std::cos(phi + th[l]) - spins[l] * a.e_so * std::sin(phi + th[l]);
  }
  return u;
}

CircuitMatrices circuit_matrices(const ReadoutCircuit& circuit, const ChainConfig& config,
                                 const SpinConfiguration& spins, int basis_size) {
  check_spins(spins, config.size());
  check_aligned(config);
  if (circuit.kind == CircuitKind::Transmon) return transmon_matrices(circuit, config, spins, basis_size);
  return fluxonium_matrices(circuit, config, spins, basis_size);
}

SpinBranchSpectrum transmon_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                   const SpinConfiguration& spins, const LevelOptions& opt) {
  if (circuit.kind != CircuitKind::Transmon) throw ValidationError("transmon_levels needs a transmon circuit");
  return converged_levels(circuit, config, spins, opt);
}

SpinBranchSpectrum fluxonium_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                    const SpinConfiguration& spins, const LevelOptions& opt) {
  if (circuit.kind != CircuitKind::Fluxonium) throw ValidationError("fluxonium_levels needs a fluxonium circuit");
  return converged_levels(circuit, config, spins, opt);
}

SpinBranchSpectrum circuit_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                  const SpinConfiguration& spins, const LevelOptions& opt) {
  return converged_levels(circuit, config, spins, opt);
}

DressedResult dressed_resonator(const ReadoutCircuit& circuit, const ChainConfig& config,
                                const SpinConfiguration& spins, const ResonatorSpec& resonator,
                                const DressedOptions& opt) {
  circuit.validate();
  resonator.validate();
  if (opt.circuit_states < 5) throw ValidationError("dressed calculation needs at least 5 circuit states");
  const auto m = circuit_matrices(circuit, config, spins, circuit.basis_size);
  Eigen::SelfAdjointEigenSolver<CMat> es(m.h);
  if (es.info() != Eigen::Success) throw ConvergenceError("circuit eigensolver failed");
  const int k_states = std::min<int>(opt.circuit_states, static_cast<int>(m.h.rows()));
  const int levels = resonator.levels;
  const CMat vk = es.eigenvectors().leftCols(k_states);
  const CMat nk = vk.adjoint() * m.n * vk;
  const RVec e = es.eigenvalues().head(k_states).array() - es.eigenvalues()(0);

  DressedResult out;
  out.min_detuning = std::numeric_limits<double>::infinity();
  for (int k = 1; k < k_states; ++k) {
    out.circuit_transitions.push_back(e(k));
    out.min_detuning = std::min(out.min_detuning, std::abs(resonator.f_bare - e(k)));
  }
  out.near_resonance = out.min_detuning < 5.0 * resonator.g;

  const int dim = k_states * levels;
  CMat h = CMat::Zero(dim, dim);
  for (int k = 0; k < k_states; ++k)
    for (int p = 0; p < levels; ++p) h(k * levels + p, k * levels + p) = e(k) + resonator.f_bare * p;
  if (resonator.g > 0.0) {
    for (int k = 0; k < k_states; ++k)
      for (int k2 = 0; k2 < k_states; ++k2) {
        const cplx c = resonator.g * nk(k, k2);
        for (int p = 0; p + 1 < levels; ++p) {
          const double s = std::sqrt(static_cast<double>(p + 1));
          h(k * levels + p, k2 * levels + p + 1) += c * s;
          h(k * levels + p + 1, k2 * levels + p) += c * s;
        }
      }
  }
  Eigen::SelfAdjointEigenSolver<CMat> ds(h);
  if (ds.info() != Eigen::Success) throw ConvergenceError("dressed eigensolver failed");
  auto best_for = [&](int bare) {
    Eigen::Index idx = 0;
    ds.eigenvectors().row(bare).cwiseAbs2().maxCoeff(&idx);
    return std::pair<int, double>{static_cast<int>(idx), std::norm(ds.eigenvectors()(bare, idx))};
  };
  const auto [ground, g_overlap] = best_for(0);
  const auto [branch, r_overlap] = best_for(1);
  out.overlap = r_overlap;
  out.frequency = ds.eigenvalues()(branch) - ds.eigenvalues()(ground);
  if (k_states > 2) {
    const auto [partner, p_overlap] = best_for(2 * levels);
    (void)p_overlap;
    out.partner = ds.eigenvalues()(partner) - ds.eigenvalues()(ground);
  }
  if (opt.strict && (branch == ground || r_overlap < 0.5 || g_overlap < 0.5))
    throw ConvergenceError("resonator branch ambiguous: bare-state overlap " + std::to_string(r_overlap) +
                           " (resonator within " + std::to_string(out.min_detuning) + " GHz of a transition)");
  return out;
}

double dressed_resonator_freq(const ReadoutCircuit& circuit, const ChainConfig& config,
                              const SpinConfiguration& spins, const ResonatorSpec& resonator,
                              const DressedOptions& opt) {
  return dressed_resonator(circuit, config, spins, resonator, opt).frequency;
}

double spin_contrast(const ReadoutCircuit& circuit, const ChainConfig& config, const ResonatorSpec& resonator,
                     int qubit, const DressedOptions& opt) {
  if (qubit < 0 || static_cast<std::size_t>(qubit) >= config.size()) throw ValidationError("qubit out of range");
  SpinConfiguration s(config.size(), -1);
  s[qubit] = 1;
  const double up = dressed_resonator_freq(circuit, config, s, resonator, opt);
  s[qubit] = -1;
  return up - dressed_resonator_freq(circuit, config, s, resonator, opt);
}

AvoidedCrossingScan avoided_crossing_scan(const ReadoutCircuit& circuit, const ChainConfig& config,
                                          const ResonatorSpec& resonator, const ScanOptions& opt) {
  if (circuit.kind != CircuitKind::Fluxonium) throw ValidationError("avoided-crossing scan needs a fluxonium circuit");
  if (opt.points < 2) throw ValidationError("scan needs at least 2 points");
  if (!(opt.flux_stop > opt.flux_start)) throw ValidationError("scan range is empty");
  const int n = static_cast<int>(config.size());
  if (opt.target < 0 || opt.target >= n) throw ValidationError("scan target out of range");

  const ChainConfig on_cfg = config.with_fluxes(plan_readout(opt.target, ReadoutMode::OnTarget, n, config).fluxes);
  const ChainConfig off_cfg = config.with_fluxes(plan_roles(std::vector<Role>(n, Role::Off), config).fluxes);
  DressedOptions loose;
  loose.strict = false;

  struct Point {
    double x;
    DressedResult r[2][2];  // [on/off][up/down]
  };
  auto eval = [&](double x) {
    Point p{x, {}};
    ReadoutCircuit c = circuit;
    c.loop_flux = kTwoPi * x;
    SpinConfiguration s(n, -1);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        s[opt.target] = b == 0 ? 1 : -1;
        p.r[a][b] = dressed_resonator(c, a == 0 ? on_cfg : off_cfg, s, resonator, loose);
      }
    return p;
  };
  auto contrast = [](const Point& p, int a) { return p.r[a][0].frequency - p.r[a][1].frequency; };
  auto min_overlap = [](const Point& p, int a) { return std::min(p.r[a][0].overlap, p.r[a][1].overlap); };

  AvoidedCrossingScan out;
  std::vector<Point> pts;
  for (int k = 0; k < opt.points; ++k) {
    const double x = opt.flux_start + (opt.flux_stop - opt.flux_start) * k / (opt.points - 1);
    pts.push_back(eval(x));
    const auto& p = pts.back();
    static const char* names[2][2] = {{"on_up", "on_down"}, {"off_up", "off_down"}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const auto& r = p.r[a][b];
        out.rows.push_back({x, names[a][b], "resonator", r.frequency});
        out.rows.push_back({x, names[a][b], "partner", r.partner});
        out.rows.push_back({x, names[a][b], "circuit_01", r.circuit_transitions.at(0)});
        out.rows.push_back({x, names[a][b], "circuit_02", r.circuit_transitions.at(1)});
      }
  }

  // Bare 0->2 transition crossing the resonator (target ON, spin up).
  for (int k = 0; k + 1 < opt.points; ++k) {
    const double d0 = pts[k].r[0][0].circuit_transitions[1] - resonator.f_bare;
    const double d1 = pts[k + 1].r[0][0].circuit_transitions[1] - resonator.f_bare;
    if ((d0 < 0.0) == (d1 < 0.0)) continue;
    AvoidedCrossing ac;
    ac.loop_flux = pts[k].x + (pts[k + 1].x - pts[k].x) * d0 / (d0 - d1);
    ac.min_gap = std::numeric_limits<double>::infinity();
    for (int j = std::max(0, k - 3); j <= std::min(opt.points - 1, k + 4); ++j)
      ac.min_gap = std::min(ac.min_gap, std::abs(pts[j].r[0][0].partner - pts[j].r[0][0].frequency));
    out.crossings.push_back(ac);
  }

  // Roots of the OFF contrast, refined by bisection; keep the one with the
  // largest ON contrast among those that stay resonator-like.
  for (int k = 0; k + 1 < opt.points; ++k) {
    Point lo = pts[k], hi = pts[k + 1];
    double flo = contrast(lo, 1), fhi = contrast(hi, 1);
    if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0) continue;
    Point mid = lo;
    double fmid = flo;
    for (int it = 0; it < 60 && std::abs(fmid) > 0.1 * opt.root_tolerance; ++it) {
      mid = eval(0.5 * (lo.x + hi.x));
      fmid = contrast(mid, 1);
      if ((fmid < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
      if (hi.x - lo.x < 1e-13) break;
    }
    if (std::abs(fmid) > opt.root_tolerance) continue;  // jump across a branch switch, not a root
    ScanSetpoint sp{mid.x, contrast(mid, 0), fmid, min_overlap(mid, 1), min_overlap(mid, 0)};
    if (sp.off_overlap < opt.min_overlap || sp.on_overlap < opt.on_min_overlap) continue;
    if (!out.setpoint || std::abs(sp.on_contrast) > std::abs(out.setpoint->on_contrast)) out.setpoint = sp;
  }
  return out;
}

JointLadder joint_readout_ladder(const ChainConfig& config, const ReadoutCircuit& circuit,
                                 const ResonatorSpec& resonator, const LadderOptions& opt) {
  const int n = static_cast<int>(config.size());
  const auto et = effective_total_ej(config);
  const auto th = config.phases();
  int sign = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rel = th[i] - et.phase_offset;
    if (std::abs(std::cos(rel)) > opt.off_tolerance)
      throw ValidationError("joint readout needs every qubit OFF; qubit " + std::to_string(i + 1) + " is not");
    const int si = std::sin(rel) > 0.0 ? 1 : -1;
    if (sign == 0) sign = si;
    if (si != sign)
      throw ValidationError("joint readout needs all OFF phases on the same side (+pi/2); qubit " +
                            std::to_string(i + 1) + " differs");
    lo = std::min(lo, config.asq(i).e_so);
    hi = std::max(hi, config.asq(i).e_so);
  }
  if (hi > 0.0 && (hi - lo) / hi > opt.e_so_tolerance)
    throw ValidationError("joint readout needs E_SO within " + std::to_string(opt.e_so_tolerance * 100) +
                          "% across qubits");
  const bool identical = hi - lo <= 1e-12 * std::max(hi, 1.0);

  JointLadder out;
  for (int up = 0; up <= n; ++up) {
    // first `up` qubits, last `up` qubits, and a cyclic shift by one
    std::vector<SpinConfiguration> picks;
    for (int variant = 0; variant < 3; ++variant) {
      SpinConfiguration s(n, -1);
      for (int c = 0; c < up; ++c) {
        const int idx = variant == 0 ? c : variant == 1 ? n - 1 - c : (c + 1) % n;
        s[idx] = 1;
      }
      if (std::find(picks.begin(), picks.end(), s) == picks.end()) picks.push_back(s);
    }
    std::vector<double> f;
    for (const auto& s : picks) f.push_back(dressed_resonator_freq(circuit, config, s, resonator));
    const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
    const double spread = *mx - *mn;
    if (identical && spread > opt.degeneracy_tol) {
      const auto a = picks[mn - f.begin()], b = picks[mx - f.begin()];
      auto label = [](const SpinConfiguration& s) {
        std::string t;
        for (int v : s) t += v > 0 ? 'u' : 'd';
        return t;
      };
      throw ValidationError("joint readout degeneracy violated between " + label(a) + " and " + label(b) + " (" +
                            std::to_string(spread * 1e6) + " kHz)");
    }
    out.frequencies.push_back(f.front());
    out.spread.push_back(spread);
  }
  return out;
}

}  // namespace asq
