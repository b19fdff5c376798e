#include "asqchain/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "asqchain/coupling.hpp"

namespace asq {

namespace {

void check_cap(int n, int cap) {
  if (n > cap)
    throw ValidationError("dynamics limited to " + std::to_string(cap) + " qubits, got " + std::to_string(n));
}

void check_state(const SpinOperatorMatrix& h, const CVec& s) {
  if (static_cast<std::size_t>(s.size()) != h.dim())
    throw ValidationError("state dimension " + std::to_string(s.size()) + " does not match Hamiltonian dimension " +
                          std::to_string(h.dim()));
}

// exp(-2 pi i H t) through a Hermitian eigendecomposition.
struct Spectral {
  RVec lambda;
  CMat v;
  bool diagonal = false;

  explicit Spectral(const SpinOperatorMatrix& h) : diagonal(h.diagonal) {
    if (diagonal) {
      lambda = h.diagonal_entries();
      return;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(h.dense());
    if (es.info() != Eigen::Success) throw ConvergenceError("Hamiltonian eigendecomposition failed");
    lambda = es.eigenvalues();
    v = es.eigenvectors();
  }

  CVec phases(double t) const {
    CVec p(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) p(k) = std::polar(1.0, -kTwoPi * lambda(k) * t);
    return p;
  }

  CVec apply(double t, const CVec& s) const {
    const CVec p = phases(t);
    if (diagonal) return p.cwiseProduct(s);
    return v * p.cwiseProduct(v.adjoint() * s);
  }

  CMat matrix(double t) const {
    const CVec p = phases(t);
    if (diagonal) return p.asDiagonal();
    return v * p.asDiagonal() * v.adjoint();
  }
};

}  // namespace

CMat propagator(const SpinOperatorMatrix& h, double t_ns) {
  if (!std::isfinite(t_ns)) throw ValidationError("evolution time must be finite");
  return Spectral(h).matrix(t_ns);
}

CVec evolve(const SpinOperatorMatrix& h, double t_ns, const CVec& state) {
  check_state(h, state);
  if (!std::isfinite(t_ns)) throw ValidationError("evolution time must be finite");
  return Spectral(h).apply(t_ns, state);
}

CVec evolve(const ChainConfig& config, const PulseSchedule& schedule, const CVec& initial, const EvolveOptions& opt) {
  const int n = static_cast<int>(config.size());
  check_cap(n, opt.max_qubits);
  if (static_cast<std::size_t>(initial.size()) != (std::size_t{1} << n))
    throw ValidationError("initial state dimension does not match the chain");
  if (std::abs(initial.norm() - 1.0) > 1e-9) throw ValidationError("initial state must be normalised");
  CVec psi = initial;
  for (const auto& seg : schedule.segments) {
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
      throw ValidationError("pulse segment durations must be > 0");
    if (seg.fluxes.size() != config.size()) throw ValidationError("pulse segment flux list has the wrong length");
    const auto cfg = config.with_fluxes(seg.fluxes);
    const auto report = coupling_report(cfg, opt.include_triples);
    const auto h = build_spin_hamiltonian(cfg, report, {opt.include_triples, opt.max_qubits});
    psi = evolve(h, seg.duration, psi);
  }
  return psi;
}

CVec basis_state(const SpinConfiguration& spins) {
  check_spins(spins, spins.size());
  CVec s = CVec::Zero(Eigen::Index{1} << spins.size());
  s(static_cast<Eigen::Index>(index_from_spins(spins))) = 1.0;
  return s;
}

double cphase_fidelity(const CMat& block) {
  if (block.rows() != 4 || block.cols() != 4) throw ValidationError("CPHASE fidelity needs a 4x4 block");
  const cplx tr = block(0, 0) + block(1, 1) + block(2, 2) - block(3, 3);
  const double d = 4.0;
  return ((block * block.adjoint()).trace().real() + std::norm(tr)) / (d * (d + 1.0));
}

GateResult cphase_gate(const SpinModel& model, int a, int b, double j_pair, const CphaseOptions& opt) {
  const int n = model.n_qubits;
  check_cap(n, opt.max_qubits);
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ValidationError("CPHASE needs two distinct qubits");
  if (!(std::abs(j_pair) > 0.0) || !std::isfinite(j_pair)) throw ValidationError("CPHASE pair has zero coupling");

  SpinConfiguration spect = opt.spectators.value_or(SpinConfiguration(n, 1));
  check_spins(spect, static_cast<std::size_t>(n));

  GateResult r;
  r.gate_time = 1.0 / (4.0 * std::abs(j_pair));
  const auto h = build_spin_hamiltonian(model, opt.max_qubits);
  const Spectral sp(h);

  // Columns for the four pair states with spectators fixed.
  Eigen::Index idx[4];
  for (int k = 0; k < 4; ++k) {
    auto s = spect;
    s[a] = (k & 2) ? -1 : 1;
    s[b] = (k & 1) ? -1 : 1;
    idx[k] = static_cast<Eigen::Index>(index_from_spins(s));
  }
  CMat m(4, 4);
  for (int k = 0; k < 4; ++k) {
    CVec e = CVec::Zero(static_cast<Eigen::Index>(h.dim()));
    e(idx[k]) = 1.0;
    const CVec out = sp.apply(r.gate_time, e);
    for (int k2 = 0; k2 < 4; ++k2) m(k2, k) = out(idx[k2]);
  }
  if (n <= opt.full_unitary_max) r.unitary = sp.matrix(r.gate_time);

  // Conditional phase from the diagonal; the remaining local phases are
  // matched exactly so that only the ZZ-type residual chi stays.
  const double phi_c = std::arg(m(0, 0) * m(3, 3) * std::conj(m(1, 1)) * std::conj(m(2, 2)));
  r.conditional_phase = wrap_phase(phi_c);
  const double chi = wrap_phase(phi_c - kPi) / 4.0;
  const double target[4] = {chi, -chi, -chi, kPi + chi};
  double corr[4];
  for (int k = 0; k < 3; ++k) corr[k] = target[k] - std::arg(m(k, k));
  corr[3] = corr[1] + corr[2] - corr[0];
  CMat c = CMat::Zero(4, 4);
  for (int k = 0; k < 4; ++k) c(k, k) = std::polar(1.0, corr[k]);
  r.pair_block = c * m;
  r.avg_fidelity = cphase_fidelity(r.pair_block);
  return r;
}

GateResult cphase_gate(const ChainConfig& config, std::pair<int, int> pair, const CouplingReport& report,
                       const CphaseOptions& opt) {
  const int n = static_cast<int>(config.size());
  check_cap(n, opt.max_qubits);
  const auto [a, b] = pair;
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ValidationError("CPHASE needs two distinct qubits");
  const double j = report.pair(a, b);
  if (j == 0.0) throw ValidationError("CPHASE pair has zero coupling in the report");
  return cphase_gate(spin_model_from_report(config, report, true), a, b, j, opt);
}

std::string to_string(SpectatorVariant v) {
  return v == SpectatorVariant::ThreeBodyOnly ? "three-body-only" : "with-residual";
}

SpectatorVariant spectator_variant_from_string(const std::string& s) {
  if (s == "three-body-only") return SpectatorVariant::ThreeBodyOnly;
  if (s == "with-residual") return SpectatorVariant::WithResidual;
  throw ValidationError("unknown spectator variant '" + s + "'");
}

double spectator_coefficient(SpectatorVariant v) { return v == SpectatorVariant::ThreeBodyOnly ? 0.1875 : 1.1875; }

double spectator_infidelity(int n, double epsilon, SpectatorVariant v) {
  if (n < 2) throw ValidationError("spectator infidelity needs n >= 2");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be finite and >= 0");
  const double x = (n - 2) * epsilon * kPi;
  return spectator_coefficient(v) * x * x;
}

long long max_qubits(double target_fidelity, double epsilon, SpectatorVariant v) {
  if (!(target_fidelity > 0.0 && target_fidelity < 1.0)) throw ValidationError("target fidelity must be in (0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be > 0");
  const double budget = 1.0 - target_fidelity;
  const double c = spectator_coefficient(v);
  const double est = std::sqrt(budget / c) / (epsilon * kPi);
  if (est > 1e15) throw ValidationError("max_qubits estimate overflows");
  long long n = 2 + static_cast<long long>(std::floor(est));
  auto infid = [&](long long m) {
    const double x = static_cast<double>(m - 2) * epsilon * kPi;
    return c * x * x;
  };
  while (infid(n + 1) <= budget) ++n;
  while (n > 2 && infid(n) > budget) --n;
  return n;
}

SpinModel spectator_model(int n, double epsilon, SpectatorVariant v, double j_pair) {
  if (n < 2) throw ValidationError("spectator model needs n >= 2");
  SpinModel m(n);
  m.add_zz(0, 1, j_pair);
  for (int k = 2; k < n; ++k) {
    m.add_term(epsilon * j_pair, 0, m.bit(0) | m.bit(1) | m.bit(k));
    if (v == SpectatorVariant::WithResidual) {
      m.add_zz(0, k, epsilon * j_pair);
      m.add_zz(1, k, epsilon * j_pair);
    }
  }
  return m;
}

double simulate_spectator_infidelity(int n, double epsilon, SpectatorVariant v, double j_pair) {
  const auto g = cphase_gate(spectator_model(n, epsilon, v, j_pair), 0, 1, j_pair, {std::nullopt, kDynamicsQubitCap, 0});
  // 1 - F computed from the trace to avoid cancellation
  const CMat& blk = g.pair_block;
  const cplx tr = blk(0, 0) + blk(1, 1) + blk(2, 2) - blk(3, 3);
  const double loss = 4.0 - (blk * blk.adjoint()).trace().real();
  return (16.0 - std::norm(tr) + loss) / 20.0;
}

SpinModel partitioning_model(const std::vector<double>& az, const std::vector<double>& ax) {
  const int n = static_cast<int>(az.size());
  if (n < 1) throw ValidationError("partitioning model needs at least one qubit");
  if (!ax.empty() && ax.size() != az.size()) throw ValidationError("az and ax lengths differ");
  SpinModel m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      m.add_zz(i, j, az[i] * az[j]);
      if (!ax.empty()) m.add_xx(i, j, ax[i] * ax[j]);
    }
  return m;
}

QuenchSeries ising_quench(const SpinOperatorMatrix& h, const CVec& initial, double t_final, int steps) {
  check_state(h, initial);
  if (steps < 1) throw ValidationError("quench needs at least one step");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ValidationError("t_final must be finite and >= 0");
  if (std::abs(initial.norm() - 1.0) > 1e-9) throw ValidationError("initial state must be normalised");
  const int n = h.n_qubits;
  const Spectral sp(h);
  const CMat hd = h.diagonal ? CMat() : h.dense();
  const RVec hdiag = h.diagonal ? h.diagonal_entries() : RVec();

  QuenchSeries q;
  q.n_qubits = n;
  const std::size_t dim = h.dim();
  for (int k = 0; k <= steps; ++k) {
    const double t = t_final * k / steps;
    const CVec psi = sp.apply(t, initial);
    std::vector<double> z(n, 0.0), zz(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
      const double p = std::norm(psi(static_cast<Eigen::Index>(b)));
      if (p == 0.0) continue;
      std::size_t pi = 0;
      for (int i = 0; i < n; ++i) {
        const double si = ((b >> (n - 1 - i)) & 1u) ? -1.0 : 1.0;
        z[i] += p * si;
        for (int j = i + 1; j < n; ++j, ++pi) {
          const double sj = ((b >> (n - 1 - j)) & 1u) ? -1.0 : 1.0;
          zz[pi] += p * si * sj;
        }
      }
    }
    q.times.push_back(t);
    q.z.push_back(std::move(z));
    q.zz.push_back(std::move(zz));
    const double e = h.diagonal ? psi.cwiseAbs2().dot(hdiag) : psi.dot(hd * psi).real();
    q.energy.push_back(e);
    q.norm.push_back(psi.norm());
  }
  return q;
}

QuenchSeries ising_quench(const ChainConfig& config, const CouplingReport& report, const SpinConfiguration& initial,
                          double t_final, int steps, int max_qubits_cap) {
  const int n = static_cast<int>(config.size());
  check_cap(n, max_qubits_cap);
  check_spins(initial, config.size());
  const auto h = build_spin_hamiltonian(config, report, {true, max_qubits_cap});
  return ising_quench(h, basis_state(initial), t_final, steps);
}

}  // namespace asq
