#include <doctest.h>

#include "asqchain/coupling.hpp"
#include "asqchain/dynamics.hpp"
#include "asqchain/flux_planner.hpp"

using namespace asq;

TEST_CASE("propagator: exp(-2 pi i H t) for a single Z field") {
  SpinModel m(1);
  m.add_z(0, 0.1);  // H = 0.05 Z
  const CMat u = propagator(build_spin_hamiltonian(m), 3.0);
  CHECK(std::abs(u(0, 0) - std::polar(1.0, -kTwoPi * 0.05 * 3.0)) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::polar(1.0, kTwoPi * 0.05 * 3.0)) < 1e-14);
  SpinModel x(1);
  x.add_x(0, 0.5);  // Rabi: full flip after t = 1/(2*0.5) = 1 ns
  const CVec out = evolve(build_spin_hamiltonian(x), 1.0, basis_state({1}));
  CHECK(std::norm(out(1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CPHASE from an ideal 10 MHz ZZ coupling") {
  SpinModel m(2);
  m.add_zz(0, 1, 0.01);
  const auto g = cphase_gate(m, 0, 1, 0.01);
  CHECK(g.gate_time == doctest::Approx(25.0));
  CHECK(std::abs(wrap_phase(g.conditional_phase - kPi)) < 1e-9);
  CHECK(g.avg_fidelity > 1.0 - 1e-12);
  CHECK_THROWS_AS(cphase_gate(m, 0, 1, 0.0), ValidationError);
}

TEST_CASE("CPHASE on a planned chain pair") {
  const ChainConfig base(10.0, std::vector<AsqParams>(4, AsqParams{0, 0.3, 0, 0}), std::vector<double>(4, 0.0));
  const auto plan = plan_pair(0, 2, base);
  const ChainConfig c = base.with_fluxes(plan.fluxes);
  const auto rep = coupling_report(c, true);
  const auto g = cphase_gate(c, {0, 2}, rep);
  CHECK(g.gate_time == doctest::Approx(1.0 / (4 * 0.018)));

  // The OFF qubits between the pair leave three-body terms Z0 Zk Z2 (k = 1, 3);
  // without them the gate is exact.
  const auto bare = cphase_gate(spin_model_from_report(c, rep, false), 0, 2, rep.pair(0, 2));
  CHECK(bare.avg_fidelity > 1.0 - 1e-12);
  const double j3 = rep.triple(0, 1, 2);
  CHECK(j3 == doctest::Approx(rep.triple(0, 2, 3)));
  CHECK(j3 / std::abs(rep.pair(0, 2)) == doctest::Approx(0.03).epsilon(1e-9));
  const double formula = spectator_infidelity(4, j3 / (2 * std::abs(rep.pair(0, 2))), SpectatorVariant::ThreeBodyOnly);
  CHECK((1.0 - g.avg_fidelity) / formula == doctest::Approx(1.066).epsilon(0.01));
}

TEST_CASE("average gate fidelity of a block") {
  CMat ideal = CMat::Identity(4, 4);
  ideal(3, 3) = -1.0;
  CHECK(cphase_fidelity(ideal) == doctest::Approx(1.0));
  CHECK(cphase_fidelity(CMat::Identity(4, 4)) == doctest::Approx((4.0 + 4.0) / 20.0));
}

TEST_CASE("spectator infidelity: formula, simulation, inversion") {
  const auto v3 = SpectatorVariant::ThreeBodyOnly;
  const auto vr = SpectatorVariant::WithResidual;
  CHECK(spectator_coefficient(v3) == doctest::Approx(0.1875));
  CHECK(spectator_coefficient(vr) == doctest::Approx(1.1875));
  CHECK(spectator_infidelity(3, 1e-2, v3) == doctest::Approx(0.1875 * std::pow(1e-2 * kPi, 2)));
  CHECK(spectator_infidelity(2, 1e-2, v3) == 0.0);
  for (int n : {3, 5}) {
    const double r = simulate_spectator_infidelity(n, 1e-3, v3) / spectator_infidelity(n, 1e-3, v3);
    CHECK(r > 1.0);
    CHECK(r < 1.1);
  }
  CHECK(max_qubits(0.99, 1e-3, v3) == 75);
  CHECK(max_qubits(0.99, 1e-4, v3) == 737);
  CHECK(max_qubits(0.99, 1e-4, vr) == 294);
  CHECK(max_qubits(0.999, 1e-3, vr) == 11);
  CHECK(max_qubits(0.999, 1e-4, vr) == 94);
  CHECK_THROWS_AS(max_qubits(1.5, 1e-3, v3), ValidationError);
  CHECK(to_string(vr) == "with-residual");
  CHECK(spectator_variant_from_string("three-body-only") == v3);
}

TEST_CASE("partitioning-problem couplings are rank one") {
  const auto m = partitioning_model({1.0, -2.0, 0.5}, {0.1, 0.0, 0.2});
  const auto h = build_spin_hamiltonian(m);
  CHECK_FALSE(h.diagonal);
  const CMat d = h.dense();
  // <uuu|H|uuu> = 1/2 (a0a1 + a0a2 + a1a2) = 1/2 (-2 + 0.5 - 1)
  CHECK(d(0, 0).real() == doctest::Approx(-1.25));
  CHECK(hermiticity_error(d) < 1e-15);
}

TEST_CASE("quench: Ising evolution keeps populations, norm and energy") {
  const ChainConfig c(10.0, std::vector<AsqParams>(4, AsqParams{0, 0.3, 0.02, 0}), {0.0, 0.1, 0.2, 0.3});
  const auto q = ising_quench(c, coupling_report(c, true), {1, -1, 1, 1}, 100.0, 20);
  REQUIRE(q.times.size() == 21);
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    CHECK(q.z[k][1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(q.zz[k][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(q.norm[k] - 1.0) < 1e-12);
    CHECK(q.energy[k] == doctest::Approx(q.energy[0]).epsilon(1e-10));
  }
}

TEST_CASE("piecewise schedule equals consecutive propagators") {
  const ChainConfig c(10.0, std::vector<AsqParams>(3, AsqParams{0, 0.3, 0.05, 0.7}), {0.0, 0.0, 0.0});
  PulseSchedule s;
  s.segments.push_back({{0.0, 0.0, 0.0}, 10.0});
  s.segments.push_back({{0.25, 0.5, 0.1}, 7.0});
  CVec psi = CVec::Zero(8);
  psi(0) = psi(3) = std::sqrt(0.5);
  const CVec a = evolve(c, s, psi);
  const ChainConfig c1 = c.with_fluxes(s.segments[1].fluxes);
  const CVec mid = evolve(build_spin_hamiltonian(c, coupling_report(c, true)), 10.0, psi);
  const CVec b = evolve(build_spin_hamiltonian(c1, coupling_report(c1, true)), 7.0, mid);
  CHECK((a - b).norm() < 1e-12);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
}
