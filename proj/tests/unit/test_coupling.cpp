#include <doctest.h>

#include "asqchain/coupling.hpp"
#include "asqchain/flux_planner.hpp"

using namespace asq;

namespace {
ChainConfig chain(std::vector<double> e_so, std::vector<double> fluxes, double e_j = 10.0,
                  std::vector<double> e_ji = {}) {
  std::vector<AsqParams> a;
  for (std::size_t i = 0; i < e_so.size(); ++i) a.push_back({e_ji.empty() ? 0.0 : e_ji[i], e_so[i], 0, 0});
  return ChainConfig(e_j, a, fluxes);
}
}  // namespace

TEST_CASE("pairwise coupling at ON: J = -2 E_SO,i E_SO,j / E_J") {
  CHECK(pairwise_coupling(chain({0.3, 0.3}, {0, 0}), 0, 1) == doctest::Approx(-0.018).epsilon(1e-14));
  CHECK(pairwise_coupling(chain({0.3, 0.3}, {0, 0}, 30.0), 0, 1) == doctest::Approx(-0.006).epsilon(1e-14));
  CHECK(pairwise_coupling(chain({1.0, 1.0}, {0, 0}, 1000.0), 0, 1) == doctest::Approx(-0.002).epsilon(1e-14));
  // one ON at 0, the other at pi: sign flips
  CHECK(pairwise_coupling(chain({0.3, 0.3}, {0, 0.5}), 0, 1) == doctest::Approx(0.018).epsilon(1e-14));
  CHECK_THROWS_AS(pairwise_coupling(chain({0.3, 0.3}, {0, 0}), 0, 0), ValidationError);
  CHECK_THROWS_AS(pairwise_coupling(chain({0.3, 0.3}, {0, 0}), 0, 2), ValidationError);
}

TEST_CASE("OFF annihilates, symmetry, bilinear scaling") {
  const auto c = chain({0.3, 0.2, 0.25}, {0.25, 0.1, 0.3});
  for (int j : {1, 2}) CHECK(std::abs(pairwise_coupling(c, 0, j)) < 1e-18);
  const auto r = coupling_report(c);
  CHECK(r.pair(1, 2) == r.pair(2, 1));
  const auto c2 = chain({0.6, 0.4, 0.5}, {0.25, 0.1, 0.3});
  CHECK(coupling_report(c2).pair(1, 2) == doctest::Approx(4.0 * r.pair(1, 2)).epsilon(1e-14));
}

TEST_CASE("effective total Josephson energy") {
  // E = 10 - 1 * e^{i pi/2} = 10 - i
  const auto e = effective_total_ej(chain({0.0}, {0.25}, 10.0, {1.0}));
  CHECK(e.magnitude == doctest::Approx(std::sqrt(101.0)));
  CHECK(e.phase_offset == doctest::Approx(-std::atan(0.1)));
  CHECK_THROWS_AS(effective_total_ej(chain({0.0}, {0.0}, 1.0, {1.0})), DegenerateCouplingError);
}

TEST_CASE("planning against phi_E restores exact zeros with E_J,i > 0") {
  const auto base = chain({0.3, 0.3, 0.3, 0.3}, {0, 0, 0, 0}, 10.0, {0.4, 0.2, 0.0, 0.7});
  const auto plan = plan_pair(0, 2, base);
  REQUIRE(plan.converged);
  const auto r = coupling_report(base.with_fluxes(plan.fluxes));
  CHECK(std::abs(r.pair(0, 1)) < 1e-15);
  CHECK(std::abs(r.pair(1, 3)) < 1e-15);
  CHECK(std::abs(r.pair(0, 2)) > 0.017);
  // a naive plan that ignores phi_E leaves residual coupling
  const auto naive = plan_pair(0, 2, chain({0.3, 0.3, 0.3, 0.3}, {0, 0, 0, 0}));
  CHECK(std::abs(coupling_report(base.with_fluxes(naive.fluxes)).pair(0, 1)) > 1e-6);
}

TEST_CASE("three-body terms: phase-offset piece equals twice the denominator piece") {
  const auto c = chain({0.1, 0.08, 0.12}, {0.1, 0.2, 0.33}, 10.0, {0.05, 0.0, 0.1});
  const auto r = coupling_report(c, true);
  REQUIRE(r.triples.size() == 1);
  CHECK(r.triples[0].phase_offset == doctest::Approx(2.0 * r.triples[0].denominator).epsilon(1e-12));
  CHECK(r.triple(2, 0, 1) == r.triples[0].value);
  CHECK(coupling_report(c, false).triples.empty());
}

TEST_CASE("Walsh decomposition inverts a known diagonal") {
  // E(s) = 0.7 + 1/2 (0.1 s0 - 0.2 s2) + 1/2 (0.3 s0 s1) + 1/2 (0.05 s0 s1 s2)
  std::vector<double> table(8);
  for (std::uint64_t k = 0; k < 8; ++k) {
    const auto s = spins_from_index(k, 3);
    table[k] = 0.7 + 0.5 * (0.1 * s[0] - 0.2 * s[2]) + 0.5 * 0.3 * s[0] * s[1] + 0.5 * 0.05 * s[0] * s[1] * s[2];
  }
  const auto w = extract_couplings_walsh(table);
  CHECK(w.c0 == doctest::Approx(0.7));
  CHECK(w.report.energies[0] == doctest::Approx(0.1));
  CHECK(w.report.energies[1] == doctest::Approx(0.0));
  CHECK(w.report.energies[2] == doctest::Approx(-0.2));
  CHECK(w.report.pair(0, 1) == doctest::Approx(0.3));
  CHECK(w.report.pair(1, 2) == doctest::Approx(0.0));
  CHECK(w.report.triple(0, 1, 2) == doctest::Approx(0.05));
  CHECK_THROWS_AS(extract_couplings_walsh(std::vector<double>(6, 0.0)), ValidationError);
}

TEST_CASE("classical oracle agrees with the closed form at small E_SO / E_J") {
  const auto c = chain({0.05, 0.04, 0.06}, {0.05, 0.3, 0.12}, 10.0);
  const auto w = extract_couplings_walsh(classical_energy_table(c));
  const auto r = coupling_report(c, true);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(std::abs(w.report.pair(i, j) - r.pair(i, j)) < 3 * 0.006 * 2 * 0.06 * 0.06 / 10.0);
  CHECK(std::abs(w.report.triple(0, 1, 2) - r.triple(0, 1, 2)) < 3 * 0.006 * 2 * 0.05 * 0.04 * 0.06 / 100.0);
}
