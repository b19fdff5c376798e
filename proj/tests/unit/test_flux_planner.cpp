#include <doctest.h>

#include <set>

#include "asqchain/coupling.hpp"
#include "asqchain/flux_planner.hpp"

using namespace asq;

namespace {
ChainConfig uniform(int n, double e_so = 0.3, double e_ji = 0.0) {
  return ChainConfig(10.0, std::vector<AsqParams>(n, AsqParams{e_ji, e_so, 0, 0}), std::vector<double>(n, 0.0));
}
}  // namespace

TEST_CASE("tag strings") {
  for (auto t : {PhaseTag::On0, PhaseTag::OnPi, PhaseTag::OffPlus, PhaseTag::OffMinus})
    CHECK(phase_tag_from_string(to_string(t)) == t);
  CHECK(to_string(PhaseTag::OffPlus) == "off-plus");
  CHECK(to_string(PairClass::OnOff) == "on_off");
  CHECK_THROWS_AS(phase_tag_from_string("sideways"), ValidationError);
}

TEST_CASE("idle plan: every qubit OFF, no coupling") {
  const auto p = plan_idle(5);
  CHECK(p.converged);
  for (const auto& t : p.targets) CHECK_FALSE(is_on(t.tag));
  const auto r = coupling_report(uniform(5).with_fluxes(p.fluxes));
  CHECK(r.pair.cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("plan_pair only touches loops adjacent to the selected qubits") {
  const int n = 10;
  const auto idle = plan_idle(n);
  const auto p = plan_pair(2, 7, uniform(n));
  std::set<int> allowed{2, 3, 7, 8};
  for (int i = 0; i < n; ++i)
    if (!allowed.count(i)) CHECK(p.fluxes[i] == idle.fluxes[i]);
  const auto r = coupling_report(uniform(n).with_fluxes(p.fluxes));
  CHECK(std::abs(r.pair(2, 7)) == doctest::Approx(0.018).epsilon(1e-12));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(i == 2 && j == 7)) CHECK(std::abs(r.pair(i, j)) < 1e-15);
}

TEST_CASE("all-to-all variants couple every pair with equal magnitude") {
  for (auto v : {AllToAllVariant::Uniform, AllToAllVariant::Alternating}) {
    const auto p = plan_all_to_all(4, v, uniform(4));
    const auto r = coupling_report(uniform(4).with_fluxes(p.fluxes));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) CHECK(std::abs(r.pair(i, j)) == doctest::Approx(0.018));
  }
}

TEST_CASE("fixed point with spin-independent junction energies") {
  const auto cfg = uniform(5, 0.3, 0.4);
  const auto p = plan_roles({Role::On, Role::Off, Role::On, Role::Off, Role::Off}, cfg);
  REQUIRE(p.converged);
  const auto c = cfg.with_fluxes(p.fluxes);
  const auto th = c.phases();
  const double pe = effective_total_ej(c).phase_offset;
  for (int i = 0; i < 5; ++i) CHECK(std::abs(wrap_phase(th[i] - pe - p.targets[i].phase)) < 1e-10);
}

TEST_CASE("readout plans") {
  const auto off = plan_readout(1, ReadoutMode::OffTarget, 3, uniform(3));
  CHECK_FALSE(is_on(off.targets[1].tag));
  const auto on = plan_readout(1, ReadoutMode::OnTarget, 3, uniform(3));
  CHECK(is_on(on.targets[1].tag));
  const auto joint = plan_joint_readout(3);
  for (const auto& t : joint.targets) CHECK(t.tag == PhaseTag::OffPlus);
}

TEST_CASE("flux-noise Monte Carlo: class counts, determinism, seed dependence") {
  const auto cfg0 = uniform(10);
  const auto plan = plan_pair(2, 7, cfg0);
  const auto cfg = cfg0.with_fluxes(plan.fluxes);
  const auto a = crosstalk_monte_carlo(cfg, plan, 1e-3, 50, 11, true);
  CHECK(a.on_on.size() == 50);
  CHECK(a.on_off.size() == 50 * 16);
  CHECK(a.off_off.size() == 50 * 28);
  CHECK(a.records.size() == 50 * 45);
  const auto b = crosstalk_monte_carlo(cfg, plan, 1e-3, 50, 11);
  CHECK(a.off_off == b.off_off);
  CHECK(b.records.empty());
  const auto c = crosstalk_monte_carlo(cfg, plan, 1e-3, 50, 12);
  CHECK(a.off_off != c.off_off);
  // the first samples do not depend on how many are drawn
  const auto d = crosstalk_monte_carlo(cfg, plan, 1e-3, 10, 11);
  CHECK(std::equal(d.on_on.begin(), d.on_on.end(), a.on_on.begin()));
  CHECK(a.on_off_summary.median < 1e-2 * a.on_on_summary.median);
  CHECK(a.off_off_summary.median < 1e-2 * a.on_off_summary.median);
}

TEST_CASE("summaries") {
  const auto s = summarize({3.0, 1.0, 2.0, 4.0});
  CHECK(s.count == 4);
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.max == doctest::Approx(4.0));
}

TEST_CASE("bias model inversion and dominance") {
  RMat m(2, 2);
  m << 0.01, 0.001, 0.0005, 0.02;
  const BiasModel b(m, RVec::Constant(2, 0.1));
  const RVec f = (RVec(2) << 0.3, 0.7).finished();
  CHECK((b.fluxes(b.currents(f)) - f).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.dominance_ratio() == doctest::Approx(10.0));
  CHECK_THROWS_AS(BiasModel(RMat::Zero(2, 3), RVec::Zero(2)), ValidationError);
  const auto plan = plan_pair(0, 1, uniform(2));
  const RVec cur = currents_for_plan(b, plan);
  for (int i = 0; i < 2; ++i) CHECK(wrap_flux(b.fluxes(cur)(i)) == doctest::Approx(plan.fluxes[i]));
}
