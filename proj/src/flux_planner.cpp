#include "asqchain/flux_planner.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include "asqchain/coupling.hpp"

namespace asq {

std::string to_string(PhaseTag t) {
  switch (t) {
    case PhaseTag::On0: return "on-0";
    case PhaseTag::OnPi: return "on-pi";
    case PhaseTag::OffPlus: return "off-plus";
    case PhaseTag::OffMinus: return "off-minus";
    case PhaseTag::Free: return "free";
  }
  return "free";
}

PhaseTag phase_tag_from_string(const std::string& s) {
  for (auto t : {PhaseTag::On0, PhaseTag::OnPi, PhaseTag::OffPlus, PhaseTag::OffMinus, PhaseTag::Free})
    if (to_string(t) == s) return t;
  throw ValidationError("unknown phase tag '" + s + "'");
}

std::string to_string(PairClass c) {
  switch (c) {
    case PairClass::OnOn: return "on_on";
    case PairClass::OnOff: return "on_off";
    case PairClass::OffOff: return "off_off";
  }
  return "on_on";
}

namespace {

// quarter turns: 0 -> 0, 1 -> +pi/2, 2 -> pi, 3 -> -pi/2
PhaseTag tag_of_quarter(int q) {
  static constexpr std::array<PhaseTag, 4> tags{PhaseTag::On0, PhaseTag::OffPlus, PhaseTag::OnPi,
                                                PhaseTag::OffMinus};
  return tags[q & 3];
}

double phase_of_quarter(int q) { return wrap_phase(0.5 * kPi * (q & 3)); }

PhaseTarget target_of_quarter(int q) { return {tag_of_quarter(q), phase_of_quarter(q)}; }

int idle_quarter(int i) { return i % 2 == 0 ? 1 : 3; }

bool has_spin_independent_energy(const ChainConfig& c) {
  for (const auto& a : c.asqs())
    if (a.e_j != 0.0) return true;
  return false;
}

void check_count(int n) {
  if (n < 1) throw ValidationError("plan needs at least one qubit");
  if (n > 4096) throw ValidationError("plan qubit count too large");
}

}  // namespace

std::vector<double> fluxes_from_phases(const std::vector<double>& theta) {
  std::vector<double> f(theta.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    f[i] = wrap_flux((theta[i] - prev) / kTwoPi);
    prev = theta[i];
  }
  return f;
}

FluxPlan plan_idle(int n) {
  check_count(n);
  std::vector<PhaseTarget> t;
  for (int i = 0; i < n; ++i) t.push_back(target_of_quarter(idle_quarter(i)));
  return realize_targets(std::move(t));
}

FluxPlan realize_targets(std::vector<PhaseTarget> targets, const std::optional<ChainConfig>& config) {
  const std::size_t n = targets.size();
  if (n == 0) throw ValidationError("plan needs at least one qubit");
  if (config && config->size() != n)
    throw ValidationError("plan has " + std::to_string(n) + " targets but the chain has " +
                          std::to_string(config->size()) + " qubits");
  FluxPlan plan;
  plan.targets = std::move(targets);

  auto build = [&](double offset) {
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = plan.targets[i].phase + offset;
    return fluxes_from_phases(theta);
  };

  double offset = 0.0;
  plan.fluxes = build(offset);
  plan.iterations = 1;
  if (!config || !has_spin_independent_energy(*config)) {
    plan.converged = true;
    return plan;
  }
  // Plain fixed-point iteration; contracts at a rate ~ E_J,i / E_J.
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 100; ++it) {
    offset = effective_total_ej(config->with_fluxes(plan.fluxes)).phase_offset;
    auto next = build(offset);
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) step = std::max(step, std::abs(flux_distance(next[i], plan.fluxes[i])));
    plan.fluxes = std::move(next);
    plan.phase_offset_used = offset;
    plan.iterations = it + 1;
    if (step < 1e-12) {
      plan.converged = true;
      return plan;
    }
    if (it > 10 && step > last_step) break;  // diverging
    last_step = step;
  }
  throw ConvergenceError("Etilde phase fixed point did not converge after " + std::to_string(plan.iterations) +
                         " iterations");
}

FluxPlan plan_roles(const std::vector<Role>& roles, const std::optional<ChainConfig>& config) {
  const int n = static_cast<int>(roles.size());
  check_count(n);
  auto options = [&](int i) -> std::array<int, 2> {
    return roles[i] == Role::On ? std::array<int, 2>{0, 2} : std::array<int, 2>{1, 3};
  };
  // Flux of loop i in quarter units is q_i - q_{i-1}; idle has 1, 2, 2, ...
  auto loop_cost = [&](int i, int q_prev, int q) {
    const int idle = i == 0 ? 1 : 2;
    const int d = ((q - q_prev - idle) % 4 + 4) % 4;
    return std::min(d, 4 - d);
  };
  // cost_to_go[i][q]: cheapest total for loops i+1..n-1 given q_i = q
  std::vector<std::array<int, 4>> ctg(n);
  for (auto& a : ctg) a.fill(std::numeric_limits<int>::max() / 4);
  for (int q : options(n - 1)) ctg[n - 1][q] = 0;
  for (int i = n - 2; i >= 0; --i)
    for (int q : options(i))
      for (int q2 : options(i + 1)) ctg[i][q] = std::min(ctg[i][q], loop_cost(i + 1, q, q2) + ctg[i + 1][q2]);

  std::vector<PhaseTarget> targets;
  int q_prev = 0;
  for (int i = 0; i < n; ++i) {
    int best = -1, best_cost = std::numeric_limits<int>::max();
    for (int q : options(i)) {  // preferred option first, so ties keep it
      const int c = loop_cost(i, q_prev, q) + ctg[i][q];
      if (c < best_cost) {
        best = q;
        best_cost = c;
      }
    }
    targets.push_back(target_of_quarter(best));
    q_prev = best;
  }
  return realize_targets(std::move(targets), config);
}

FluxPlan plan_pair(int n, int m, const ChainConfig& config) {
  const int size = static_cast<int>(config.size());
  if (n < 0 || m < 0 || n >= size || m >= size) throw ValidationError("pair index out of range");
  if (n == m) throw ValidationError("pair needs two distinct qubits");
  std::vector<Role> roles(size, Role::Off);
  roles[n] = roles[m] = Role::On;
  return plan_roles(roles, config);
}

FluxPlan plan_all_to_all(int n, AllToAllVariant variant, const std::optional<ChainConfig>& config) {
  if (n < 2) throw ValidationError("all-to-all plan needs at least two qubits");
  check_count(n);
  std::vector<PhaseTarget> t;
  for (int i = 0; i < n; ++i)
    t.push_back(target_of_quarter(variant == AllToAllVariant::Alternating && i % 2 == 1 ? 2 : 0));
  return realize_targets(std::move(t), config);
}

FluxPlan plan_readout(int target, ReadoutMode mode, int n, const std::optional<ChainConfig>& config) {
  check_count(n);
  if (target < 0 || target >= n) throw ValidationError("readout target out of range");
  const Role others = mode == ReadoutMode::OffTarget ? Role::On : Role::Off;
  std::vector<Role> roles(n, others);
  roles[target] = mode == ReadoutMode::OffTarget ? Role::Off : Role::On;
  return plan_roles(roles, config);
}

FluxPlan plan_joint_readout(int n, const std::optional<ChainConfig>& config) {
  check_count(n);
  return realize_targets(std::vector<PhaseTarget>(n, target_of_quarter(1)), config);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser over (seed, index)
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

ClassSummary summarize(std::vector<double> v) {
  ClassSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  s.max = *std::max_element(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) {
    s.median = v[mid];
  } else {
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    s.median = 0.5 * (lo + hi);
  }
  return s;
}

FluxNoiseStats crosstalk_monte_carlo(const ChainConfig& config, const FluxPlan& plan, double delta, int samples,
                                     std::uint64_t seed, bool keep_records) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be finite and >= 0");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  const int n = static_cast<int>(config.size());
  if (plan.size() != config.size() || plan.targets.size() != config.size())
    throw ValidationError("plan and chain sizes differ");

  FluxNoiseStats st;
  std::vector<double> e_so(n);
  for (int i = 0; i < n; ++i) e_so[i] = config.asq(i).e_so;
  std::vector<double> fl(n), c(n);
  for (int k = 0; k < samples; ++k) {
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(k)));
    std::uniform_real_distribution<double> u(-delta, delta);
    for (int i = 0; i < n; ++i) fl[i] = plan.fluxes[i] + (delta > 0.0 ? u(rng) : 0.0);
    const auto perturbed = config.with_fluxes(fl);
    const auto et = effective_total_ej(perturbed);
    const auto th = perturbed.phases();
    for (int i = 0; i < n; ++i) c[i] = std::cos(th[i] - et.phase_offset);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double J = -2.0 * e_so[i] * e_so[j] / et.magnitude * c[i] * c[j];
        const bool a = is_on(plan.targets[i].tag), b = is_on(plan.targets[j].tag);
        const PairClass cls = a && b ? PairClass::OnOn : (a || b ? PairClass::OnOff : PairClass::OffOff);
        (cls == PairClass::OnOn ? st.on_on : cls == PairClass::OnOff ? st.on_off : st.off_off).push_back(std::abs(J));
        if (keep_records) st.records.push_back({k, i, j, cls, J});
      }
  }
  st.on_on_summary = summarize(st.on_on);
  st.on_off_summary = summarize(st.on_off);
  st.off_off_summary = summarize(st.off_off);
  return st;
}

BiasModel::BiasModel(RMat mutual, RVec offsets) : mutual_(std::move(mutual)), offsets_(std::move(offsets)) {
  const auto n = mutual_.rows();
  if (n < 1 || mutual_.cols() != n) throw ValidationError("mutual matrix must be square and non-empty");
  if (offsets_.size() != n) throw ValidationError("offsets length must match the mutual matrix");
  if (!mutual_.allFinite() || !offsets_.allFinite()) throw ValidationError("bias model entries must be finite");
  Eigen::FullPivLU<RMat> lu(mutual_);
  if (!lu.isInvertible()) throw ValidationError("mutual matrix is singular");
  dominance_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off += std::abs(mutual_(i, j));
    if (off > 0.0) dominance_ = std::min(dominance_, std::abs(mutual_(i, i)) / off);
  }
}

RVec BiasModel::currents(const RVec& fluxes) const {
  if (fluxes.size() != offsets_.size()) throw ValidationError("flux vector length does not match the bias model");
  return mutual_.fullPivLu().solve(fluxes - offsets_);
}

RVec currents_for_plan(const BiasModel& model, const FluxPlan& plan) {
  RVec f = Eigen::Map<const RVec>(plan.fluxes.data(), static_cast<Eigen::Index>(plan.fluxes.size()));
  return model.currents(f);
}

}  // namespace asq
