#include "asqchain/coupling.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace asq {

std::string to_string(CouplingOrder o) {
  return o == CouplingOrder::FirstOrder ? "first-order" : "three-body";
}

double CouplingReport::triple(int i, int j, int k) const {
  int q[3] = {i, j, k};
  std::sort(q, q + 3);
  for (const auto& t : triples)
    if (t.i == q[0] && t.j == q[1] && t.k == q[2]) return t.value;
  return 0.0;
}

EffectiveEj effective_total_ej(const ChainConfig& config, const std::optional<SpinConfiguration>& spins) {
  const auto theta = config.phases();
  if (spins) check_spins(*spins, config.size());
  cplx e(config.e_j_coupling(), 0.0);
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    e -= std::polar(a.e_j, theta[l]);
    if (spins) e -= static_cast<double>((*spins)[l]) * std::polar(a.e_so, 0.5 * kPi + theta[l]);
  }
  const double mag = std::abs(e);
  if (mag < 1e-6 * config.e_j_coupling())
    throw DegenerateCouplingError("effective Josephson energy |Etilde| = " + std::to_string(mag) +
                                  " GHz is degenerate");
  return {mag, wrap_phase(std::arg(e))};
}

namespace {

void check_index(const ChainConfig& c, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= c.size())
    throw ValidationError("qubit index " + std::to_string(i) + " out of range");
}

}  // namespace

double pairwise_coupling(const ChainConfig& config, int i, int j) {
  check_index(config, i);
  check_index(config, j);
  if (i == j) throw ValidationError("pairwise coupling needs two distinct qubits");
  const auto et = effective_total_ej(config);
  const auto th = config.phases();
  return -2.0 * config.asq(i).e_so * config.asq(j).e_so / et.magnitude * std::cos(th[i] - et.phase_offset) *
         std::cos(th[j] - et.phase_offset);
}

CouplingReport coupling_report(const ChainConfig& config, bool include_triples) {
  const auto et = effective_total_ej(config);
  const auto th = config.phases();
  const int n = static_cast<int>(config.size());
  std::vector<double> c(n), s(n), eps(n);
  for (int i = 0; i < n; ++i) {
    const double rel = th[i] - et.phase_offset;
    c[i] = std::cos(rel);
    s[i] = std::sin(rel);
    eps[i] = config.asq(i).e_so / et.magnitude;
  }

  CouplingReport r;
  r.order = include_triples ? CouplingOrder::WithTriples : CouplingOrder::FirstOrder;
  r.energies.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& a = config.asq(i);
    r.energies[i] = -2.0 * a.e_so * s[i] + a.e_z * std::cos(a.theta);
  }
  r.pair = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double J = -2.0 * config.asq(i).e_so * config.asq(j).e_so / et.magnitude * c[i] * c[j];
      r.pair(i, j) = r.pair(j, i) = J;
    }
  if (!include_triples) return r;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (eps[i] == 0.0 || eps[j] == 0.0 || eps[k] == 0.0) continue;
        TripleCoupling t{i, j, k};
        // |Etilde| picks up -s_k E_SO,k sin(theta_k - phi_E) from the third spin.
        t.denominator = -(r.pair(i, j) * eps[k] * s[k] + r.pair(i, k) * eps[j] * s[j] +
                          r.pair(j, k) * eps[i] * s[i]);
        // arg(Etilde) shifts by -s_k eps_k cos(theta_k - phi_E); dJ/dphi_E times that.
        auto dj = [&](int a, int b) {
          return -2.0 * config.asq(a).e_so * config.asq(b).e_so / et.magnitude * (s[a] * c[b] + c[a] * s[b]);
        };
        t.phase_offset = dj(i, j) * (-eps[k] * c[k]) + dj(i, k) * (-eps[j] * c[j]) + dj(j, k) * (-eps[i] * c[i]);
        // The exact third-order expansion of |Etilde(s)| equals the denominator
        // term alone; the phase-offset piece is already contained in it
        // (phase_offset == 2 * denominator identically) and is kept for reference.
        t.value = t.denominator;
        r.triples.push_back(t);
      }
  return r;
}

namespace {

struct Potential {
  double ej;
  std::vector<double> a_cos;  // coefficient of cos(phi + theta_l)
  std::vector<double> a_sin;  // coefficient of sin(phi + theta_l)
  std::vector<double> theta;
  double constant = 0.0;

  double value(double phi) const {
    const double h = std::sin(0.5 * phi);
    double u = 2.0 * ej * h * h + constant;
    for (std::size_t l = 0; l < theta.size(); ++l)
      u += a_cos[l] * std::cos(phi + theta[l]) + a_sin[l] * std::sin(phi + theta[l]);
    return u;
  }
  double slope(double phi) const {
    double d = ej * std::sin(phi);
    for (std::size_t l = 0; l < theta.size(); ++l)
      d += -a_cos[l] * std::sin(phi + theta[l]) + a_sin[l] * std::cos(phi + theta[l]);
    return d;
  }
  double curvature(double phi) const {
    double d = ej * std::cos(phi);
    for (std::size_t l = 0; l < theta.size(); ++l)
      d += -a_cos[l] * std::cos(phi + theta[l]) - a_sin[l] * std::sin(phi + theta[l]);
    return d;
  }
};

}  // namespace

double classical_energy_oracle(const ChainConfig& config, const SpinConfiguration& spins) {
  check_spins(spins, config.size());
  Potential p;
  p.ej = config.e_j_coupling();
  p.theta = config.phases();
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto& a = config.asq(l);
    if (a.e_z > 0.0 && a.theta != 0.0)
      throw ValidationError("classical oracle requires aligned Zeeman fields");
    p.a_cos.push_back(a.e_j);
    p.a_sin.push_back(-spins[l] * a.e_so);
    p.constant += 0.5 * spins[l] * a.e_z;
  }

  // Bracket every local minimum on a uniform grid of (-pi, pi].
  constexpr int kGrid = 256;
  std::vector<std::pair<double, double>> brackets;
  double prev_phi = -kPi;
  double prev_d = p.slope(prev_phi);
  for (int g = 1; g <= kGrid; ++g) {
    const double phi = -kPi + kTwoPi * g / kGrid;
    const double d = p.slope(phi);
    if (prev_d < 0.0 && d >= 0.0) brackets.emplace_back(prev_phi, phi);
    prev_phi = phi;
    prev_d = d;
  }
  if (brackets.empty()) throw ConvergenceError("classical oracle found no minimum");
  if (brackets.size() > 1)
    throw ConvergenceError("classical oracle found " + std::to_string(brackets.size()) +
                           " minima; the coupling junction does not dominate");

  auto [lo, hi] = brackets.front();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d = p.slope(mid);
    if (d == 0.0) {
      lo = hi = mid;
      break;
    }
    (d < 0.0 ? lo : hi) = mid;
  }
  const double phi = 0.5 * (lo + hi);
  if (!(std::abs(p.slope(phi)) < 1e-12 * std::max(1.0, p.ej)))
    throw ConvergenceError("classical oracle bisection did not converge");
  if (!(p.curvature(phi) > 0.0)) throw ConvergenceError("classical oracle stationary point is not a minimum");
  return p.value(phi);
}

std::vector<double> classical_energy_table(const ChainConfig& config) {
  const std::size_t n = config.size();
  if (n > 20) throw ValidationError("energy table limited to 20 qubits");
  std::vector<double> out(std::size_t{1} << n);
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = classical_energy_oracle(config, spins_from_index(b, n));
  return out;
}

WalshDecomposition extract_couplings_walsh(std::span<const double> table) {
  const std::size_t size = table.size();
  if (size < 2 || !std::has_single_bit(size))
    throw ValidationError("energy table must have 2^N entries, got " + std::to_string(size));
  const int n = std::countr_zero(size);
  std::vector<double> w(table.begin(), table.end());
  for (std::size_t h = 1; h < size; h <<= 1)
    for (std::size_t a = 0; a < size; a += 2 * h)
      for (std::size_t b = a; b < a + h; ++b) {
        const double x = w[b], y = w[b + h];
        w[b] = x + y;
        w[b + h] = x - y;
      }
  for (auto& x : w) x /= static_cast<double>(size);

  auto bit = [n](int i) { return std::size_t{1} << (n - 1 - i); };
  WalshDecomposition out;
  out.c0 = w[0];
  out.coefficients = w;
  auto& r = out.report;
  r.order = n >= 3 ? CouplingOrder::WithTriples : CouplingOrder::FirstOrder;
  r.energies.resize(n);
  r.pair = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) r.energies[i] = 2.0 * w[bit(i)];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r.pair(i, j) = r.pair(j, i) = 2.0 * w[bit(i) | bit(j)];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double v = 2.0 * w[bit(i) | bit(j) | bit(k)];
        r.triples.push_back({i, j, k, 0.0, 0.0, v});
      }
  return out;
}

WalshDecomposition extract_couplings_walsh(const std::map<SpinConfiguration, double>& table) {
  if (table.empty()) throw ValidationError("empty energy table");
  const std::size_t n = table.begin()->first.size();
  if (n == 0 || n > 30) throw ValidationError("energy table qubit count out of range");
  const std::size_t size = std::size_t{1} << n;
  if (table.size() != size)
    throw ValidationError("incomplete energy table: " + std::to_string(table.size()) + " of " +
                          std::to_string(size) + " configurations");
  std::vector<double> flat(size);
  for (const auto& [spins, e] : table) {
    check_spins(spins, n);
    flat[index_from_spins(spins)] = e;
  }
  return extract_couplings_walsh(flat);
}

}  // namespace asq
