#include "asqchain/spin_core.hpp"

#include <bit>
#include <string>

#include "asqchain/report.hpp"

namespace asq {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

Mat2 pauli_z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Mat2 pauli_x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

// amperes per (GHz per radian): (pi/Phi0) * h * 1e9 = 2 pi e * 1e9
constexpr double kCurrentScale = kPi * kPlanck / kFluxQuantum * 1e9;

}  // namespace

AsqParams normalized(AsqParams p) {
  if (!finite_nonneg(p.e_j)) throw ValidationError("asq e_j must be finite and >= 0");
  if (!finite_nonneg(p.e_so)) throw ValidationError("asq e_so must be finite and >= 0");
  if (!finite_nonneg(p.e_z)) throw ValidationError("asq e_z must be finite and >= 0");
  if (!std::isfinite(p.theta)) throw ValidationError("asq theta must be finite");
  p.theta = std::abs(wrap_phase(p.theta));
  return p;
}

ChainConfig::ChainConfig(double e_j_coupling, std::vector<AsqParams> asqs, std::vector<double> fluxes)
    : e_j_(e_j_coupling), asqs_(std::move(asqs)), fluxes_(std::move(fluxes)) {
  if (!(std::isfinite(e_j_) && e_j_ > 0.0))
    throw ValidationError("e_j_coupling must be finite and > 0");
  if (asqs_.empty()) throw ValidationError("chain needs at least one qubit");
  if (asqs_.size() != fluxes_.size())
    throw ValidationError("chain has " + std::to_string(asqs_.size()) + " qubits but " +
                          std::to_string(fluxes_.size()) + " fluxes");
  for (auto& a : asqs_) a = normalized(a);
  for (auto& f : fluxes_) {
    if (!std::isfinite(f)) throw ValidationError("flux must be finite");
    f = wrap_flux(f);
  }
}

std::vector<double> ChainConfig::phases() const { return cumulative_phases(fluxes_); }

ChainConfig ChainConfig::with_fluxes(std::vector<double> fluxes) const {
  return ChainConfig(e_j_, asqs_, std::move(fluxes));
}

ChainConfig ChainConfig::with_asq(std::size_t i, const AsqParams& p) const {
  auto a = asqs_;
  a.at(i) = p;
  return ChainConfig(e_j_, std::move(a), fluxes_);
}

ChainConfig ChainConfig::with_e_j_coupling(double e_j) const { return ChainConfig(e_j, asqs_, fluxes_); }

void check_spins(const SpinConfiguration& spins, std::size_t n) {
  if (spins.size() != n)
    throw ValidationError("spin configuration has " + std::to_string(spins.size()) +
                          " entries, expected " + std::to_string(n));
  for (int s : spins)
    if (s != 1 && s != -1) throw ValidationError("spin entries must be +1 or -1");
}

SpinConfiguration spins_from_index(std::uint64_t index, std::size_t n) {
  SpinConfiguration s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ((index >> (n - 1 - i)) & 1u) ? -1 : 1;
  return s;
}

std::uint64_t index_from_spins(const SpinConfiguration& spins) {
  std::uint64_t idx = 0;
  for (int s : spins) idx = (idx << 1) | (s < 0 ? 1u : 0u);
  return idx;
}

std::vector<double> cumulative_phases(std::span<const double> fluxes) {
  std::vector<double> out;
  out.reserve(fluxes.size());
  double acc = 0.0;
  for (double f : fluxes) {
    acc += f;
    // keep the running sum small so the wrap stays exact for long chains
    acc -= std::floor(acc);
    out.push_back(wrap_phase(kTwoPi * acc));
  }
  return out;
}

Mat2 asq_hamiltonian(const AsqParams& asq, double phi) {
  Mat2 h = asq.e_j * std::cos(phi) * Mat2::Identity();
  h += (-asq.e_so * std::sin(phi) + 0.5 * asq.e_z * std::cos(asq.theta)) * pauli_z();
  h += 0.5 * asq.e_z * std::sin(asq.theta) * pauli_x();
  return h;
}

Mat2 current_operator(const AsqParams& asq, double phi) {
  if (asq.theta != 0.0)
    throw ValidationError("current operator requires an aligned Zeeman field (theta = 0)");
  // d/dphi of the 2x2 Hamiltonian; the Zeeman part is phase independent.
  Mat2 dh = -asq.e_j * std::sin(phi) * Mat2::Identity() - asq.e_so * std::cos(phi) * pauli_z();
  return kCurrentScale * dh;
}

double spin_supercurrent(const AsqParams& asq, double phi) {
  Mat2 i = current_operator(asq, phi);
  return (i(0, 0) - i(1, 1)).real();
}

RotatedCoupling rotate_coupling(double theta_1, double theta_2, double j) {
  const double c1 = std::cos(theta_1), s1 = std::sin(theta_1);
  const double c2 = std::cos(theta_2), s2 = std::sin(theta_2);
  return {j * c1 * c2, j * s1 * c2, j * c1 * s2, j * s1 * s2};
}

void SpinModel::add_term(double coeff, std::uint32_t x_mask, std::uint32_t z_mask) {
  if (coeff == 0.0) return;
  terms.push_back({coeff, x_mask, z_mask});
}

void SpinModel::add_rotated(int i, int j, const RotatedCoupling& rc) {
  add_term(0.5 * rc.j_zz, 0, bit(i) | bit(j));
  add_term(0.5 * rc.j_xz, bit(i), bit(j));
  add_term(0.5 * rc.j_zx, bit(j), bit(i));
  add_term(0.5 * rc.j_xx, bit(i) | bit(j), 0);
}

bool SpinModel::diagonal() const {
  for (const auto& t : terms)
    if (t.x_mask != 0) return false;
  return true;
}

RVec SpinOperatorMatrix::diagonal_entries() const {
  RVec d = RVec::Zero(static_cast<Eigen::Index>(dim()));
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(matrix, k); it; ++it)
      if (it.row() == it.col()) d(it.row()) += it.value().real();
  return d;
}

SpinOperatorMatrix build_spin_hamiltonian(const SpinModel& model, int max_qubits) {
  const int n = model.n_qubits;
  if (n < 1) throw ValidationError("spin model needs at least one qubit");
  if (n > max_qubits || n > 30)
    throw ValidationError("spin Hamiltonian with " + std::to_string(n) + " qubits exceeds the cap of " +
                          std::to_string(std::min(max_qubits, 30)));
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(dim * std::max<std::size_t>(1, model.terms.size()));
  for (const auto& t : model.terms) {
    if ((t.x_mask & t.z_mask) != 0) throw ValidationError("Pauli term acts twice on one site");
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(static_cast<std::uint32_t>(b) & t.z_mask) & 1) ? -1.0 : 1.0;
      trip.emplace_back(static_cast<Eigen::Index>(b ^ t.x_mask), static_cast<Eigen::Index>(b),
                        cplx(t.coeff * sign, 0.0));
    }
  }
  SpinOperatorMatrix out;
  out.n_qubits = n;
  out.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  out.diagonal = model.diagonal();
  return out;
}

SpinModel spin_model_from_report(const ChainConfig& config, const CouplingReport& report,
                                 bool include_triples) {
  const int n = static_cast<int>(config.size());
  if (report.size() != config.size() || report.pair.rows() != n || report.pair.cols() != n)
    throw ValidationError("coupling report does not match the chain size");
  SpinModel m(n);
  std::vector<double> c(n), s(n);
  for (int i = 0; i < n; ++i) {
    c[i] = std::cos(config.asq(i).theta);
    s[i] = std::sin(config.asq(i).theta);
  }
  // Single-qubit part in the Zeeman frame: the field lies along z, the
  // spin-orbit part (E_i minus the longitudinal Zeeman piece) along the
  // rotated axis (c z + s x). Reduces to 1/2 E_i Z for theta = 0.
  for (int i = 0; i < n; ++i) {
    const double ez = config.asq(i).e_z;
    const double so = report.energies[i] - ez * c[i];
    m.add_z(i, ez + so * c[i]);
    m.add_x(i, so * s[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double J = report.pair(i, j);
      if (J != 0.0) m.add_rotated(i, j, rotate_coupling(config.asq(i).theta, config.asq(j).theta, J));
    }
  if (include_triples) {
    for (const auto& t : report.triples) {
      if (t.value == 0.0) continue;
      const int q[3] = {t.i, t.j, t.k};
      for (int pick = 0; pick < 8; ++pick) {
        double w = 0.5 * t.value;
        std::uint32_t xm = 0, zm = 0;
        for (int a = 0; a < 3; ++a) {
          if (pick & (1 << a)) {
            w *= s[q[a]];
            xm |= m.bit(q[a]);
          } else {
            w *= c[q[a]];
            zm |= m.bit(q[a]);
          }
        }
        m.add_term(w, xm, zm);
      }
    }
  }
  return m;
}

SpinOperatorMatrix build_spin_hamiltonian(const ChainConfig& config, const CouplingReport& report,
                                          const BuildOptions& opt) {
  if (static_cast<int>(config.size()) > opt.max_qubits)
    throw ValidationError("spin Hamiltonian with " + std::to_string(config.size()) +
                          " qubits exceeds the cap of " + std::to_string(opt.max_qubits));
  return build_spin_hamiltonian(spin_model_from_report(config, report, opt.include_triples), opt.max_qubits);
}

double hermiticity_error(const CMat& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace asq
