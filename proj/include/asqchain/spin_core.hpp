#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "asqchain/common.hpp"

namespace asq {

// Per-qubit circuit parameters. All energies are frequencies E/h in GHz.
struct AsqParams {
  double e_j = 0.0;   // spin-independent Josephson energy
  double e_so = 0.0;  // spin-dependent Josephson energy
  double e_z = 0.0;   // Zeeman magnitude
  double theta = 0.0; // angle between Zeeman field and zero-field spin axis
};

// Validates and folds theta into [0, pi]. A reflection of the x axis maps
// theta -> -theta, so only |wrap(theta)| carries information.
AsqParams normalized(AsqParams p);

// Immutable description of the chain. Fluxes are stored modulo 1 (units of Phi0).
class ChainConfig {
 public:
  ChainConfig(double e_j_coupling, std::vector<AsqParams> asqs, std::vector<double> fluxes);

  double e_j_coupling() const { return e_j_; }
  const std::vector<AsqParams>& asqs() const { return asqs_; }
  const AsqParams& asq(std::size_t i) const { return asqs_.at(i); }
  const std::vector<double>& fluxes() const { return fluxes_; }
  std::size_t size() const { return asqs_.size(); }

  // Cumulative phase drops across the qubits, in (-pi, pi].
  std::vector<double> phases() const;

  ChainConfig with_fluxes(std::vector<double> fluxes) const;
  ChainConfig with_asq(std::size_t i, const AsqParams& p) const;
  ChainConfig with_e_j_coupling(double e_j) const;

 private:
  double e_j_;
  std::vector<AsqParams> asqs_;
  std::vector<double> fluxes_;
};

// Signs s_l of sigma^z_l, one per qubit; +1 is "up".
using SpinConfiguration = std::vector<int>;

void check_spins(const SpinConfiguration& spins, std::size_t n);

// Basis index <-> spins. Qubit 0 is the most significant bit, bit 0 means s=+1.
SpinConfiguration spins_from_index(std::uint64_t index, std::size_t n);
std::uint64_t index_from_spins(const SpinConfiguration& spins);

// phi_i = 2 pi sum_{j<=i} Phi_j, wrapped to (-pi, pi].
std::vector<double> cumulative_phases(std::span<const double> fluxes);

// 2x2 single-qubit Hamiltonian at phase drop phi (GHz).
Mat2 asq_hamiltonian(const AsqParams& asq, double phi);

// (pi/Phi0) dH/dphi in amperes. Only defined for an aligned field.
Mat2 current_operator(const AsqParams& asq, double phi);

// Difference of the spin-up and spin-down supercurrents (amperes).
double spin_supercurrent(const AsqParams& asq, double phi);

struct RotatedCoupling {
  double j_zz = 0.0;
  double j_xz = 0.0;  // sigma^x on the first qubit, sigma^z on the second
  double j_zx = 0.0;
  double j_xx = 0.0;
};

// Longitudinal coupling J re-expressed in the Zeeman eigenbases of both qubits.
RotatedCoupling rotate_coupling(double theta_1, double theta_2, double j);

// coeff * prod_{x bits} X * prod_{z bits} Z; at most one Pauli per site.
struct PauliTerm {
  double coeff = 0.0;
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;
};

// Pauli-sum description of a spin Hamiltonian (GHz). Helpers take the
// conventional factor 1/2 so that e.g. add_zz(i, j, J) adds J/2 Z_i Z_j.
struct SpinModel {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  explicit SpinModel(int n = 0) : n_qubits(n) {}

  std::uint32_t bit(int i) const { return 1u << (n_qubits - 1 - i); }
  void add_term(double coeff, std::uint32_t x_mask, std::uint32_t z_mask);
  void add_z(int i, double e) { add_term(0.5 * e, 0, bit(i)); }
  void add_x(int i, double e) { add_term(0.5 * e, bit(i), 0); }
  void add_zz(int i, int j, double J) { add_term(0.5 * J, 0, bit(i) | bit(j)); }
  void add_xx(int i, int j, double J) { add_term(0.5 * J, bit(i) | bit(j), 0); }
  void add_zzz(int i, int j, int k, double J) { add_term(0.5 * J, 0, bit(i) | bit(j) | bit(k)); }
  void add_rotated(int i, int j, const RotatedCoupling& rc);
  bool diagonal() const;
};

struct SpinOperatorMatrix {
  int n_qubits = 0;
  Eigen::SparseMatrix<cplx> matrix;
  bool diagonal = true;

  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  CMat dense() const { return CMat(matrix); }
  RVec diagonal_entries() const;
};

inline constexpr int kDefaultQubitCap = 24;

SpinOperatorMatrix build_spin_hamiltonian(const SpinModel& model, int max_qubits = kDefaultQubitCap);

struct CouplingReport;

struct BuildOptions {
  bool include_triples = true;
  int max_qubits = kDefaultQubitCap;
};

// Sum of 1/2 E_i Z_i, pair couplings (rotated into the Zeeman frame where the
// field is misaligned) and optional 1/2 J_ijk Z_i Z_j Z_k terms.
SpinModel spin_model_from_report(const ChainConfig& config, const CouplingReport& report,
                                 bool include_triples = true);
SpinOperatorMatrix build_spin_hamiltonian(const ChainConfig& config, const CouplingReport& report,
                                          const BuildOptions& opt = {});

// max |H - H^dagger| / max |H|  (0 for the zero matrix)
double hermiticity_error(const CMat& h);

}  // namespace asq
