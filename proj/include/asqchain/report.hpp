#pragma once

#include <string>
#include <vector>

#include "asqchain/common.hpp"

namespace asq {

enum class CouplingOrder { FirstOrder, WithTriples };

std::string to_string(CouplingOrder o);

// Three-body term 1/2 J_ijk Z_i Z_j Z_k, split by mechanism.
struct TripleCoupling {
  int i = 0, j = 0, k = 0;
  double denominator = 0.0;   // spin dependence of |Etilde|
  double phase_offset = 0.0;  // spin dependence of arg(Etilde)
  double value = 0.0;         // what enters the Hamiltonian
};

// E(s) = c0 + sum 1/2 E_i s_i + sum_{i<j} 1/2 J_ij s_i s_j + sum_{i<j<k} 1/2 J_ijk s_i s_j s_k
struct CouplingReport {
  std::vector<double> energies;  // E_i (GHz)
  RMat pair;                     // J_ij, symmetric, zero diagonal (GHz)
  std::vector<TripleCoupling> triples;
  CouplingOrder order = CouplingOrder::FirstOrder;

  std::size_t size() const { return energies.size(); }
  // 0 when the triple is not listed. Indices in any order.
  double triple(int i, int j, int k) const;
};

}  // namespace asq
