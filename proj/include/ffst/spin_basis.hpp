// spin_basis.hpp — computational-basis bookkeeping for the full-Hilbert-space
// oracle: magnetization sectors, one-site reduced density matrices, local
// gates, and Jordan-Wigner fermionic eigenstate construction.
//
// Basis convention everywhere: site 0 is the least-significant bit and an up
// spin is an occupied bit. Qubit basis |0> = down, |1> = up, sigma_z = diag(1,-1).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace ffst {

using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }

// All masks on `sites` bits with exactly `n_up` bits set, ascending.
std::vector<Mask> sector_masks(int sites, int n_up);

// Index of `m` within sector_masks(sites, popcount(m)) by binary search.
int sector_index(const std::vector<Mask>& basis, Mask m);

// One-site cross density matrix D[r][c] = sum_rest x[rest + r*bit] * conj(y[rest + c*bit]).
// With x == y this is the reduced density matrix of `site`.
Eigen::Matrix2cd cross_density(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y,
                               int site, int sites);

// In-place CNOT with the given control and target sites.
void apply_cnot(Eigen::VectorXcd& psi, int control, int target);

// In-place phase on the |1> component of `site`.
void apply_phase(Eigen::VectorXcd& psi, int site, std::complex<double> phase);

// State with the chain modes in `occupied` filled:
//   |chi> = f_{k1}^dag f_{k2}^dag ... |vac>,  k1 < k2 < ... applied right to left,
// where f_k^dag = sum_j phi_k[j] c_j^dag and c_j^dag carries the Jordan-Wigner
// sign (-1)^{# occupied sites below j}. `modes` holds phi_k in column k-1;
// `occupied` lists 1-based mode indices. The result lives in the 2^N chain space.
Eigen::VectorXd fermionic_chain_state(const Eigen::MatrixXd& modes,
                                      const std::vector<int>& occupied);

// Embed a chain-space vector into the (N+2)-site space with end qubits set to
// the given occupations: full mask = a | (chain << 1) | (b << (N+1)).
Eigen::VectorXcd embed_with_ends(const Eigen::VectorXd& chain_state, int a, int b, int n_chain);

} // namespace ffst
