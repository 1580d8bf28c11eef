// spin_hamiltonian.hpp — full-Hilbert-space XX Hamiltonian, stored per
// magnetization sector.
//
// H = sum_{i,j} K_ij S_i^+ S_j^- : off-diagonal entries are flip-flop couplings
// (no fermionic signs appear in the spin computational basis), diagonal entries
// are number operators. Total S^z is conserved, so H is block diagonal in the
// number of up spins M and is stored that way; evolution cannot mix sectors by
// construction.

#pragma once

#include "ffst/chain.hpp"
#include "ffst/spin_basis.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace ffst {

inline constexpr int kDefaultSiteCap = 16;

class SpinHamiltonian {
public:
    // General symmetric coupling matrix over `K.size()` sites.
    // Throws SizeCapExceeded beyond `site_cap`.
    static SpinHamiltonian from_coupling_matrix(const Eigen::MatrixXd& K,
                                                int site_cap = kDefaultSiteCap);

    int sites() const { return sites_; }
    std::size_t dimension() const { return std::size_t(1) << sites_; }
    int sector_count() const { return sites_ + 1; }

    const std::vector<Mask>& basis(int n_up) const { return basis_[n_up]; }
    const Eigen::SparseMatrix<double>& sector_matrix(int n_up) const { return sector_[n_up]; }
    const Eigen::MatrixXd& coupling() const { return coupling_; }

    // All 2^n eigenvalues, ascending (dense per-sector diagonalization).
    std::vector<double> full_spectrum() const;

private:
    int sites_ = 0;
    Eigen::MatrixXd coupling_;
    std::vector<std::vector<Mask>> basis_;
    std::vector<Eigen::SparseMatrix<double>> sector_;
};

// The (N+2)-site system described by a ChainSpec: end qubits coupled by
// g_left/g_right, chain bonds kappa_j, diagonal on-site fields plus delta on
// both ends.
SpinHamiltonian build_spin_hamiltonian(const ChainSpec& spec, int site_cap = kDefaultSiteCap);

// Sorted multiset {sum_{k in S} e_k : S subset of modes} of all 2^n subset sums.
std::vector<double> subset_sum_spectrum(const Eigen::VectorXd& single_particle_energies);

} // namespace ffst
