#include "ffst/spin_hamiltonian.hpp"

#include "ffst/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace ffst {

SpinHamiltonian SpinHamiltonian::from_coupling_matrix(const Eigen::MatrixXd& K, int site_cap) {
    const int n = static_cast<int>(K.rows());
    if (K.cols() != n || n < 1) throw std::invalid_argument("coupling matrix must be square");
    if (n > site_cap) {
        throw SizeCapExceeded("system of " + std::to_string(n) + " sites exceeds cap " +
                              std::to_string(site_cap));
    }

    SpinHamiltonian h;
    h.sites_ = n;
    h.coupling_ = K;
    h.basis_.resize(n + 1);
    h.sector_.resize(n + 1);

    // Coupled pairs once; flip-flop matrix elements carry no sign in the spin basis.
    std::vector<std::tuple<int, int, double>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (K(i, j) != 0.0) pairs.emplace_back(i, j, K(i, j));
        }
    }

    for (int m = 0; m <= n; ++m) {
        h.basis_[m] = sector_masks(n, m);
        const auto& basis = h.basis_[m];
        const int dim = static_cast<int>(basis.size());
        std::vector<Eigen::Triplet<double>> trips;
        for (int a = 0; a < dim; ++a) {
            const Mask s = basis[a];
            double diag = 0.0;
            for (int i = 0; i < n; ++i) {
                if (s & (Mask(1) << i)) diag += K(i, i);
            }
            if (diag != 0.0) trips.emplace_back(a, a, diag);
            for (const auto& [i, j, c] : pairs) {
                const Mask bi = Mask(1) << i, bj = Mask(1) << j;
                if ((s & bi) && !(s & bj)) {
                    const int b = sector_index(basis, s ^ bi ^ bj);
                    trips.emplace_back(b, a, c);
                    trips.emplace_back(a, b, c);
                }
            }
        }
        Eigen::SparseMatrix<double> sp(dim, dim);
        sp.setFromTriplets(trips.begin(), trips.end());
        h.sector_[m] = std::move(sp);
    }
    return h;
}

SpinHamiltonian build_spin_hamiltonian(const ChainSpec& spec, int site_cap) {
    return SpinHamiltonian::from_coupling_matrix(build_coupling_matrix(spec).entries, site_cap);
}

std::vector<double> SpinHamiltonian::full_spectrum() const {
    std::vector<double> eigs;
    eigs.reserve(dimension());
    for (int m = 0; m <= sites_; ++m) {
        const auto& sp = sector_[m];
        if (sp.rows() == 0) continue;
        Eigen::MatrixXd dense(sp);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericFailure("sector eigensolver failed (M=" + std::to_string(m) + ")");
        }
        for (int i = 0; i < solver.eigenvalues().size(); ++i) {
            eigs.push_back(solver.eigenvalues()(i));
        }
    }
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

std::vector<double> subset_sum_spectrum(const Eigen::VectorXd& single_particle_energies) {
    const int n = static_cast<int>(single_particle_energies.size());
    if (n > 24) throw std::invalid_argument("subset-sum spectrum limited to 24 modes");
    std::vector<double> sums;
    sums.reserve(std::size_t(1) << n);
    sums.push_back(0.0);
    for (int k = 0; k < n; ++k) {
        const std::size_t count = sums.size();
        for (std::size_t i = 0; i < count; ++i) {
            sums.push_back(sums[i] + single_particle_energies(k));
        }
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

} // namespace ffst
