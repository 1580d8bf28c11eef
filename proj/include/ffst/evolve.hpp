// evolve.hpp — unitary time evolution under a SpinHamiltonian, sector by sector

#pragma once

#include "ffst/spin_hamiltonian.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace ffst {

struct EvolveOptions {
    int dense_dim_cap = 4096;    // sectors up to this size use a cached eigendecomposition
    double krylov_tol = 1e-10;   // local error tolerance per Lanczos step
    int krylov_max_dim = 48;
};

// Evolves full 2^n state vectors. Dense sector decompositions are computed
// once and cached (guarded), so `prepare_all()` before a parallel region makes
// subsequent `evolve` calls lock-free and safe to issue concurrently.
class SectorEvolver {
public:
    explicit SectorEvolver(const SpinHamiltonian& h, EvolveOptions opts = {});

    // exp(-iHt) psi. Requires psi.size() == 2^n. The input norm is preserved
    // to 1e-10 (relative); worse than that raises NumericFailure.
    Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const;

    void prepare_all() const;

    const SpinHamiltonian& hamiltonian() const { return *h_; }

private:
    struct SectorEigen {
        Eigen::VectorXd w;
        Eigen::MatrixXd v;
    };

    const SectorEigen& dense_decomposition(int n_up) const;
    Eigen::VectorXcd evolve_sector_dense(int n_up, const Eigen::VectorXcd& x, double t) const;
    Eigen::VectorXcd evolve_sector_krylov(int n_up, const Eigen::VectorXcd& x, double t) const;

    std::shared_ptr<const SpinHamiltonian> h_;
    EvolveOptions opts_;
    mutable std::vector<std::optional<SectorEigen>> cache_;
    mutable std::mutex mutex_;
    mutable std::atomic<bool> all_prepared_{false};
};

// One-shot convenience wrapper.
Eigen::VectorXcd evolve_state(const SpinHamiltonian& h, const Eigen::VectorXcd& psi,
                              double t, EvolveOptions opts = {});

} // namespace ffst
