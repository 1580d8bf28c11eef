#include "ffst/evolve.hpp"

#include "ffst/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace ffst {

namespace {

using Cplx = std::complex<double>;

// Lanczos approximation of exp(-iHt) v for Hermitian H, with adaptive
// sub-stepping and the standard local error estimate beta0 * h_{m+1,m} * |u_m|.
Eigen::VectorXcd krylov_expm(const Eigen::SparseMatrix<double>& h, Eigen::VectorXcd v,
                             double t, double tol, int max_dim) {
    const double beta0 = v.norm();
    if (beta0 == 0.0 || t == 0.0) return v;

    const double direction = t < 0.0 ? -1.0 : 1.0;
    double remaining = std::abs(t);
    double dt = remaining;
    int restarts = 0;
    while (remaining > 0.0) {
        if (++restarts > 10000) {
            throw NumericFailure("krylov evolution failed to converge (remaining t=" +
                                 std::to_string(remaining) + ")");
        }
        const double vnorm = v.norm();
        const int dim = static_cast<int>(v.size());
        const int m_cap = std::min(max_dim, dim);

        Eigen::MatrixXcd basis(dim, m_cap);
        Eigen::VectorXd alpha(m_cap), beta(m_cap);
        basis.col(0) = v / vnorm;
        int m = 0;
        bool happy = false;
        Eigen::VectorXcd w;
        for (; m < m_cap; ++m) {
            w = h * basis.col(m);
            alpha(m) = w.dot(basis.col(m)).real();
            w -= alpha(m) * basis.col(m);
            if (m > 0) w -= beta(m - 1) * basis.col(m - 1);
            // one re-orthogonalization pass keeps the basis clean enough at these sizes
            w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).adjoint() * w);
            beta(m) = w.norm();
            if (beta(m) < 1e-14 * vnorm) {
                happy = true;
                ++m;
                break;
            }
            if (m + 1 < m_cap) basis.col(m + 1) = w / beta(m);
        }

        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tmat(i, i) = alpha(i);
            if (i + 1 < m) tmat(i, i + 1) = tmat(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tmat);
        if (small.info() != Eigen::Success) {
            throw NumericFailure("krylov: small tridiagonal eigensolver failed");
        }

        if (happy) dt = remaining;
        for (;;) {
            Eigen::VectorXcd phases(m);
            for (int i = 0; i < m; ++i) {
                phases(i) = std::exp(Cplx(0.0, -small.eigenvalues()(i) * dt * direction));
            }
            Eigen::VectorXcd u = small.eigenvectors().cast<Cplx>() *
                                 (phases.asDiagonal() *
                                  (small.eigenvectors().transpose().cast<Cplx>() *
                                   Eigen::VectorXcd::Unit(m, 0)));
            const double err = happy ? 0.0 : vnorm * beta(m - 1) * std::abs(u(m - 1));
            if (err <= tol * beta0 || dt <= remaining * 1e-12) {
                v = basis.leftCols(m) * (vnorm * u);
                remaining -= dt;
                if (err < 0.1 * tol * beta0) dt *= 2.0;
                dt = std::min(dt, remaining);
                break;
            }
            dt *= 0.5;
        }
    }
    return v;
}

} // namespace

SectorEvolver::SectorEvolver(const SpinHamiltonian& h, EvolveOptions opts)
    : h_(std::make_shared<SpinHamiltonian>(h)),
      opts_(opts),
      cache_(static_cast<std::size_t>(h.sector_count())) {}

const SectorEvolver::SectorEigen& SectorEvolver::dense_decomposition(int n_up) const {
    // after prepare_all the cache is read-only; skip the lock in parallel loops
    if (all_prepared_.load(std::memory_order_acquire)) return *cache_[n_up];
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (cache_[n_up]) return *cache_[n_up];
    }
    Eigen::MatrixXd dense(h_->sector_matrix(n_up));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("sector eigensolver failed (M=" + std::to_string(n_up) + ")");
    }
    SectorEigen se{solver.eigenvalues(), solver.eigenvectors()};
    std::lock_guard<std::mutex> lock(mutex_);
    if (!cache_[n_up]) cache_[n_up] = std::move(se);
    return *cache_[n_up];
}

void SectorEvolver::prepare_all() const {
    bool complete = true;
    for (int m = 0; m <= h_->sites(); ++m) {
        if (h_->basis(m).size() <= static_cast<std::size_t>(opts_.dense_dim_cap)) {
            dense_decomposition(m);
        } else {
            complete = false;  // Krylov sectors stay matrix-free
        }
    }
    if (complete) all_prepared_.store(true, std::memory_order_release);
}

Eigen::VectorXcd SectorEvolver::evolve_sector_dense(int n_up, const Eigen::VectorXcd& x,
                                                    double t) const {
    const auto& se = dense_decomposition(n_up);
    Eigen::VectorXcd modes = se.v.transpose().cast<Cplx>() * x;
    for (int i = 0; i < modes.size(); ++i) {
        modes(i) *= std::exp(Cplx(0.0, -se.w(i) * t));
    }
    return se.v.cast<Cplx>() * modes;
}

Eigen::VectorXcd SectorEvolver::evolve_sector_krylov(int n_up, const Eigen::VectorXcd& x,
                                                     double t) const {
    return krylov_expm(h_->sector_matrix(n_up), x, t, opts_.krylov_tol, opts_.krylov_max_dim);
}

Eigen::VectorXcd SectorEvolver::evolve(const Eigen::VectorXcd& psi, double t) const {
    if (psi.size() != static_cast<Eigen::Index>(h_->dimension())) {
        throw std::invalid_argument("state dimension does not match the Hamiltonian");
    }
    const double norm_in = psi.norm();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    for (int m = 0; m <= h_->sites(); ++m) {
        const auto& basis = h_->basis(m);
        const int dim = static_cast<int>(basis.size());
        Eigen::VectorXcd x(dim);
        double norm2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            x(i) = psi(basis[i]);
            norm2 += std::norm(x(i));
        }
        if (norm2 == 0.0) continue;
        Eigen::VectorXcd y = (dim <= opts_.dense_dim_cap) ? evolve_sector_dense(m, x, t)
                                                          : evolve_sector_krylov(m, x, t);
        for (int i = 0; i < dim; ++i) out(basis[i]) = y(i);
    }
    const double norm_out = out.norm();
    if (norm_in > 0.0 && std::abs(norm_out - norm_in) > 1e-10 * norm_in) {
        throw NumericFailure("evolution lost norm: " + std::to_string(norm_in) + " -> " +
                             std::to_string(norm_out));
    }
    return out;
}

Eigen::VectorXcd evolve_state(const SpinHamiltonian& h, const Eigen::VectorXcd& psi,
                              double t, EvolveOptions opts) {
    return SectorEvolver(h, opts).evolve(psi, t);
}

} // namespace ffst
