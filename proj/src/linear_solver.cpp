#include "mfg/linear_solver.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace mfg {

TridiagonalSystem TridiagonalSystem::zeros(int n, bool cyclic) {
    TridiagonalSystem s;
    s.sub.assign(n, 0.0);
    s.diag.assign(n, 0.0);
    s.super.assign(n, 0.0);
    s.cyclic = cyclic;
    return s;
}

std::vector<double> TridiagonalSystem::multiply(std::span<const double> x) const {
    const int n = size();
    if (static_cast<int>(x.size()) != n) throw InputError("tridiagonal: size mismatch");
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        y[i] = diag[i] * x[i];
        if (i > 0) y[i] += sub[i] * x[i - 1];
        if (i + 1 < n) y[i] += super[i] * x[i + 1];
    }
    if (cyclic) {
        y[0] += sub[0] * x[n - 1];
        y[n - 1] += super[n - 1] * x[0];
    }
    return y;
}

namespace {

// Thomas elimination, no pivoting.  Scratch arrays passed in to allow reuse.
void thomas(std::span<const double> sub, std::span<const double> diag,
            std::span<const double> super, std::span<const double> rhs,
            std::span<double> x, std::vector<double>& c_scratch) {
    const int n = static_cast<int>(diag.size());
    c_scratch.resize(n);
    double piv = diag[0];
    if (piv == 0.0) throw InvariantViolation("tridiagonal solve: zero pivot");
    c_scratch[0] = super[0] / piv;
    x[0] = rhs[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c_scratch[i - 1];
        if (piv == 0.0) throw InvariantViolation("tridiagonal solve: zero pivot");
        c_scratch[i] = super[i] / piv;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c_scratch[i] * x[i + 1];
}

} // namespace

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys, std::span<const double> rhs) {
    if (sys.cyclic) throw InputError("solve_tridiagonal: system is cyclic");
    const int n = sys.size();
    if (static_cast<int>(rhs.size()) != n) throw InputError("solve_tridiagonal: rhs size mismatch");
    std::vector<double> x(n), scratch;
    thomas(sys.sub, sys.diag, sys.super, rhs, x, scratch);
    return x;
}

std::vector<double> solve_cyclic_tridiagonal(const TridiagonalSystem& sys,
                                             std::span<const double> rhs) {
    if (!sys.cyclic) throw InputError("solve_cyclic_tridiagonal: system is not cyclic");
    const int n = sys.size();
    if (n < 3) throw InputError("solve_cyclic_tridiagonal: need n >= 3");
    if (static_cast<int>(rhs.size()) != n)
        throw InputError("solve_cyclic_tridiagonal: rhs size mismatch");

    // A = T + u v^T with u = (gamma, 0, .., super[n-1]), v = (1, 0, .., sub[0]/gamma).
    const double alpha = sys.sub[0];      // A[0][n-1]
    const double beta = sys.super[n - 1]; // A[n-1][0]
    const double gamma = sys.diag[0] != 0.0 ? -sys.diag[0] : 1.0;

    std::vector<double> diag_mod(sys.diag.begin(), sys.diag.end());
    diag_mod[0] -= gamma;
    diag_mod[n - 1] -= alpha * beta / gamma;

    std::vector<double> y(n), z(n), scratch;
    thomas(sys.sub, diag_mod, sys.super, rhs, y, scratch);

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;
    thomas(sys.sub, diag_mod, sys.super, u, z, scratch);

    const double vy = y[0] + alpha / gamma * y[n - 1];
    const double vz = z[0] + alpha / gamma * z[n - 1];
    const double denom = 1.0 + vz;
    if (denom == 0.0) throw InvariantViolation("cyclic tridiagonal solve: singular correction");
    const double factor = vy / denom;
    for (int i = 0; i < n; ++i) y[i] -= factor * z[i];
    return y;
}

std::vector<double> FivePointSystem::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n) throw InputError("5-point system: size mismatch");
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
    return y;
}

struct FivePointSolver::Impl {
    Eigen::SparseMatrix<double> matrix; // column-major storage
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;
    std::vector<int> pattern_row_ptr, pattern_col;
    std::vector<int> csr_to_storage; // CSR entry -> index into matrix.valuePtr()
};

FivePointSolver::FivePointSolver() : impl_(std::make_unique<Impl>()) {}
FivePointSolver::~FivePointSolver() = default;
FivePointSolver::FivePointSolver(FivePointSolver&&) noexcept = default;
FivePointSolver& FivePointSolver::operator=(FivePointSolver&&) noexcept = default;

std::vector<double> FivePointSolver::solve(const FivePointSystem& sys,
                                           std::span<const double> rhs) {
    if (static_cast<int>(rhs.size()) != sys.n)
        throw InputError("solve_sparse_5point: rhs size mismatch");

    const bool same_pattern = impl_->analyzed && impl_->pattern_row_ptr == sys.row_ptr &&
                              impl_->pattern_col == sys.col;
    if (!same_pattern) {
        impl_->matrix.resize(sys.n, sys.n);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(sys.val.size());
        for (int i = 0; i < sys.n; ++i)
            for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
                trips.emplace_back(i, sys.col[k], sys.val[k]);
        impl_->matrix.setFromTriplets(trips.begin(), trips.end());
        impl_->matrix.makeCompressed();
        impl_->lu.analyzePattern(impl_->matrix);

        // Map each CSR entry to its slot in the column-major value array so later
        // solves with the same pattern can overwrite values without rebuilding.
        impl_->csr_to_storage.assign(sys.val.size(), -1);
        const int* outer = impl_->matrix.outerIndexPtr();
        const int* inner = impl_->matrix.innerIndexPtr();
        for (int i = 0; i < sys.n; ++i) {
            for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k) {
                const int j = sys.col[k];
                for (int s = outer[j]; s < outer[j + 1]; ++s) {
                    if (inner[s] == i) {
                        impl_->csr_to_storage[k] = s;
                        break;
                    }
                }
                if (impl_->csr_to_storage[k] < 0)
                    throw InvariantViolation("solve_sparse_5point: pattern mapping failed");
            }
        }
        impl_->pattern_row_ptr = sys.row_ptr;
        impl_->pattern_col = sys.col;
        impl_->analyzed = true;
    } else {
        double* dst = impl_->matrix.valuePtr();
        for (std::size_t k = 0; k < sys.val.size(); ++k)
            dst[impl_->csr_to_storage[k]] = sys.val[k];
    }

    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverFailure("solve_sparse_5point: factorization failed", -1.0);

    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), sys.n);
    Eigen::VectorXd x = impl_->lu.solve(b);

    double bnorm = 0.0, rnorm = 0.0;
    Eigen::VectorXd r = impl_->matrix * x - b;
    for (int i = 0; i < sys.n; ++i) {
        bnorm = std::max(bnorm, std::abs(rhs[i]));
        rnorm = std::max(rnorm, std::abs(r[i]));
    }
    if (rnorm > 1e-10 * std::max(bnorm, 1e-300))
        throw SolverFailure("solve_sparse_5point: residual above tolerance", rnorm);

    return std::vector<double>(x.data(), x.data() + sys.n);
}

std::vector<double> solve_sparse_5point(const FivePointSystem& sys, std::span<const double> rhs) {
    FivePointSolver solver;
    return solver.solve(sys, rhs);
}

} // namespace mfg
