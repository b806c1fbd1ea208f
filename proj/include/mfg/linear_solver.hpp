#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

/// Tridiagonal system, optionally cyclic (periodic wrap-around corners).
///
/// Row i reads sub[i]*x[i-1] + diag[i]*x[i] + super[i]*x[i+1] = b[i].
/// For a cyclic system, sub[0] multiplies x[n-1] and super[n-1] multiplies x[0].
/// The implicit upwind schemes assembled on top of this type produce M-matrices
/// (positive dominant diagonal, nonpositive off-diagonals), so elimination
/// without pivoting is stable.
struct TridiagonalSystem {
    std::vector<double> sub, diag, super;
    bool cyclic = false;

    int size() const { return static_cast<int>(diag.size()); }
    static TridiagonalSystem zeros(int n, bool cyclic);
    std::vector<double> multiply(std::span<const double> x) const;
};

/// Thomas elimination; requires a non-cyclic system.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys, std::span<const double> rhs);

/// Thomas elimination with a Sherman-Morrison rank-one correction for the
/// periodic corner entries; requires a cyclic system with n >= 3.
std::vector<double> solve_cyclic_tridiagonal(const TridiagonalSystem& sys,
                                             std::span<const double> rhs);

/// Sparse matrix in compressed-row form with the 5-point (plus wrap) pattern
/// of a 2D implicit diffusion-advection level system.
struct FivePointSystem {
    int n = 0;
    std::vector<int> row_ptr;   // size n+1
    std::vector<int> col;       // size nnz
    std::vector<double> val;    // size nnz

    std::vector<double> multiply(std::span<const double> x) const;
};

/// Direct sparse solver for FivePointSystem.  The contract is the residual:
/// ||A x - b||_inf <= 1e-10 ||b||_inf, checked after every solve.
/// Reuses the symbolic factorization across solves with the same pattern.
class FivePointSolver {
public:
    FivePointSolver();
    ~FivePointSolver();
    FivePointSolver(FivePointSolver&&) noexcept;
    FivePointSolver& operator=(FivePointSolver&&) noexcept;

    std::vector<double> solve(const FivePointSystem& sys, std::span<const double> rhs);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around FivePointSolver.
std::vector<double> solve_sparse_5point(const FivePointSystem& sys, std::span<const double> rhs);

} // namespace mfg
