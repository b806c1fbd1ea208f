#include "mfg/pde_steppers.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

// Up to five coupled columns per row in 2D; equal columns merge, which is how
// mirrored Neumann ghosts fold into the diagonal.
struct RowBuilder {
    int cols[5];
    double vals[5];
    int count = 0;

    void add(int c, double v) {
        for (int k = 0; k < count; ++k) {
            if (cols[k] == c) {
                vals[k] += v;
                return;
            }
        }
        cols[count] = c;
        vals[count] = v;
        ++count;
    }

    void emit(FivePointSystem& sys) {
        // insertion sort by column
        for (int k = 1; k < count; ++k) {
            int c = cols[k];
            double v = vals[k];
            int j = k - 1;
            while (j >= 0 && cols[j] > c) {
                cols[j + 1] = cols[j];
                vals[j + 1] = vals[j];
                --j;
            }
            cols[j + 1] = c;
            vals[j + 1] = v;
        }
        for (int k = 0; k < count; ++k) {
            sys.col.push_back(cols[k]);
            sys.val.push_back(vals[k]);
        }
        sys.row_ptr.push_back(static_cast<int>(sys.col.size()));
        count = 0;
    }
};

TridiagonalSystem assemble_hjb_1d(const TwoSidedPolicyField& q, int tau, double sigma,
                                  const GridSpec& grid) {
    const int n = grid.nodes_along(0);
    const bool cyclic = grid.bc() == Bc::Periodic;
    const double wh = 1.0 / grid.h(0);
    const double wd = sigma * wh * wh;
    const double idt = 1.0 / grid.dt();
    TridiagonalSystem sys = TridiagonalSystem::zeros(n, cyclic);
    for (int i = 0; i < n; ++i) {
        const double qlp = q.ql_eff(tau, i, 0);
        const double qrm = q.qr_eff(tau, i, 0);
        double diag = idt + 2.0 * wd + (qlp - qrm) * wh;
        double cp = -wd - qlp * wh;
        double cn = -wd + qrm * wh;
        if (grid.at_lower(0, i)) {
            diag += cp;
            cp = 0.0;
        }
        if (grid.at_upper(0, i)) {
            diag += cn;
            cn = 0.0;
        }
        sys.diag[i] = diag;
        sys.sub[i] = cp;
        sys.super[i] = cn;
    }
    return sys;
}

TridiagonalSystem assemble_fpk_1d(const TwoSidedPolicyField& q, int tau, double sigma,
                                  const GridSpec& grid) {
    const int n = grid.nodes_along(0);
    const bool cyclic = grid.bc() == Bc::Periodic;
    const double wh = 1.0 / grid.h(0);
    const double wd = sigma * wh * wh;
    const double idt = 1.0 / grid.dt();
    TridiagonalSystem sys = TridiagonalSystem::zeros(n, cyclic);
    for (int i = 0; i < n; ++i) {
        const bool lo = grid.at_lower(0, i);
        const bool up = grid.at_upper(0, i);
        double diag = idt + 2.0 * wd;
        double cp = -wd;
        double cn = -wd;
        if (lo) {
            diag += cp;
            cp = 0.0;
        }
        if (up) {
            diag += cn;
            cn = 0.0;
        }
        // Divergence coefficients; fluxes across the domain boundary are zero.
        if (!lo) {
            diag += q.ql_eff(tau, i, 0) * wh;
            cp += q.qr_eff(tau, grid.prev(0, i), 0) * wh;
        }
        if (!up) {
            diag -= q.qr_eff(tau, i, 0) * wh;
            cn -= q.ql_eff(tau, grid.next(0, i), 0) * wh;
        }
        sys.diag[i] = diag;
        sys.sub[i] = cp;
        sys.super[i] = cn;
    }
    return sys;
}

FivePointSystem assemble_hjb_2d(const TwoSidedPolicyField& q, int tau, double sigma,
                                const GridSpec& grid) {
    const int n0 = grid.nodes_along(0), n1 = grid.nodes_along(1);
    const double idt = 1.0 / grid.dt();
    FivePointSystem sys;
    sys.n = grid.node_count();
    sys.row_ptr.reserve(sys.n + 1);
    sys.row_ptr.push_back(0);
    sys.col.reserve(static_cast<std::size_t>(sys.n) * 5);
    sys.val.reserve(static_cast<std::size_t>(sys.n) * 5);
    RowBuilder row;
    for (int i0 = 0; i0 < n0; ++i0) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const int c = i0 * n1 + i1;
            row.add(c, idt);
            for (int a = 0; a < 2; ++a) {
                const int p = a == 0 ? grid.prev(0, i0) * n1 + i1 : i0 * n1 + grid.prev(1, i1);
                const int nx = a == 0 ? grid.next(0, i0) * n1 + i1 : i0 * n1 + grid.next(1, i1);
                const double wh = 1.0 / grid.h(a);
                const double wd = sigma * wh * wh;
                const double qlp = q.ql_eff(tau, c, a);
                const double qrm = q.qr_eff(tau, c, a);
                row.add(c, 2.0 * wd + (qlp - qrm) * wh);
                row.add(p, -wd - qlp * wh);
                row.add(nx, -wd + qrm * wh);
            }
            row.emit(sys);
        }
    }
    return sys;
}

FivePointSystem assemble_fpk_2d(const TwoSidedPolicyField& q, int tau, double sigma,
                                const GridSpec& grid) {
    const int n0 = grid.nodes_along(0), n1 = grid.nodes_along(1);
    const double idt = 1.0 / grid.dt();
    FivePointSystem sys;
    sys.n = grid.node_count();
    sys.row_ptr.reserve(sys.n + 1);
    sys.row_ptr.push_back(0);
    sys.col.reserve(static_cast<std::size_t>(sys.n) * 5);
    sys.val.reserve(static_cast<std::size_t>(sys.n) * 5);
    RowBuilder row;
    for (int i0 = 0; i0 < n0; ++i0) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const int c = i0 * n1 + i1;
            row.add(c, idt);
            for (int a = 0; a < 2; ++a) {
                const int ia = a == 0 ? i0 : i1;
                const int p = a == 0 ? grid.prev(0, i0) * n1 + i1 : i0 * n1 + grid.prev(1, i1);
                const int nx = a == 0 ? grid.next(0, i0) * n1 + i1 : i0 * n1 + grid.next(1, i1);
                const bool lo = grid.at_lower(a, ia);
                const bool up = grid.at_upper(a, ia);
                const double wh = 1.0 / grid.h(a);
                const double wd = sigma * wh * wh;
                row.add(c, 2.0 * wd);
                row.add(p, -wd);
                row.add(nx, -wd);
                if (!lo) {
                    row.add(c, q.ql_eff(tau, c, a) * wh);
                    row.add(p, q.qr_eff(tau, p, a) * wh);
                }
                if (!up) {
                    row.add(c, -q.qr_eff(tau, c, a) * wh);
                    row.add(nx, -q.ql_eff(tau, nx, a) * wh);
                }
            }
            row.emit(sys);
        }
    }
    return sys;
}

void check_policy_level(const TwoSidedPolicyField& q, int tau) {
    if (tau < 0 || tau >= q.levels())
        throw InputError("transport assembly: time level out of range");
}

} // namespace

TransportMatrices assemble_transport_matrices(const TwoSidedPolicyField& q, int tau, double sigma,
                                              const GridSpec& grid) {
    if (!q.grid().same_geometry(grid)) throw InputError("transport assembly: grid mismatch");
    check_policy_level(q, tau);
    TransportMatrices out;
    if (grid.dim() == 1) {
        out.hjb = assemble_hjb_1d(q, tau, sigma, grid);
        out.fpk = assemble_fpk_1d(q, tau, sigma, grid);
    } else {
        out.hjb = assemble_hjb_2d(q, tau, sigma, grid);
        out.fpk = assemble_fpk_2d(q, tau, sigma, grid);
    }
    return out;
}

ScalarField fpk_forward_sweep(const TwoSidedPolicyField& policy, double sigma,
                              std::span<const double> m0) {
    const GridSpec& grid = policy.grid();
    if (!(sigma > 0.0)) throw InputError("fpk sweep: sigma must be positive");
    if (static_cast<int>(m0.size()) != grid.node_count())
        throw InputError("fpk sweep: initial density length does not match grid");

    ScalarField m(grid, FieldRole::Density);
    std::ranges::copy(m0, m.level(0).begin());

    const double idt = 1.0 / grid.dt();
    std::vector<double> rhs(grid.node_count());
    FivePointSolver solver_2d;
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto current = m.level(tau);
        for (int i = 0; i < grid.node_count(); ++i) rhs[i] = current[i] * idt;
        try {
            std::vector<double> x;
            if (grid.dim() == 1) {
                const auto sys = assemble_fpk_1d(policy, tau, sigma, grid);
                x = sys.cyclic ? solve_cyclic_tridiagonal(sys, rhs) : solve_tridiagonal(sys, rhs);
            } else {
                x = solver_2d.solve(assemble_fpk_2d(policy, tau, sigma, grid), rhs);
            }
            std::ranges::copy(x, m.level(tau + 1).begin());
        } catch (const SolverFailure& e) {
            throw SolverFailure(std::string("fpk sweep: ") + e.what(), e.residual, tau);
        }
    }
    return m;
}

ScalarField hjb_backward_sweep(const TwoSidedPolicyField& policy, double sigma,
                               std::span<const double> u_terminal,
                               const std::vector<std::vector<double>>& coupling_field,
                               std::span<const double> v_values) {
    const GridSpec& grid = policy.grid();
    const int nodes = grid.node_count();
    if (!(sigma > 0.0)) throw InputError("hjb sweep: sigma must be positive");
    if (static_cast<int>(u_terminal.size()) != nodes)
        throw InputError("hjb sweep: terminal condition length does not match grid");
    if (static_cast<int>(v_values.size()) != nodes)
        throw InputError("hjb sweep: potential length does not match grid");
    if (static_cast<int>(coupling_field.size()) != grid.time_steps())
        throw InputError("hjb sweep: coupling field must have one row per policy level");

    ScalarField u(grid, FieldRole::Value);
    std::ranges::copy(u_terminal, u.level(grid.time_steps()).begin());

    const double idt = 1.0 / grid.dt();
    std::vector<double> rhs(nodes);
    FivePointSolver solver_2d;
    for (int tau = grid.time_steps() - 1; tau >= 0; --tau) {
        const auto& f = coupling_field[tau];
        if (static_cast<int>(f.size()) != nodes)
            throw InputError("hjb sweep: coupling row length does not match grid");
        const auto next = u.level(tau + 1);
        for (int i = 0; i < nodes; ++i) {
            double kinetic = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double l = policy.ql_eff(tau, i, a);
                const double r = policy.qr_eff(tau, i, a);
                kinetic += l * l + r * r;
            }
            rhs[i] = next[i] * idt + 0.5 * kinetic + v_values[i] + f[i];
        }
        try {
            std::vector<double> x;
            if (grid.dim() == 1) {
                const auto sys = assemble_hjb_1d(policy, tau, sigma, grid);
                x = sys.cyclic ? solve_cyclic_tridiagonal(sys, rhs) : solve_tridiagonal(sys, rhs);
            } else {
                x = solver_2d.solve(assemble_hjb_2d(policy, tau, sigma, grid), rhs);
            }
            std::ranges::copy(x, u.level(tau).begin());
        } catch (const SolverFailure& e) {
            throw SolverFailure(std::string("hjb sweep: ") + e.what(), e.residual, tau);
        }
    }
    return u;
}

} // namespace mfg
