#include "mfg/grid.hpp"

#include <cmath>
#include <cstdlib>

namespace mfg {

namespace {

void check_axis(double x_min, double x_max, int intervals, Bc bc) {
    if (!(x_max > x_min)) throw InputError("grid: x_max must exceed x_min");
    // at least 3 stored nodes per axis (Neumann stores intervals + 1)
    const int nodes = bc == Bc::Periodic ? intervals : intervals + 1;
    if (nodes < 3) throw InputError("grid: need at least 3 nodes per axis");
}

} // namespace

GridSpec GridSpec::make_1d(Bc bc, double x_min, double x_max, int intervals,
                           double dt, int time_steps) {
    check_axis(x_min, x_max, intervals, bc);
    if (!(dt > 0.0)) throw InputError("grid: dt must be positive");
    if (time_steps < 1) throw InputError("grid: need at least one time step");
    GridSpec g;
    g.dim_ = 1;
    g.bc_ = bc;
    g.x_min_[0] = x_min;
    g.x_max_[0] = x_max;
    g.intervals_[0] = intervals;
    g.h_[0] = (x_max - x_min) / intervals;
    g.dt_ = dt;
    g.time_steps_ = time_steps;
    g.finalize();
    return g;
}

GridSpec GridSpec::make_2d(Bc bc, std::array<double, 2> x_min, std::array<double, 2> x_max,
                           std::array<int, 2> intervals, double dt, int time_steps) {
    for (int a = 0; a < 2; ++a) check_axis(x_min[a], x_max[a], intervals[a], bc);
    if (!(dt > 0.0)) throw InputError("grid: dt must be positive");
    if (time_steps < 1) throw InputError("grid: need at least one time step");
    GridSpec g;
    g.dim_ = 2;
    g.bc_ = bc;
    g.x_min_ = x_min;
    g.x_max_ = x_max;
    g.intervals_ = intervals;
    for (int a = 0; a < 2; ++a) g.h_[a] = (x_max[a] - x_min[a]) / intervals[a];
    g.dt_ = dt;
    g.time_steps_ = time_steps;
    g.finalize();
    return g;
}

void GridSpec::finalize() {
    node_count_ = 1;
    cell_volume_ = 1.0;
    for (int a = 0; a < dim_; ++a) {
        nodes_[a] = bc_ == Bc::Periodic ? intervals_[a] : intervals_[a] + 1;
        node_count_ *= nodes_[a];
        cell_volume_ *= h_[a];

        const int n = nodes_[a];
        prev_[a].resize(n);
        next_[a].resize(n);
        for (int i = 0; i < n; ++i) {
            prev_[a][i] = static_cast<std::int32_t>(i - 1);
            next_[a][i] = static_cast<std::int32_t>(i + 1);
        }
        if (bc_ == Bc::Periodic) {
            prev_[a][0] = static_cast<std::int32_t>(n - 1);
            next_[a][n - 1] = 0;
        } else {
            prev_[a][0] = 0;          // mirrored ghost U_{-1} = U_0
            next_[a][n - 1] = static_cast<std::int32_t>(n - 1);
        }
    }
}

bool GridSpec::same_geometry(const GridSpec& o) const {
    if (dim_ != o.dim_ || bc_ != o.bc_ || dt_ != o.dt_ || time_steps_ != o.time_steps_)
        return false;
    for (int a = 0; a < dim_; ++a) {
        if (x_min_[a] != o.x_min_[a] || x_max_[a] != o.x_max_[a] ||
            intervals_[a] != o.intervals_[a])
            return false;
    }
    return true;
}

ScalarField::ScalarField(GridSpec grid, FieldRole role)
    : grid_(std::move(grid)), role_(role),
      data_(static_cast<std::size_t>(grid_.time_steps() + 1) * grid_.node_count(), 0.0) {}

std::span<double> ScalarField::level(int tau) {
    if (tau < 0 || tau > grid_.time_steps()) throw InputError("field: time level out of range");
    return std::span<double>(data_).subspan(static_cast<std::size_t>(tau) * grid_.node_count(),
                                            grid_.node_count());
}

std::span<const double> ScalarField::level(int tau) const {
    if (tau < 0 || tau > grid_.time_steps()) throw InputError("field: time level out of range");
    return std::span<const double>(data_).subspan(
        static_cast<std::size_t>(tau) * grid_.node_count(), grid_.node_count());
}

TwoSidedPolicyField::TwoSidedPolicyField(GridSpec grid)
    : grid_(std::move(grid)),
      data_(2 * static_cast<std::size_t>(grid_.time_steps()) * grid_.node_count() * grid_.dim(),
            0.0) {}

double TwoSidedPolicyField::sup_norm_effective() const {
    double s = 0.0;
    for (std::size_t k = 0; k < data_.size(); k += 2) {
        if (data_[k] > s) s = data_[k];
        if (-data_[k + 1] > s) s = -data_[k + 1];
    }
    return s;
}

void TwoSidedPolicyField::fill(double ql_value, double qr_value) {
    for (std::size_t k = 0; k < data_.size(); k += 2) {
        data_[k] = ql_value;
        data_[k + 1] = qr_value;
    }
}

namespace {

void check_level(std::span<const double> level, const GridSpec& grid, const char* op) {
    if (static_cast<int>(level.size()) != grid.node_count())
        throw InputError(std::string(op) + ": level length does not match grid");
}

} // namespace

std::vector<double> laplacian(std::span<const double> level, const GridSpec& grid) {
    check_level(level, grid, "laplacian");
    std::vector<double> out(grid.node_count(), 0.0);
    if (grid.dim() == 1) {
        const int n = grid.nodes_along(0);
        const double wh = 1.0 / (grid.h(0) * grid.h(0));
        for (int i = 0; i < n; ++i)
            out[i] = wh * (level[grid.prev(0, i)] - 2.0 * level[i] + level[grid.next(0, i)]);
    } else {
        const int n0 = grid.nodes_along(0), n1 = grid.nodes_along(1);
        const double w0 = 1.0 / (grid.h(0) * grid.h(0));
        const double w1 = 1.0 / (grid.h(1) * grid.h(1));
        for (int i0 = 0; i0 < n0; ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                const int c = i0 * n1 + i1;
                out[c] = w0 * (level[grid.prev(0, i0) * n1 + i1] - 2.0 * level[c] +
                               level[grid.next(0, i0) * n1 + i1]) +
                         w1 * (level[i0 * n1 + grid.prev(1, i1)] - 2.0 * level[c] +
                               level[i0 * n1 + grid.next(1, i1)]);
            }
        }
    }
    return out;
}

void two_sided_gradient(std::span<const double> level, const GridSpec& grid, int axis,
                        std::span<double> dl, std::span<double> dr) {
    check_level(level, grid, "two_sided_gradient");
    if (axis < 0 || axis >= grid.dim()) throw InputError("two_sided_gradient: bad axis");
    if (dl.size() != level.size() || dr.size() != level.size())
        throw InputError("two_sided_gradient: output length does not match grid");
    const double wh = 1.0 / grid.h(axis);
    if (grid.dim() == 1) {
        const int n = grid.nodes_along(0);
        for (int i = 0; i < n; ++i) {
            dl[i] = wh * (level[i] - level[grid.prev(0, i)]);
            dr[i] = wh * (level[grid.next(0, i)] - level[i]);
        }
    } else {
        const int n0 = grid.nodes_along(0), n1 = grid.nodes_along(1);
        for (int i0 = 0; i0 < n0; ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                const int c = i0 * n1 + i1;
                const int p = axis == 0 ? grid.prev(0, i0) * n1 + i1 : i0 * n1 + grid.prev(1, i1);
                const int q = axis == 0 ? grid.next(0, i0) * n1 + i1 : i0 * n1 + grid.next(1, i1);
                dl[c] = wh * (level[c] - level[p]);
                dr[c] = wh * (level[q] - level[c]);
            }
        }
    }
}

std::vector<double> divergence(std::span<const double> m_level, const TwoSidedPolicyField& q,
                               int tau, const GridSpec& grid) {
    check_level(m_level, grid, "divergence");
    if (!q.grid().same_geometry(grid)) throw InputError("divergence: policy grid mismatch");
    if (tau < 0 || tau >= q.levels()) throw InputError("divergence: time level out of range");

    std::vector<double> out(grid.node_count(), 0.0);
    // Leftward flux a_i = M_i Q_L^+_i crosses the (i-1,i) interface; rightward
    // flux b_i = M_i Q_R^-_i crosses (i,i+1).  Neumann sets fluxes across the
    // domain boundary to zero, which makes the node sum vanish exactly.
    auto accumulate = [&](int axis, int node_of_prev, int node_of_next, int c, bool lower,
                          bool upper) {
        const double wh = 1.0 / grid.h(axis);
        const double a_c = lower ? 0.0 : m_level[c] * q.ql_eff(tau, c, axis);
        const double b_c = upper ? 0.0 : m_level[c] * q.qr_eff(tau, c, axis);
        const double a_next = upper ? 0.0 : m_level[node_of_next] * q.ql_eff(tau, node_of_next, axis);
        const double b_prev = lower ? 0.0 : m_level[node_of_prev] * q.qr_eff(tau, node_of_prev, axis);
        out[c] += wh * ((a_next - a_c) + (b_c - b_prev));
    };

    if (grid.dim() == 1) {
        const int n = grid.nodes_along(0);
        for (int i = 0; i < n; ++i)
            accumulate(0, grid.prev(0, i), grid.next(0, i), i, grid.at_lower(0, i),
                       grid.at_upper(0, i));
    } else {
        const int n0 = grid.nodes_along(0), n1 = grid.nodes_along(1);
        for (int i0 = 0; i0 < n0; ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                const int c = i0 * n1 + i1;
                accumulate(0, grid.prev(0, i0) * n1 + i1, grid.next(0, i0) * n1 + i1, c,
                           grid.at_lower(0, i0), grid.at_upper(0, i0));
                accumulate(1, i0 * n1 + grid.prev(1, i1), i0 * n1 + grid.next(1, i1), c,
                           grid.at_lower(1, i1), grid.at_upper(1, i1));
            }
        }
    }
    return out;
}

double mass(std::span<const double> level, const GridSpec& grid) {
    check_level(level, grid, "mass");
    double s = 0.0;
    for (double v : level) s += v;
    return grid.cell_volume() * s;
}

double sup_norm_policy_diff(const TwoSidedPolicyField& a, const TwoSidedPolicyField& b) {
    if (!a.grid().same_geometry(b.grid()))
        throw InputError("sup_norm_policy_diff: grid mismatch");
    const auto da = a.data();
    const auto db = b.data();
    double s = 0.0;
    for (std::size_t k = 0; k < da.size(); k += 2) {
        const double dl = std::abs(std::max(da[k], 0.0) - std::max(db[k], 0.0));
        const double dr = std::abs(std::min(da[k + 1], 0.0) - std::min(db[k + 1], 0.0));
        if (dl > s) s = dl;
        if (dr > s) s = dr;
    }
    return s;
}

} // namespace mfg
