#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

enum class Bc { Periodic, Neumann };

/// Uniform space-time grid on a 1D interval or 2D box.
///
/// `intervals[a]` is the number of cells I along axis a, so h = (x_max-x_min)/I.
/// Periodic grids store I nodes per axis (node I is identified with node 0);
/// Neumann grids store I+1 nodes (0..I inclusive) with mirrored ghost values
/// U_{-1}=U_0 and U_{I+1}=U_I.  Neighbour index maps are precomputed so the
/// stencil loops contain no modular arithmetic.
class GridSpec {
public:
    GridSpec() = default; ///< empty grid; only the factories produce usable ones

    static GridSpec make_1d(Bc bc, double x_min, double x_max, int intervals,
                            double dt, int time_steps);
    static GridSpec make_2d(Bc bc, std::array<double, 2> x_min, std::array<double, 2> x_max,
                            std::array<int, 2> intervals, double dt, int time_steps);

    int dim() const { return dim_; }
    Bc bc() const { return bc_; }
    double x_min(int axis) const { return x_min_[axis]; }
    double x_max(int axis) const { return x_max_[axis]; }
    double h(int axis) const { return h_[axis]; }
    int intervals(int axis) const { return intervals_[axis]; }
    double dt() const { return dt_; }
    int time_steps() const { return time_steps_; }
    double horizon() const { return dt_ * time_steps_; }

    /// Stored nodes along one axis: I for Periodic, I+1 for Neumann.
    int nodes_along(int axis) const { return nodes_[axis]; }
    /// Total stored nodes (product over axes).
    int node_count() const { return node_count_; }
    /// Quadrature weight of one node: h (1D) or h1*h2 (2D).
    double cell_volume() const { return cell_volume_; }

    double coordinate(int axis, int i) const { return x_min_[axis] + i * h_[axis]; }

    /// Flattened node index; axis 0 is the slow dimension.
    int node(int i0, int i1 = 0) const { return dim_ == 1 ? i0 : i0 * nodes_[1] + i1; }

    /// Stencil neighbour of axis-local index i (wraps for Periodic, mirrors for Neumann).
    int prev(int axis, int i) const { return prev_[axis][i]; }
    int next(int axis, int i) const { return next_[axis][i]; }

    bool at_lower([[maybe_unused]] int axis, int i) const {
        return bc_ == Bc::Neumann && i == 0;
    }
    bool at_upper(int axis, int i) const { return bc_ == Bc::Neumann && i == nodes_[axis] - 1; }

    /// Geometry equality (used to reject cross-grid field operations).
    bool same_geometry(const GridSpec& o) const;

private:
    void finalize();

    int dim_ = 1;
    Bc bc_ = Bc::Periodic;
    std::array<double, 2> x_min_{}, x_max_{}, h_{};
    std::array<int, 2> intervals_{};
    double dt_ = 0.0;
    int time_steps_ = 0;

    std::array<int, 2> nodes_{};
    int node_count_ = 0;
    double cell_volume_ = 0.0;
    std::array<std::vector<std::int32_t>, 2> prev_, next_;
};

enum class FieldRole { Value, Density };

/// Values of u or m on all time levels 0..T of a grid.
class ScalarField {
public:
    ScalarField() : role_(FieldRole::Value) {} ///< empty field on the empty grid
    ScalarField(GridSpec grid, FieldRole role);

    const GridSpec& grid() const { return grid_; }
    FieldRole role() const { return role_; }
    int levels() const { return grid_.time_steps() + 1; }

    std::span<double> level(int tau);
    std::span<const double> level(int tau) const;

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

private:
    GridSpec grid_;
    FieldRole role_;
    std::vector<double> data_;
};

/// Per (time level 0..T-1, node, axis) pair of left/right components.
///
/// Holds either a two-sided policy (Q_L, Q_R) or a two-sided flux (W_L, W_R);
/// the effective parts used by the monotone operators are Q_L^+ = max(Q_L,0)
/// and Q_R^- = min(Q_R,0), recomputed on demand so that convex combinations
/// act on the raw components.
class TwoSidedPolicyField {
public:
    TwoSidedPolicyField() = default; ///< empty field on the empty grid
    explicit TwoSidedPolicyField(GridSpec grid);

    const GridSpec& grid() const { return grid_; }
    int levels() const { return grid_.time_steps(); }

    double ql(int tau, int node, int axis) const { return data_[index(tau, node, axis)]; }
    double qr(int tau, int node, int axis) const { return data_[index(tau, node, axis) + 1]; }
    double& ql(int tau, int node, int axis) { return data_[index(tau, node, axis)]; }
    double& qr(int tau, int node, int axis) { return data_[index(tau, node, axis) + 1]; }

    double ql_eff(int tau, int node, int axis) const {
        double v = ql(tau, node, axis);
        return v > 0.0 ? v : 0.0;
    }
    double qr_eff(int tau, int node, int axis) const {
        double v = qr(tau, node, axis);
        return v < 0.0 ? v : 0.0;
    }

    /// sup over all entries of max{Q_L^+, -Q_R^-}.
    double sup_norm_effective() const;

    void fill(double ql_value, double qr_value);

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

private:
    std::size_t index(int tau, int node, int axis) const {
        return 2 * (static_cast<std::size_t>(tau) * grid_.node_count() * grid_.dim() +
                    static_cast<std::size_t>(node) * grid_.dim() + axis);
    }

    GridSpec grid_;
    std::vector<double> data_;
};

/// (U_{[i-1]} - 2 U_i + U_{[i+1]}) / h^2 per node, tensor sum over axes in 2D.
std::vector<double> laplacian(std::span<const double> level, const GridSpec& grid);

/// One-sided differences along `axis`: dl_i = (U_i - U_{[i-1]})/h, dr_i = (U_{[i+1]} - U_i)/h.
/// Neumann mirrors force dl = 0 at the lower boundary and dr = 0 at the upper one.
void two_sided_gradient(std::span<const double> level, const GridSpec& grid, int axis,
                        std::span<double> dl, std::span<double> dr);

/// Conservative upwind divergence of the flux M * Q_eff at one time level:
///   (1/h) (M_{[i+1]} Q_L^+_{[i+1]} - M_i Q_L^+_i) + (1/h) (M_i Q_R^-_i - M_{[i-1]} Q_R^-_{[i-1]})
/// summed over axes.  Neumann grids drop boundary-crossing fluxes, so the
/// node sum is exactly zero under both boundary conditions.
std::vector<double> divergence(std::span<const double> m_level, const TwoSidedPolicyField& q,
                               int tau, const GridSpec& grid);

/// h^dim * sum of node values.
double mass(std::span<const double> level, const GridSpec& grid);

/// max over (tau, node, axis) of max{|dQ_L^+|, |dQ_R^-|}; compares effective parts.
double sup_norm_policy_diff(const TwoSidedPolicyField& a, const TwoSidedPolicyField& b);

} // namespace mfg
