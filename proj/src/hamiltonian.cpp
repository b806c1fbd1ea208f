#include "mfg/hamiltonian.hpp"

#include <cmath>

namespace mfg {

void HamiltonianSpec::validate(const GridSpec& grid) const {
    if (!(cap > 0.0)) throw InputError("hamiltonian: cap must be positive");
    if (static_cast<int>(v_values.size()) != grid.node_count())
        throw InputError("hamiltonian: potential sample length does not match grid");
    for (double v : v_values)
        if (!std::isfinite(v)) throw InputError("hamiltonian: potential must be finite");
}

TwoSidedPolicyField extract_policy(const ScalarField& u, double cap, long* cap_activations) {
    const GridSpec& grid = u.grid();
    TwoSidedPolicyField q(grid);
    const int nodes = grid.node_count();
    std::vector<double> dl(nodes), dr(nodes);
    long clipped = 0;
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto level = u.level(tau);
        for (int axis = 0; axis < grid.dim(); ++axis) {
            two_sided_gradient(level, grid, axis, dl, dr);
            for (int i = 0; i < nodes; ++i) {
                const double left = dl[i] > 0.0 ? dl[i] : 0.0;
                const double right = dr[i] < 0.0 ? dr[i] : 0.0;
                if (left > cap) ++clipped;
                if (right < -cap) ++clipped;
                q.ql(tau, i, axis) = left > cap ? cap : left;
                q.qr(tau, i, axis) = right < -cap ? -cap : right;
            }
        }
    }
    if (cap_activations) *cap_activations += clipped;
    return q;
}

double running_cost(std::span<const std::pair<double, double>> q_pairs, double v_i) {
    double kinetic = 0.0;
    for (const auto& [ql, qr] : q_pairs) {
        const double l = ql > 0.0 ? ql : 0.0;
        const double r = qr < 0.0 ? qr : 0.0;
        kinetic += l * l + r * r;
    }
    return 0.5 * kinetic + v_i;
}

double legendre_gap(std::span<const double> p, std::span<const double> q, double v_i) {
    if (p.size() != q.size()) throw InputError("legendre_gap: dimension mismatch");
    double p2 = 0.0, q2 = 0.0, pq = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p2 += p[k] * p[k];
        q2 += q[k] * q[k];
        pq += p[k] * q[k];
    }
    const double hamiltonian = 0.5 * p2 - v_i;
    const double lagrangian = 0.5 * q2 + v_i;
    return hamiltonian + lagrangian - pq;
}

} // namespace mfg
