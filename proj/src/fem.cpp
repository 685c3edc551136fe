#include "snwave/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snwave/errors.hpp"

namespace snwave {

std::vector<double> TriDiagMatrix::multiply(std::span<const double> x) const {
    const std::size_t n = size();
    if (x.size() != n) {
        throw ConfigError("matrix/vector size mismatch");
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diagonal[i] * x[i];
        if (i > 0) s += lower[i] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

double TriDiagMatrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double row = std::abs(diagonal[i]);
        if (i > 0) row += std::abs(lower[i]);
        if (i + 1 < size()) row += std::abs(upper[i]);
        best = std::max(best, row);
    }
    return best;
}

TriDiagMatrix combine(double a, const TriDiagMatrix& A, double b, const TriDiagMatrix& B) {
    if (A.size() != B.size()) {
        throw ConfigError("cannot combine tridiagonal matrices of different size");
    }
    TriDiagMatrix C(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        C.lower[i] = a * A.lower[i] + b * B.lower[i];
        C.diagonal[i] = a * A.diagonal[i] + b * B.diagonal[i];
        C.upper[i] = a * A.upper[i] + b * B.upper[i];
    }
    return C;
}

TriDiagMatrix assemble_mass(const SpatialMesh& mesh) {
    const std::size_t n = mesh.size();
    TriDiagMatrix A(n);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double h = mesh.nodes[e + 1] - mesh.nodes[e];
        A.diagonal[e] += h / 3.0;
        A.diagonal[e + 1] += h / 3.0;
        A.upper[e] += h / 6.0;
        A.lower[e + 1] += h / 6.0;
    }
    return A;
}

TriDiagMatrix assemble_stiffness(const SpatialMesh& mesh) {
    const std::size_t n = mesh.size();
    TriDiagMatrix A(n);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double inv_h = 1.0 / (mesh.nodes[e + 1] - mesh.nodes[e]);
        A.diagonal[e] += inv_h;
        A.diagonal[e + 1] += inv_h;
        A.upper[e] -= inv_h;
        A.lower[e + 1] -= inv_h;
    }
    return A;
}

std::vector<double> solve_tridiagonal(const TriDiagMatrix& A, std::span<const double> rhs) {
    const std::size_t n = A.size();
    if (rhs.size() != n) {
        throw ConfigError("right-hand side size does not match matrix");
    }
    std::vector<double> c(n, 0.0);
    std::vector<double> x(rhs.begin(), rhs.end());
    double pivot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pivot = A.diagonal[i] - (i > 0 ? A.lower[i] * c[i - 1] : 0.0);
        const double scale = std::abs(A.diagonal[i]) + (i > 0 ? std::abs(A.lower[i]) : 0.0) +
                             (i + 1 < n ? std::abs(A.upper[i]) : 0.0);
        if (pivot == 0.0 || std::abs(pivot) <= 1e-15 * scale || !std::isfinite(pivot)) {
            throw SingularMatrixError(i, pivot);
        }
        c[i] = (i + 1 < n ? A.upper[i] : 0.0) / pivot;
        x[i] = (x[i] - (i > 0 ? A.lower[i] * x[i - 1] : 0.0)) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i] * x[i + 1];
    }
    return x;
}

std::vector<double> solve_dirichlet(const TriDiagMatrix& A, std::span<const double> rhs,
                                    double left, double right) {
    const std::size_t n = A.size();
    if (n < 3 || rhs.size() != n) {
        throw ConfigError("Dirichlet solve needs at least one interior node");
    }
    const std::size_t m = n - 2;
    TriDiagMatrix reduced(m);
    std::vector<double> b(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        reduced.lower[r] = r > 0 ? A.lower[i] : 0.0;
        reduced.diagonal[r] = A.diagonal[i];
        reduced.upper[r] = r + 1 < m ? A.upper[i] : 0.0;
        b[r] = rhs[i];
    }
    b.front() -= A.lower[1] * left;
    b.back() -= A.upper[n - 2] * right;

    const auto interior = solve_tridiagonal(reduced, b);
    std::vector<double> x(n);
    x.front() = left;
    x.back() = right;
    std::copy(interior.begin(), interior.end(), x.begin() + 1);
    return x;
}

NodalField zero_field(const SpatialMesh& mesh, int level) {
    return NodalField{mesh, std::vector<double>(mesh.size(), 0.0), level};
}

NodalField interpolate(const NodalField& field, const SpatialMesh& target) {
    if (field.mesh == target) {
        return field;
    }
    const auto& xs = field.mesh.nodes;
    const auto& vs = field.values;
    NodalField out{target, std::vector<double>(target.size(), 0.0), field.level};
    const double right = xs.back();
    std::size_t e = 0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double x = target.nodes[j];
        if (x > right) {
            break;  // nodes are increasing; everything past here stays zero
        }
        while (e + 2 < xs.size() && x > xs[e + 1]) {
            ++e;
        }
        const double w = (x - xs[e]) / (xs[e + 1] - xs[e]);
        out.values[j] = (1.0 - w) * vs[e] + w * vs[e + 1];
    }
    return out;
}

double boundary_flux_left(const NodalField& field) {
    const auto& x = field.mesh.nodes;
    const auto& v = field.values;
    if (x.size() < 3 || v.size() != x.size()) {
        throw ConfigError("flux recovery needs at least 3 nodes");
    }
    const double d1 = x[1] - x[0];
    const double d2 = x[2] - x[0];
    // Derivative at x0 of the quadratic through the first three nodes.
    return -v[0] * (d1 + d2) / (d1 * d2) + v[1] * d2 / (d1 * (d2 - d1)) -
           v[2] * d1 / (d2 * (d2 - d1));
}

double mass_inner(const SpatialMesh& mesh, std::span<const double> a, std::span<const double> b) {
    const std::size_t n = mesh.size();
    if (a.size() != n || b.size() != n) {
        throw ConfigError("field size does not match mesh");
    }
    double s = 0.0;
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double h = mesh.nodes[e + 1] - mesh.nodes[e];
        s += h / 6.0 *
             (2.0 * a[e] * b[e] + a[e] * b[e + 1] + a[e + 1] * b[e] + 2.0 * a[e + 1] * b[e + 1]);
    }
    return s;
}

ControlSamples zero_control(const TimeSegment& segment, const TimeGrid& grid) {
    return ControlSamples{segment, std::vector<double>(static_cast<std::size_t>(grid.M), 0.0)};
}

double control_l2_norm(const ControlSamples& c, const TimeGrid& grid) {
    if (c.values.size() != static_cast<std::size_t>(grid.M)) {
        throw ConfigError("control has " + std::to_string(c.values.size()) +
                          " samples, grid has " + std::to_string(grid.M) + " intervals");
    }
    double s = 0.0;
    for (int m = 0; m < grid.M; ++m) {
        if (c.segment.contains_interval(grid, m)) {
            const double v = c.values[static_cast<std::size_t>(m)];
            s += grid.dt * v * v;
        }
    }
    return std::sqrt(s);
}

std::vector<double> level_boundary_values(std::span<const ControlSamples* const> controls,
                                          const TimeGrid& grid) {
    std::vector<double> g(grid.levels(), 0.0);
    for (const ControlSamples* c : controls) {
        if (c->values.size() != static_cast<std::size_t>(grid.M)) {
            throw ConfigError("control samples are not aligned with the time grid");
        }
        for (int m = 0; m <= grid.M; ++m) {
            const int interval = std::min(m, grid.M - 1);
            if (c->segment.contains_interval(grid, interval)) {
                g[static_cast<std::size_t>(m)] += c->values[static_cast<std::size_t>(interval)];
            }
        }
    }
    return g;
}

}  // namespace snwave
