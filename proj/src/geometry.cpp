#include "snwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "snwave/errors.hpp"

namespace snwave {

namespace {

double exponent_term(double k) {
    const double gap = 1.0 - k;
    return 2.0 * k * (1.0 + k) / (gap * gap * gap);
}

void require_open_speed(double k) {
    if (!(k > 0.0 && k < 1.0)) {
        throw DomainError("boundary speed must lie in (0,1), got " + std::to_string(k));
    }
}

}  // namespace

MovingDomain::MovingDomain(double speed, double horizon) : k(speed), T(horizon) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw DomainError("boundary speed must lie in [0,1), got " + std::to_string(k));
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError("final time must be positive, got " + std::to_string(T));
    }
}

double alpha(const MovingDomain& domain, double t) {
    const double slack = 1e-12 * std::max(1.0, domain.T);
    if (t < -slack || t > domain.T + slack) {
        throw DomainError("time " + std::to_string(t) + " outside [0, " +
                          std::to_string(domain.T) + "]");
    }
    return 1.0 + domain.k * t;
}

double control_time(double k) {
    require_open_speed(k);
    return std::exp(exponent_term(k)) / k;
}

double control_time_lower_bound(double k) {
    require_open_speed(k);
    return std::expm1(exponent_term(k)) / k;
}

TimeGrid build_time_grid(double T, int M) {
    if (M < 2) {
        throw ConfigError("time grid needs M >= 2, got " + std::to_string(M));
    }
    if (!(T > 0.0)) {
        throw DomainError("final time must be positive");
    }
    return TimeGrid{T, M, T / M};
}

SpatialMesh build_spatial_mesh(const MovingDomain& domain, double t, int N) {
    if (N < 2) {
        throw ConfigError("spatial mesh needs N >= 2 cells, got " + std::to_string(N));
    }
    const double length = alpha(domain, t);
    SpatialMesh mesh;
    mesh.nodes.resize(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j < N; ++j) {
        mesh.nodes[static_cast<std::size_t>(j)] = length * j / N;
    }
    mesh.nodes.back() = length;
    return mesh;
}

bool TimeSegment::contains_interval(const TimeGrid& grid, int m) const noexcept {
    if (m < 0 || m >= grid.M) {
        return false;
    }
    const double t = grid.time(m);
    const double tol = 1e-9 * grid.dt;
    return t >= begin - tol && t < end - tol;
}

BoundarySegments make_segments(SegmentMode mode, double T) {
    if (mode == SegmentMode::AdditiveOverlap) {
        return {TimeSegment{0.0, T}, TimeSegment{0.0, T}, mode};
    }
    return {TimeSegment{0.5 * T, T}, TimeSegment{0.0, 0.5 * T}, mode};
}

Discretization::Discretization(MovingDomain domain, int M, int N)
    : domain_(domain), grid_(build_time_grid(domain.T, M)), N_(N) {
    meshes_.reserve(grid_.levels());
    for (int m = 0; m <= M; ++m) {
        meshes_.push_back(build_spatial_mesh(domain_, grid_.time(m), N));
    }
}

double trapezoid_perimeter(const MovingDomain& domain) {
    const double k = domain.k;
    return 2.0 + domain.T * (1.0 + k + std::sqrt(1.0 + k * k));
}

SpaceTimeMeshStats trapezoid_stats(const MovingDomain& domain, double target_edge) {
    if (!(target_edge > 0.0)) {
        throw ConfigError("target edge length must be positive");
    }
    if (!(domain.T > 0.0)) {
        throw DomainError("degenerate trapezoid: T must be positive");
    }
    const double top = alpha(domain, domain.T);
    const auto rows = static_cast<std::size_t>(std::max(1.0, std::ceil(domain.T / target_edge)));
    const auto cols = static_cast<std::size_t>(std::max(1.0, std::ceil(top / target_edge)));

    // Vertex (i, j) sits at x = i/cols * alpha(t_j), t_j = j/rows * T.
    const auto vertex_id = [cols](std::size_t i, std::size_t j) { return j * (cols + 1) + i; };
    std::vector<std::pair<double, double>> vertices;
    vertices.reserve((rows + 1) * (cols + 1));
    for (std::size_t j = 0; j <= rows; ++j) {
        const double t = j == rows ? domain.T : domain.T * static_cast<double>(j) / rows;
        const double width = alpha(domain, t);
        for (std::size_t i = 0; i <= cols; ++i) {
            const double x = i == cols ? width : width * static_cast<double>(i) / cols;
            vertices.emplace_back(x, t);
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
    std::size_t triangles = 0;
    const auto add_triangle = [&](std::size_t a, std::size_t b, std::size_t c) {
        for (auto [p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
            ++edge_use[{std::min(p, q), std::max(p, q)}];
        }
        ++triangles;
    };
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < cols; ++i) {
            const auto v00 = vertex_id(i, j);
            const auto v10 = vertex_id(i + 1, j);
            const auto v01 = vertex_id(i, j + 1);
            const auto v11 = vertex_id(i + 1, j + 1);
            add_triangle(v00, v10, v11);
            add_triangle(v00, v11, v01);
        }
    }

    double border = 0.0;
    for (const auto& [edge, uses] : edge_use) {
        if (uses == 1) {
            const auto& [xa, ta] = vertices[edge.first];
            const auto& [xb, tb] = vertices[edge.second];
            border += std::hypot(xb - xa, tb - ta);
        }
    }
    return {vertices.size(), triangles, border};
}

}  // namespace snwave
