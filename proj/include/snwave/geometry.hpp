#pragma once

#include <cstddef>
#include <vector>

namespace snwave {

/// Non-cylindrical domain Q = {(x,t) : 0 < x < 1 + k t, 0 < t < T}.
///
/// Speeds in (0,1) satisfy the controllability hypothesis. k = 0 is accepted
/// for validation runs on the fixed unit interval; callers can query
/// satisfies_speed_hypothesis() to warn about it.
struct MovingDomain {
    double k = 0.25;
    double T = 1.0;

    MovingDomain() = default;
    MovingDomain(double speed, double horizon);

    bool satisfies_speed_hypothesis() const noexcept { return k > 0.0 && k < 1.0; }
};

/// Right endpoint 1 + k t of the spatial interval at time t in [0, T].
double alpha(const MovingDomain& domain, double t);

/// Base control horizon exp(2k(1+k)/(1-k)^3)/k for 0 < k < 1.
double control_time(double k);

/// Controllability threshold (exp(2k(1+k)/(1-k)^3) - 1)/k.
double control_time_lower_bound(double k);

/// Uniform grid t^m = m dt, m = 0..M, with t^M == T exactly.
struct TimeGrid {
    double T = 0.0;
    int M = 0;
    double dt = 0.0;

    double time(int m) const noexcept { return m == M ? T : m * dt; }
    std::size_t levels() const noexcept { return static_cast<std::size_t>(M) + 1; }
};

TimeGrid build_time_grid(double T, int M);

/// Uniform P1 mesh on [0, alpha(t)] with N cells.
struct SpatialMesh {
    std::vector<double> nodes;

    std::size_t size() const noexcept { return nodes.size(); }
    int cells() const noexcept { return static_cast<int>(nodes.size()) - 1; }
    double length() const noexcept { return nodes.back(); }
    double spacing() const noexcept { return nodes[1] - nodes[0]; }

    friend bool operator==(const SpatialMesh&, const SpatialMesh&) = default;
};

SpatialMesh build_spatial_mesh(const MovingDomain& domain, double t, int N);

/// Open time interval (begin, end) on the controlled boundary x = 0.
///
/// Controls are piecewise constant on [t^m, t^{m+1}); interval m belongs to
/// the segment when begin <= t^m < end (up to rounding).
struct TimeSegment {
    double begin = 0.0;
    double end = 0.0;

    double length() const noexcept { return end - begin; }
    bool contains_interval(const TimeGrid& grid, int m) const noexcept;
};

enum class SegmentMode {
    DisjointHalves,   ///< leader on (T/2, T), follower on (0, T/2)
    AdditiveOverlap,  ///< both act on (0, T); boundary value is w1 + w2
};

struct BoundarySegments {
    TimeSegment leader;
    TimeSegment follower;
    SegmentMode mode = SegmentMode::DisjointHalves;
};

BoundarySegments make_segments(SegmentMode mode, double T);

/// Domain, time grid and the per-level spatial meshes used by every solver.
class Discretization {
public:
    Discretization(MovingDomain domain, int M, int N);

    const MovingDomain& domain() const noexcept { return domain_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    int cells() const noexcept { return N_; }
    const SpatialMesh& mesh(int m) const { return meshes_.at(static_cast<std::size_t>(m)); }

private:
    MovingDomain domain_;
    TimeGrid grid_;
    int N_;
    std::vector<SpatialMesh> meshes_;
};

struct SpaceTimeMeshStats {
    std::size_t n_vertices = 0;
    std::size_t n_triangles = 0;
    double border_length = 0.0;
};

/// Structured triangulation of the trapezoid (0,0), (1,0), (alpha(T),T), (0,T)
/// with edges no longer than roughly target_edge. The border length is summed
/// over edges that belong to exactly one triangle.
SpaceTimeMeshStats trapezoid_stats(const MovingDomain& domain, double target_edge);

/// Analytic perimeter 2 + T(1 + k + sqrt(1 + k^2)).
double trapezoid_perimeter(const MovingDomain& domain);

}  // namespace snwave
