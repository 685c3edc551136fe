#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "snwave/fem.hpp"
#include "snwave/geometry.hpp"

namespace snwave {

/// How a boundary flux d/dx at x = 0 is recovered from a backward solve.
enum class FluxMethod {
    ThreePoint,   ///< one-sided stencil on the nodal values
    Variational,  ///< residual of the discrete equation in the boundary row
};

/// One nodal field per time level m = 0..M, each on the level-m mesh.
///
/// Backward solves also record the variational boundary flux per level in
/// left_flux; forward solves leave it empty.
struct Trajectory {
    TimeGrid grid;
    std::vector<NodalField> frames;
    std::vector<double> left_flux;

    const NodalField& operator[](int m) const { return frames.at(static_cast<std::size_t>(m)); }

    /// d/dx at x = 0 for level m with the requested recovery method.
    double flux(int m, FluxMethod method) const;

    /// Outward normal derivative at x = 0, i.e. -d/dx.
    double normal_flux(int m, FluxMethod method) const { return -flux(m, method); }
};

/// u_tt - u_xx = source with u(0,t) = g(t), u(alpha(t),t) = 0.
struct ForwardProblem {
    std::optional<NodalField> ic0;     ///< displacement on the t=0 mesh, zero if unset
    std::optional<NodalField> ic1;     ///< velocity on the t=0 mesh, zero if unset
    std::vector<double> left_boundary; ///< one value per level, M+1 entries
    std::span<const NodalField> source;///< empty, or one field per level
};

/// p_tt - p_xx = source backward from terminal data, p = 0 on both ends.
struct BackwardProblem {
    std::span<const NodalField> source;  ///< one field per level
    std::optional<NodalField> terminal0; ///< p(T), zero if unset
    std::optional<NodalField> terminal1; ///< p_t(T), zero if unset
};

/// Three-level implicit march. Frames 0 and 1 come from the initial data
/// (u^1 = u^0 + dt u_1); for m >= 1 the unknown u^{m+1} solves
///   M (u^{m+1} - 2u^m + u^{m-1}) / dt^2 + K u^{m+1} = M s^{m+1}
/// on the level-(m+1) mesh, with older frames interpolated onto it.
Trajectory solve_forward(const ForwardProblem& problem, const Discretization& disc);

/// Backward march with frames M and M-1 fixed by the terminal data; for
/// m = M-1..1 the unknown p^{m-1} solves
///   M (p^{m+1} - 2p^m + p^{m-1}) / dt^2 + K p^{m-1} = M s^{m-1}
/// on the level-(m-1) mesh.
Trajectory solve_backward(const BackwardProblem& problem, const Discretization& disc);

/// Forward solve driven only by boundary controls (zero initial data, no source).
Trajectory solve_boundary_driven(std::span<const ControlSamples* const> controls,
                                 const Discretization& disc);

/// Discrete analog of  int int s u_hat + int_{Sigma_2} p_x w_hat = 0, where
/// p solves the backward problem with source s and u_hat the forward problem
/// with left boundary w_hat and zero initial data.
struct DualityReport {
    double volume_term = 0.0;
    double boundary_term = 0.0;
    double relative_residual = 0.0;
};

DualityReport duality_residual(const ControlSamples& forward_bdata,
                               std::span<const NodalField> source, const Discretization& disc,
                               FluxMethod method = FluxMethod::ThreePoint);

/// sum_{m=0}^{M-1} dt <a^m, b^m>_M over two trajectories on the same meshes.
double space_time_inner(std::span<const NodalField> a, std::span<const NodalField> b,
                        const TimeGrid& grid);

/// Discrete energy |(u^{m+1}-u^m)/dt|_M^2 + <K u^{m+1}, u^{m+1}> for m = 0..M-1.
/// Only meaningful on a fixed mesh.
std::vector<double> discrete_energy(const Trajectory& traj);

/// Writes rows "m,t,x,value" for every node of every frame.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace snwave
