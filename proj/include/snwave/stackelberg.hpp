#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "snwave/fem.hpp"
#include "snwave/geometry.hpp"
#include "snwave/wave.hpp"

namespace snwave {

struct SweepView;

using SpaceFunction = std::function<double(double x)>;
using SpaceTimeFunction = std::function<double(double x, double t)>;

/// Parameters of the leader/follower fixed-point iteration.
struct SNConfig {
    double sigma = 1e2;        ///< follower control penalty
    double epsilon = 1e-5;     ///< relative control-change tolerance
    int max_iter = 100;
    double u2 = 10.0;          ///< constant target state
    SpaceTimeFunction u2_field;///< overrides u2 when set

    SpaceFunction phi_terminal0;  ///< f0 on Omega_T, zero when unset
    SpaceFunction phi_terminal1;  ///< f1 on Omega_T, zero when unset
    SpaceFunction u0;             ///< initial displacement, zero when unset
    SpaceFunction u1;             ///< initial velocity, zero when unset

    std::optional<std::vector<double>> initial_w1;  ///< M interval values
    std::optional<std::vector<double>> initial_w2;

    SegmentMode segment_mode = SegmentMode::DisjointHalves;
    FluxMethod flux_method = FluxMethod::ThreePoint;

    /// Called after every sweep, before the stopping test.
    std::function<void(const SweepView&)> on_sweep;

    void validate() const;
    double target(double x, double t) const { return u2_field ? u2_field(x, t) : u2; }
};

struct IterationRecord {
    int n = 0;
    double stop_qty = 0.0;
    double du_l2 = 0.0;        ///< |u^n - u^{n-1}| in L2(Q); |u^0| for n = 0
    double dw_l2 = 0.0;        ///< sum_i |w_i^{n+1} - w_i^n| in L2(Sigma)
    double J = 0.0;            ///< leader cost of w_1^n
    double J2 = 0.0;           ///< follower cost of (u^n, w_2^n)
    double du_to_final = 0.0;  ///< |u^n - u^final| in L2(Q)
    double dw_to_final = 0.0;  ///< sum_i |w_i^{n+1} - w_i^final|
};

using IterationLog = std::vector<IterationRecord>;

/// Everything one sweep n produced.
struct SweepView {
    int n;
    const Trajectory& u;
    const Trajectory& p;
    const Trajectory& psi;
    const Trajectory& phi;
    const ControlSamples& w1_next;
    const ControlSamples& w2_next;
};

/// Outcome of fixed_point_solve. The controls are the last update w^{n+1};
/// the trajectories are the states of the last sweep n they were computed from.
struct SNResult {
    bool converged = false;
    int iterations = 0;
    ControlSamples w1;
    ControlSamples w2;
    Trajectory u;
    Trajectory p;
    Trajectory psi;
    Trajectory phi;
    IterationLog log;
};

/// w2^m = dp/dnu(0, t^m) / sigma on follower intervals, zero elsewhere.
/// dp/dnu is the outward normal derivative, -p_x at x = 0.
ControlSamples follower_update(const Trajectory& p, double sigma, const BoundarySegments& segments,
                               const TimeGrid& grid, FluxMethod method = FluxMethod::ThreePoint);

/// w1^m = -dphi/dnu(0, t^m) on leader intervals, zero elsewhere.
ControlSamples leader_update(const Trajectory& phi, const BoundarySegments& segments,
                             const TimeGrid& grid, FluxMethod method = FluxMethod::ThreePoint);

/// |(w1,w2)_new - (w1,w2)_old| / |(w1,w2)_new| in L2(Sigma). A vanishing
/// denominator yields 0 when the numerator also vanishes, +inf otherwise.
double stopping_quantity(const ControlSamples& new_w1, const ControlSamples& new_w2,
                         const ControlSamples& old_w1, const ControlSamples& old_w2,
                         const TimeGrid& grid);

SNResult fixed_point_solve(const SNConfig& config, const Discretization& disc);

/// Follower cost 1/2 |u - u2|^2_{L2(Q)} + sigma/2 |w2|^2_{L2(Sigma_2)}.
double evaluate_J2(const Trajectory& u, const ControlSamples& w2, const SNConfig& config,
                   const Discretization& disc);

/// Leader cost 1/2 |w1|^2_{L2(Sigma_1)}.
double evaluate_J(const ControlSamples& w1, const TimeGrid& grid);

/// State u for given controls and the config's initial data.
Trajectory solve_state(const ControlSamples& w1, const ControlSamples& w2, const SNConfig& config,
                       const Discretization& disc);

/// Adjoint p driven by u - u2 with zero terminal data.
Trajectory solve_adjoint(const Trajectory& u, const SNConfig& config, const Discretization& disc);

struct NashCheck {
    double follower_residual = 0.0;        ///< |sigma w2 - dp/dnu|_{L2(Sigma_2)} / (sigma |w2|)
    double max_relative_discrepancy = 0.0; ///< finite differences vs analytic pairing
    double max_normalized_pairing = 0.0;   ///< |analytic| / (sigma |w2| |w_hat|)
    std::vector<double> fd_derivatives;
    std::vector<double> analytic_pairings;
};

/// Checks the follower's first-order optimality at (w1, w2) independently of
/// the fixed-point iteration: directional derivatives of J2 along random
/// smooth directions on Sigma_2 by centered differences, against the pairing
/// sum_m dt (sigma w2^m - dp/dnu^m) w_hat^m.
NashCheck nash_gradient_check(const ControlSamples& w1, const ControlSamples& w2,
                              const SNConfig& config, const Discretization& disc,
                              int n_directions, std::uint64_t seed = 20210101);

/// Random smooth direction on the segment: a few sine modes with normal weights.
ControlSamples smooth_direction(const TimeSegment& segment, const TimeGrid& grid,
                                std::uint64_t seed);

/// CSV with columns n,stop_qty,du_L2,dw_L2,J,J2,du_to_final,dw_to_final.
void write_iteration_log_csv(std::ostream& out, const IterationLog& log);

}  // namespace snwave
