#include "snwave/stackelberg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "snwave/csv.hpp"
#include "snwave/errors.hpp"

namespace snwave {

namespace {

std::size_t idx(int m) { return static_cast<std::size_t>(m); }

constexpr double kDegenerateNorm = 1e-14;

std::optional<NodalField> sample(const SpaceFunction& f, const SpatialMesh& mesh, int level) {
    if (!f) {
        return std::nullopt;
    }
    NodalField out = zero_field(mesh, level);
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        out.values[j] = f(mesh.nodes[j]);
    }
    return out;
}

ControlSamples initial_control(const std::optional<std::vector<double>>& values,
                               const TimeSegment& segment, const TimeGrid& grid) {
    ControlSamples c = zero_control(segment, grid);
    if (values) {
        if (values->size() != c.values.size()) {
            throw ConfigError("initial control must have M = " + std::to_string(grid.M) +
                              " samples");
        }
        for (int m = 0; m < grid.M; ++m) {
            if (segment.contains_interval(grid, m)) {
                c.values[idx(m)] = (*values)[idx(m)];
            }
        }
    }
    return c;
}

std::vector<NodalField> misfit(const Trajectory& u, const SNConfig& config) {
    std::vector<NodalField> s = u.frames;
    for (int m = 0; m <= u.grid.M; ++m) {
        auto& f = s[idx(m)];
        const double t = u.grid.time(m);
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            f.values[j] -= config.target(f.mesh.nodes[j], t);
        }
    }
    return s;
}

double control_distance(const ControlSamples& a, const ControlSamples& b, const TimeGrid& grid) {
    ControlSamples d = a;
    for (std::size_t m = 0; m < d.values.size(); ++m) {
        d.values[m] -= b.values[m];
    }
    return control_l2_norm(d, grid);
}

std::vector<double> flatten(const Trajectory& t) {
    std::vector<double> out;
    for (const auto& f : t.frames) {
        out.insert(out.end(), f.values.begin(), f.values.end());
    }
    return out;
}

/// L2(Q) distance between two flattened trajectories living on disc's meshes.
double state_distance(const std::vector<double>& a, const std::vector<double>& b,
                      const Discretization& disc) {
    const TimeGrid& grid = disc.grid();
    const std::size_t stride = static_cast<std::size_t>(disc.cells()) + 1;
    std::vector<double> d(stride);
    double s = 0.0;
    for (int m = 0; m < grid.M; ++m) {
        const std::size_t off = idx(m) * stride;
        for (std::size_t j = 0; j < stride; ++j) {
            d[j] = a[off + j] - b[off + j];
        }
        s += grid.dt * mass_inner(disc.mesh(m), d, d);
    }
    return std::sqrt(s);
}

bool all_finite(const ControlSamples& c) {
    for (double v : c.values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

void SNConfig::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
}

ControlSamples follower_update(const Trajectory& p, double sigma, const BoundarySegments& segments,
                               const TimeGrid& grid, FluxMethod method) {
    ControlSamples w = zero_control(segments.follower, grid);
    for (int m = 0; m < grid.M; ++m) {
        if (segments.follower.contains_interval(grid, m)) {
            w.values[idx(m)] = p.normal_flux(m, method) / sigma;
        }
    }
    return w;
}

ControlSamples leader_update(const Trajectory& phi, const BoundarySegments& segments,
                             const TimeGrid& grid, FluxMethod method) {
    ControlSamples w = zero_control(segments.leader, grid);
    for (int m = 0; m < grid.M; ++m) {
        if (segments.leader.contains_interval(grid, m)) {
            w.values[idx(m)] = -phi.normal_flux(m, method);
        }
    }
    return w;
}

double stopping_quantity(const ControlSamples& new_w1, const ControlSamples& new_w2,
                         const ControlSamples& old_w1, const ControlSamples& old_w2,
                         const TimeGrid& grid) {
    const double d1 = control_distance(new_w1, old_w1, grid);
    const double d2 = control_distance(new_w2, old_w2, grid);
    const double n1 = control_l2_norm(new_w1, grid);
    const double n2 = control_l2_norm(new_w2, grid);
    const double num = std::sqrt(d1 * d1 + d2 * d2);
    const double den = std::sqrt(n1 * n1 + n2 * n2);
    if (den < kDegenerateNorm) {
        return num < kDegenerateNorm ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return num / den;
}

Trajectory solve_state(const ControlSamples& w1, const ControlSamples& w2, const SNConfig& config,
                       const Discretization& disc) {
    const ControlSamples* controls[] = {&w1, &w2};
    ForwardProblem problem;
    problem.ic0 = sample(config.u0, disc.mesh(0), 0);
    problem.ic1 = sample(config.u1, disc.mesh(0), 0);
    problem.left_boundary = level_boundary_values(controls, disc.grid());
    return solve_forward(problem, disc);
}

Trajectory solve_adjoint(const Trajectory& u, const SNConfig& config, const Discretization& disc) {
    const auto source = misfit(u, config);
    return solve_backward(BackwardProblem{source, {}, {}}, disc);
}

SNResult fixed_point_solve(const SNConfig& config, const Discretization& disc) {
    config.validate();
    const TimeGrid& grid = disc.grid();
    const int M = grid.M;
    const BoundarySegments segments = make_segments(config.segment_mode, grid.T);

    ControlSamples w1 = initial_control(config.initial_w1, segments.leader, grid);
    ControlSamples w2 = initial_control(config.initial_w2, segments.follower, grid);

    BackwardProblem phi_problem;
    phi_problem.terminal0 = sample(config.phi_terminal0, disc.mesh(M), M);
    phi_problem.terminal1 = sample(config.phi_terminal1, disc.mesh(M), M);

    // Flux of phi from the previous sweep feeds psi on Sigma_2; phi^{-1} = 0.
    std::vector<double> phi_flux_prev(idx(M), 0.0);

    SNResult result;
    std::vector<std::vector<double>> u_history;
    std::vector<std::pair<ControlSamples, ControlSamples>> w_history;
    std::vector<double> u_prev;

    for (int n = 0; n < config.max_iter; ++n) {
        Trajectory u = solve_state(w1, w2, config, disc);
        Trajectory p = solve_adjoint(u, config, disc);

        ControlSamples psi_control = zero_control(segments.follower, grid);
        for (int m = 0; m < M; ++m) {
            if (segments.follower.contains_interval(grid, m)) {
                psi_control.values[idx(m)] = phi_flux_prev[idx(m)] / config.sigma;
            }
        }
        const ControlSamples* psi_controls[] = {&psi_control};
        Trajectory psi = solve_boundary_driven(psi_controls, disc);
        phi_problem.source = psi.frames;
        Trajectory phi = solve_backward(phi_problem, disc);

        ControlSamples w1_next = leader_update(phi, segments, grid, config.flux_method);
        ControlSamples w2_next = follower_update(p, config.sigma, segments, grid, config.flux_method);
        const double stop = stopping_quantity(w1_next, w2_next, w1, w2, grid);

        if (config.on_sweep) {
            config.on_sweep(SweepView{n, u, p, psi, phi, w1_next, w2_next});
        }

        IterationRecord rec;
        rec.n = n;
        rec.stop_qty = stop;
        auto u_flat = flatten(u);
        rec.du_l2 = state_distance(u_flat, u_prev.empty() ? std::vector<double>(u_flat.size(), 0.0)
                                                          : u_prev,
                                   disc);
        rec.dw_l2 = control_distance(w1_next, w1, grid) + control_distance(w2_next, w2, grid);
        rec.J = evaluate_J(w1, grid);
        rec.J2 = evaluate_J2(u, w2, config, disc);

        if (std::isnan(stop) || !all_finite(w1_next) || !all_finite(w2_next) ||
            !std::isfinite(rec.J2)) {
            throw DivergenceError("non-finite values in fixed-point sweep " + std::to_string(n) +
                                      " (stop=" + std::to_string(stop) +
                                      ", J2=" + std::to_string(rec.J2) + ")",
                                  n, stop);
        }
        result.log.push_back(rec);
        u_history.push_back(u_flat);
        w_history.emplace_back(w1_next, w2_next);
        u_prev = std::move(u_flat);

        for (int m = 0; m < M; ++m) {
            phi_flux_prev[idx(m)] = phi.normal_flux(m, config.flux_method);
        }
        w1 = std::move(w1_next);
        w2 = std::move(w2_next);
        result.iterations = n + 1;
        result.u = std::move(u);
        result.p = std::move(p);
        result.psi = std::move(psi);
        result.phi = std::move(phi);

        if (stop <= config.epsilon) {
            result.converged = true;
            break;
        }
    }

    for (std::size_t i = 0; i < result.log.size(); ++i) {
        result.log[i].du_to_final = state_distance(u_history[i], u_history.back(), disc);
        result.log[i].dw_to_final =
            control_distance(w_history[i].first, w1, grid) +
            control_distance(w_history[i].second, w2, grid);
    }
    result.w1 = std::move(w1);
    result.w2 = std::move(w2);
    return result;
}

double evaluate_J2(const Trajectory& u, const ControlSamples& w2, const SNConfig& config,
                   const Discretization& disc) {
    const auto d = misfit(u, config);
    const double wn = control_l2_norm(w2, disc.grid());
    return 0.5 * space_time_inner(d, d, disc.grid()) + 0.5 * config.sigma * wn * wn;
}

double evaluate_J(const ControlSamples& w1, const TimeGrid& grid) {
    const double n = control_l2_norm(w1, grid);
    return 0.5 * n * n;
}

ControlSamples smooth_direction(const TimeSegment& segment, const TimeGrid& grid,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kModes = 4;
    double coeff[kModes];
    for (double& c : coeff) c = normal(rng);

    ControlSamples d = zero_control(segment, grid);
    const double span = segment.length();
    for (int m = 0; m < grid.M; ++m) {
        if (!segment.contains_interval(grid, m)) continue;
        // Midpoint of the interval keeps every mode nonzero on the segment ends.
        const double s = (grid.time(m) + 0.5 * grid.dt - segment.begin) / span;
        double v = 0.0;
        for (int q = 0; q < kModes; ++q) {
            v += coeff[q] * std::sin((q + 1) * std::numbers::pi * s);
        }
        d.values[idx(m)] = v;
    }
    return d;
}

NashCheck nash_gradient_check(const ControlSamples& w1, const ControlSamples& w2,
                              const SNConfig& config, const Discretization& disc,
                              int n_directions, std::uint64_t seed) {
    const TimeGrid& grid = disc.grid();
    const TimeSegment& seg = w2.segment;
    NashCheck check;

    const Trajectory u = solve_state(w1, w2, config, disc);
    const Trajectory p = solve_adjoint(u, config, disc);
    const double sigma = config.sigma;
    const double w2_norm = control_l2_norm(w2, grid);

    ControlSamples gap = zero_control(seg, grid);
    for (int m = 0; m < grid.M; ++m) {
        if (seg.contains_interval(grid, m)) {
            gap.values[idx(m)] = sigma * w2.values[idx(m)] - p.normal_flux(m, config.flux_method);
        }
    }
    const double gap_norm = control_l2_norm(gap, grid);
    check.follower_residual = w2_norm > 0.0 ? gap_norm / (sigma * w2_norm) : gap_norm;

    const double delta = 1e-4 * std::max(1.0, w2_norm);
    const auto j2_at = [&](const ControlSamples& dir, double step) {
        ControlSamples w = w2;
        for (std::size_t m = 0; m < w.values.size(); ++m) {
            w.values[m] += step * dir.values[m];
        }
        return evaluate_J2(solve_state(w1, w, config, disc), w, config, disc);
    };

    for (int i = 0; i < n_directions; ++i) {
        const ControlSamples dir = smooth_direction(seg, grid, seed + static_cast<std::uint64_t>(i));
        const double fd = (j2_at(dir, delta) - j2_at(dir, -delta)) / (2.0 * delta);
        double analytic = 0.0;
        for (int m = 0; m < grid.M; ++m) {
            if (seg.contains_interval(grid, m)) {
                analytic += grid.dt * gap.values[idx(m)] * dir.values[idx(m)];
            }
        }
        const double scale = sigma * std::max(w2_norm, kDegenerateNorm) * control_l2_norm(dir, grid);
        const double denom = std::max({std::abs(fd), std::abs(analytic), scale});
        check.max_relative_discrepancy =
            std::max(check.max_relative_discrepancy, std::abs(fd - analytic) / denom);
        check.max_normalized_pairing = std::max(check.max_normalized_pairing, std::abs(analytic) / scale);
        check.fd_derivatives.push_back(fd);
        check.analytic_pairings.push_back(analytic);
    }
    return check;
}

void write_iteration_log_csv(std::ostream& out, const IterationLog& log) {
    out << "n,stop_qty,du_L2,dw_L2,J,J2,du_to_final,dw_to_final\n";
    for (const auto& r : log) {
        out << r.n << ',' << sci(r.stop_qty) << ',' << sci(r.du_l2) << ',' << sci(r.dw_l2) << ','
            << sci(r.J) << ',' << sci(r.J2) << ',' << sci(r.du_to_final) << ','
            << sci(r.dw_to_final) << '\n';
    }
}

}  // namespace snwave
