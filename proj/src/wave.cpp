#include "snwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "snwave/csv.hpp"
#include "snwave/errors.hpp"

namespace snwave {

namespace {

std::size_t idx(int m) { return static_cast<std::size_t>(m); }

NodalField on_level(const NodalField& field, const Discretization& disc, int m) {
    NodalField out = interpolate(field, disc.mesh(m));
    out.level = m;
    return out;
}

void impose_ends(NodalField& f, double left, double right) {
    f.values.front() = left;
    f.values.back() = right;
}

void check_source(std::span<const NodalField> source, const TimeGrid& grid) {
    if (!source.empty() && source.size() != grid.levels()) {
        throw ConfigError("source must provide one field per time level");
    }
}

}  // namespace

double Trajectory::flux(int m, FluxMethod method) const {
    if (method == FluxMethod::Variational && !left_flux.empty()) {
        return left_flux.at(idx(m));
    }
    return boundary_flux_left((*this)[m]);
}

Trajectory solve_forward(const ForwardProblem& problem, const Discretization& disc) {
    const TimeGrid& grid = disc.grid();
    const int M = grid.M;
    if (problem.left_boundary.size() != grid.levels()) {
        throw ConfigError("left boundary data must have M+1 = " + std::to_string(grid.levels()) +
                          " entries");
    }
    check_source(problem.source, grid);
    const double dt = grid.dt;
    const double inv_dt2 = 1.0 / (dt * dt);
    const auto& g = problem.left_boundary;

    Trajectory traj{grid, {}, {}};
    traj.frames.reserve(grid.levels());

    const SpatialMesh& mesh0 = disc.mesh(0);
    NodalField u0 = problem.ic0 ? on_level(*problem.ic0, disc, 0) : zero_field(mesh0, 0);
    NodalField v0 = problem.ic1 ? on_level(*problem.ic1, disc, 0) : zero_field(mesh0, 0);

    NodalField start1 = u0;
    for (std::size_t j = 0; j < start1.values.size(); ++j) {
        start1.values[j] += dt * v0.values[j];
    }
    impose_ends(u0, g[0], 0.0);
    NodalField u1 = on_level(start1, disc, 1);
    impose_ends(u1, g[1], 0.0);
    traj.frames.push_back(std::move(u0));
    traj.frames.push_back(std::move(u1));

    for (int m = 1; m < M; ++m) {
        const SpatialMesh& mesh = disc.mesh(m + 1);
        const auto mass = assemble_mass(mesh);
        const auto system = combine(inv_dt2, mass, 1.0, assemble_stiffness(mesh));
        const auto cur = interpolate(traj.frames[idx(m)], mesh);
        const auto prev = interpolate(traj.frames[idx(m - 1)], mesh);

        std::vector<double> w(mesh.size());
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = inv_dt2 * (2.0 * cur.values[j] - prev.values[j]);
        }
        if (!problem.source.empty()) {
            const auto s = interpolate(problem.source[idx(m + 1)], mesh);
            for (std::size_t j = 0; j < w.size(); ++j) {
                w[j] += s.values[j];
            }
        }
        auto rhs = mass.multiply(w);
        traj.frames.push_back(
            NodalField{mesh, solve_dirichlet(system, rhs, g[idx(m + 1)], 0.0), m + 1});
    }
    return traj;
}

Trajectory solve_backward(const BackwardProblem& problem, const Discretization& disc) {
    const TimeGrid& grid = disc.grid();
    const int M = grid.M;
    if (problem.source.size() != grid.levels()) {
        throw ConfigError("backward source must provide one field per time level");
    }
    const double dt = grid.dt;
    const double inv_dt2 = 1.0 / (dt * dt);

    Trajectory traj{grid, std::vector<NodalField>(grid.levels()), std::vector<double>(grid.levels())};

    const SpatialMesh& meshT = disc.mesh(M);
    NodalField pT = problem.terminal0 ? on_level(*problem.terminal0, disc, M) : zero_field(meshT, M);
    NodalField vT = problem.terminal1 ? on_level(*problem.terminal1, disc, M) : zero_field(meshT, M);
    NodalField back1 = pT;
    for (std::size_t j = 0; j < back1.values.size(); ++j) {
        back1.values[j] -= dt * vT.values[j];
    }
    impose_ends(pT, 0.0, 0.0);
    NodalField pM1 = on_level(back1, disc, M - 1);
    impose_ends(pM1, 0.0, 0.0);
    traj.left_flux[idx(M)] = boundary_flux_left(pT);
    traj.left_flux[idx(M - 1)] = boundary_flux_left(pM1);
    traj.frames[idx(M)] = std::move(pT);
    traj.frames[idx(M - 1)] = std::move(pM1);

    for (int m = M - 1; m >= 1; --m) {
        const int level = m - 1;
        const SpatialMesh& mesh = disc.mesh(level);
        const auto mass = assemble_mass(mesh);
        const auto stiff = assemble_stiffness(mesh);
        const auto system = combine(inv_dt2, mass, 1.0, stiff);
        const auto later = interpolate(traj.frames[idx(m + 1)], mesh);
        const auto cur = interpolate(traj.frames[idx(m)], mesh);
        const auto s = interpolate(problem.source[idx(level)], mesh);

        std::vector<double> w(mesh.size());
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = s.values[j] - inv_dt2 * (later.values[j] - 2.0 * cur.values[j]);
        }
        const auto rhs = mass.multiply(w);
        auto p = solve_dirichlet(system, rhs, 0.0, 0.0);

        // Boundary-row residual of the discrete equation equals -p_x(0).
        const auto Ap = system.multiply(p);
        traj.left_flux[idx(level)] = -(Ap[0] - rhs[0]);
        traj.frames[idx(level)] = NodalField{mesh, std::move(p), level};
    }
    return traj;
}

Trajectory solve_boundary_driven(std::span<const ControlSamples* const> controls,
                                 const Discretization& disc) {
    ForwardProblem problem;
    problem.left_boundary = level_boundary_values(controls, disc.grid());
    return solve_forward(problem, disc);
}

double space_time_inner(std::span<const NodalField> a, std::span<const NodalField> b,
                        const TimeGrid& grid) {
    if (a.size() != grid.levels() || b.size() != grid.levels()) {
        throw ConfigError("space-time inner product needs one frame per level");
    }
    double s = 0.0;
    for (int m = 0; m < grid.M; ++m) {
        const auto& fa = a[idx(m)];
        const auto& fb = b[idx(m)];
        if (fa.mesh == fb.mesh) {
            s += grid.dt * mass_inner(fa.mesh, fa.values, fb.values);
        } else {
            const auto fb_on_a = interpolate(fb, fa.mesh);
            s += grid.dt * mass_inner(fa.mesh, fa.values, fb_on_a.values);
        }
    }
    return s;
}

DualityReport duality_residual(const ControlSamples& forward_bdata,
                               std::span<const NodalField> source, const Discretization& disc,
                               FluxMethod method) {
    const TimeGrid& grid = disc.grid();
    const ControlSamples* controls[] = {&forward_bdata};
    const Trajectory u_hat = solve_boundary_driven(controls, disc);
    const Trajectory p = solve_backward(BackwardProblem{source, {}, {}}, disc);

    DualityReport r;
    r.volume_term = space_time_inner(source, u_hat.frames, grid);
    for (int m = 0; m < grid.M; ++m) {
        if (forward_bdata.segment.contains_interval(grid, m)) {
            r.boundary_term += grid.dt * p.normal_flux(m, method) * forward_bdata.values[idx(m)];
        }
    }
    const double scale = std::max(std::abs(r.volume_term), std::abs(r.boundary_term));
    r.relative_residual = scale > 0.0 ? std::abs(r.volume_term + r.boundary_term) / scale : 0.0;
    return r;
}

std::vector<double> discrete_energy(const Trajectory& traj) {
    const TimeGrid& grid = traj.grid;
    std::vector<double> energy;
    energy.reserve(idx(grid.M));
    for (int m = 0; m < grid.M; ++m) {
        const auto& next = traj[m + 1];
        const auto cur = interpolate(traj[m], next.mesh);
        std::vector<double> vel(next.values.size());
        for (std::size_t j = 0; j < vel.size(); ++j) {
            vel[j] = (next.values[j] - cur.values[j]) / grid.dt;
        }
        const auto Ku = assemble_stiffness(next.mesh).multiply(next.values);
        double potential = 0.0;
        for (std::size_t j = 0; j < Ku.size(); ++j) {
            potential += Ku[j] * next.values[j];
        }
        energy.push_back(mass_inner(next.mesh, vel, vel) + potential);
    }
    return energy;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "m,t,x,value\n";
    for (int m = 0; m <= traj.grid.M; ++m) {
        const auto& f = traj[m];
        const std::string t = sci(traj.grid.time(m));
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            out << m << ',' << t << ',' << sci(f.mesh.nodes[j]) << ',' << sci(f.values[j]) << '\n';
        }
    }
}

}  // namespace snwave
