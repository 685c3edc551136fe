#include "snwave/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "snwave/csv.hpp"

namespace snwave::verify {

namespace {

using std::numbers::pi;

std::vector<NodalField> sample_source(const Discretization& disc, double (*f)(double, double),
                                      bool reversed) {
    const TimeGrid& grid = disc.grid();
    std::vector<NodalField> out;
    out.reserve(grid.levels());
    for (int m = 0; m <= grid.M; ++m) {
        NodalField field = zero_field(disc.mesh(m), m);
        const double t = reversed ? grid.T - grid.time(m) : grid.time(m);
        for (std::size_t j = 0; j < field.values.size(); ++j) {
            field.values[j] = f(field.mesh.nodes[j], t);
        }
        out.push_back(std::move(field));
    }
    return out;
}

double smooth_source(double x, double t) {
    return std::sin(pi * x) * (1.0 + t) + x * (1.0 - x) * t * t;
}

double duality_source(double x, double t) { return std::cos(x) * (1.0 + t); }

std::string fmt(const char* label, double v) { return std::string(label) + "=" + sci(v); }

}  // namespace

double manufactured_error(int N, int M, double T) {
    const Discretization disc(MovingDomain(0.0, T), M, N);
    ForwardProblem problem;
    NodalField ic0 = zero_field(disc.mesh(0));
    for (std::size_t j = 0; j < ic0.values.size(); ++j) {
        ic0.values[j] = std::sin(pi * ic0.mesh.nodes[j]);
    }
    problem.ic0 = ic0;
    problem.left_boundary.assign(disc.grid().levels(), 0.0);
    const Trajectory u = solve_forward(problem, disc);

    const TimeGrid& grid = disc.grid();
    double s = 0.0;
    for (int m = 0; m < grid.M; ++m) {
        const auto& f = u[m];
        std::vector<double> e(f.values.size());
        for (std::size_t j = 0; j < e.size(); ++j) {
            e[j] = f.values[j] - std::sin(pi * f.mesh.nodes[j]) * std::cos(pi * grid.time(m));
        }
        s += grid.dt * mass_inner(f.mesh, e, e);
    }
    return std::sqrt(s);
}

double reversal_gap(int N, int M, double T) {
    const Discretization disc(MovingDomain(0.0, T), M, N);
    const auto source = sample_source(disc, smooth_source, false);
    const auto reversed = sample_source(disc, smooth_source, true);

    const Trajectory back = solve_backward(BackwardProblem{source, {}, {}}, disc);
    ForwardProblem fwd;
    fwd.left_boundary.assign(disc.grid().levels(), 0.0);
    fwd.source = reversed;
    const Trajectory forth = solve_forward(fwd, disc);

    double gap = 0.0;
    for (int m = 0; m <= M; ++m) {
        const auto& a = back[m].values;
        const auto& b = forth[M - m].values;
        for (std::size_t j = 0; j < a.size(); ++j) {
            gap = std::max(gap, std::abs(a[j] - b[j]));
        }
    }
    return gap;
}

DualityReport fixed_domain_duality(int N, int M, FluxMethod method) {
    const Discretization disc(MovingDomain(0.0, 1.0), M, N);
    const TimeGrid& grid = disc.grid();
    ControlSamples w{TimeSegment{0.0, grid.T}, std::vector<double>(static_cast<std::size_t>(M))};
    for (int m = 0; m < M; ++m) {
        const double s = std::sin(pi * (grid.time(m) + 0.5 * grid.dt));
        w.values[static_cast<std::size_t>(m)] = s * s;
    }
    const auto source = sample_source(disc, duality_source, false);
    return duality_residual(w, source, disc, method);
}

bool leader_subsystem_stays_zero(SNConfig config, const Discretization& disc) {
    bool zero = true;
    const auto all_zero = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    config.on_sweep = [&](const SweepView& s) {
        for (int m = 0; m <= disc.grid().M; ++m) {
            zero = zero && all_zero(s.psi[m].values) && all_zero(s.phi[m].values);
        }
        zero = zero && all_zero(s.w1_next.values);
    };
    const SNResult r = fixed_point_solve(config, disc);
    return zero && all_zero(r.w1.values);
}

double target_linearity_gap(const Discretization& disc, double sigma, double u2, double c) {
    SNConfig base;
    base.sigma = sigma;
    base.epsilon = 1e-13;
    base.max_iter = 200;
    base.u2 = u2;
    SNConfig scaled = base;
    scaled.u2 = c * u2;
    const auto a = fixed_point_solve(base, disc);
    const auto b = fixed_point_solve(scaled, disc);
    double gap = 0.0;
    double ref = 0.0;
    for (std::size_t m = 0; m < a.w2.values.size(); ++m) {
        gap = std::max(gap, std::abs(b.w2.values[m] - c * a.w2.values[m]));
        ref = std::max(ref, std::abs(c * a.w2.values[m]));
    }
    return ref > 0.0 ? gap / ref : gap;
}

std::vector<CheckLine> run_invariant_suite() {
    std::vector<CheckLine> out;

    {
        bool ok = true;
        std::ostringstream d;
        // The gap is 1/k; beyond k ~ 0.6 it falls below double resolution of e^x.
        for (double k : {0.05, 0.1, 0.25, 0.4, 0.5}) {
            ok = ok && control_time(k) > control_time_lower_bound(k);
        }
        d << fmt("Tc(0.25)", control_time(0.25));
        out.push_back({"control time exceeds controllability bound", ok, d.str()});
    }
    {
        const double tc = control_time(0.25);
        const double reported[] = {41.936, 202.484, 403.167};
        const double mult[] = {1.0, 5.0, 10.0};
        bool ok = true;
        std::ostringstream d;
        for (int i = 0; i < 3; ++i) {
            const MovingDomain dom(0.25, mult[i] * tc);
            const auto st = trapezoid_stats(dom, dom.T / 96.0);
            const double rel = std::abs(st.border_length - reported[i]) / reported[i];
            ok = ok && rel <= 0.01;
            d << "border(" << mult[i] << "Tc)=" << st.border_length << " ";
        }
        out.push_back({"space-time border length within 1%", ok, d.str()});
    }
    {
        const double e1 = manufactured_error(50, 50);
        const double e2 = manufactured_error(100, 100);
        const double e3 = manufactured_error(200, 200);
        const bool ok = e1 / e2 >= 1.7 && e2 / e3 >= 1.7;
        out.push_back({"manufactured solution refinement", ok,
                       fmt("ratio1", e1 / e2) + " " + fmt("ratio2", e2 / e3)});
    }
    {
        const double gap = reversal_gap(64, 64);
        out.push_back({"backward equals reversed forward", gap <= 1e-10, fmt("gap", gap)});
    }
    {
        const auto d100 = fixed_domain_duality(100, 100);
        const auto d200 = fixed_domain_duality(200, 200);
        const bool ok = d200.relative_residual <= 0.05 &&
                        d200.relative_residual < d100.relative_residual;
        out.push_back({"duality residual", ok,
                       fmt("r100", d100.relative_residual) + " " +
                           fmt("r200", d200.relative_residual)});
    }
    {
        const Discretization disc(MovingDomain(0.25, control_time(0.25)), 100, 100);
        const bool ok = leader_subsystem_stays_zero(SNConfig{}, disc);
        out.push_back({"zero leader subsystem stays bitwise zero", ok, ""});
        const double gap = target_linearity_gap(disc, 1e2, 10.0, 3.0);
        out.push_back({"follower control linear in target", gap <= 1e-8, fmt("gap", gap)});
    }
    {
        const Discretization disc(MovingDomain(0.0, 2.0), 200, 50);
        ForwardProblem problem;
        NodalField ic0 = zero_field(disc.mesh(0));
        for (std::size_t j = 0; j < ic0.values.size(); ++j) {
            const double x = ic0.mesh.nodes[j];
            ic0.values[j] = x * (1.0 - x) * std::exp(x);
        }
        problem.ic0 = ic0;
        problem.left_boundary.assign(disc.grid().levels(), 0.0);
        const auto energy = discrete_energy(solve_forward(problem, disc));
        bool ok = true;
        for (std::size_t m = 1; m < energy.size(); ++m) {
            ok = ok && energy[m] <= energy[m - 1] * (1.0 + 1e-12);
        }
        out.push_back({"discrete energy non-increasing", ok,
                       fmt("E0", energy.front()) + " " + fmt("Eend", energy.back())});
    }
    return out;
}

void print_checks(std::ostream& out, const std::vector<CheckLine>& checks) {
    for (const auto& c : checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << '\n';
    }
}

}  // namespace snwave::verify
