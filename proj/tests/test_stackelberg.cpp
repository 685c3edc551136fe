#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "snwave/errors.hpp"
#include "snwave/stackelberg.hpp"
#include "snwave/verification.hpp"

using namespace snwave;
using doctest::Approx;

namespace {

const Discretization& reference_disc() {
    static const Discretization d(MovingDomain(0.25, control_time(0.25)), 100, 100);
    return d;
}

// Trajectory whose every frame is c*x on its own mesh.
Trajectory linear_frames(const Discretization& disc, double c) {
    Trajectory t{disc.grid(), {}, {}};
    for (int m = 0; m <= disc.grid().M; ++m) {
        NodalField f = zero_field(disc.mesh(m), m);
        for (std::size_t j = 0; j < f.values.size(); ++j) f.values[j] = c * f.mesh.nodes[j];
        t.frames.push_back(f);
    }
    return t;
}

bool all_zero(const Trajectory& t) {
    for (const auto& f : t.frames) {
        for (double v : f.values) {
            if (v != 0.0) return false;
        }
    }
    return true;
}

bool all_zero(const ControlSamples& c) {
    for (double v : c.values) {
        if (v != 0.0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("follower update reads the outward normal derivative") {
    const Discretization disc(MovingDomain(0.25, 4.0), 20, 10);
    const auto seg = make_segments(SegmentMode::DisjointHalves, 4.0);
    const auto& g = disc.grid();

    CHECK(all_zero(follower_update(linear_frames(disc, 0.0), 1e2, seg, g)));

    const auto w = follower_update(linear_frames(disc, 3.0), 1e2, seg, g);
    for (int m = 0; m < g.M; ++m) {
        const double expected = seg.follower.contains_interval(g, m) ? -3.0 / 100.0 : 0.0;
        CHECK(w.values[static_cast<std::size_t>(m)] == Approx(expected));
    }

    const auto p = linear_frames(disc, 2.0);
    const auto a = follower_update(p, 1e2, seg, g);
    const auto b = follower_update(p, 2e2, seg, g);
    for (std::size_t m = 0; m < a.values.size(); ++m) CHECK(b.values[m] == Approx(0.5 * a.values[m]));
}

TEST_CASE("leader update reads minus the outward normal derivative") {
    const Discretization disc(MovingDomain(0.25, 4.0), 20, 10);
    const auto seg = make_segments(SegmentMode::DisjointHalves, 4.0);
    const auto& g = disc.grid();

    CHECK(all_zero(leader_update(linear_frames(disc, 0.0), seg, g)));

    const auto w = leader_update(linear_frames(disc, 1.5), seg, g);
    const auto neg = leader_update(linear_frames(disc, -1.5), seg, g);
    for (int m = 0; m < g.M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        const double expected = seg.leader.contains_interval(g, m) ? 1.5 : 0.0;
        CHECK(w.values[i] == Approx(expected));
        CHECK(neg.values[i] == -w.values[i]);
    }
}

TEST_CASE("stopping quantity") {
    const auto g = build_time_grid(2.0, 4);
    const TimeSegment s1{1.0, 2.0};
    const TimeSegment s2{0.0, 1.0};
    ControlSamples a1{s1, {0, 0, 1, 2}};
    ControlSamples a2{s2, {3, 4, 0, 0}};
    const auto z1 = zero_control(s1, g);
    const auto z2 = zero_control(s2, g);

    CHECK(stopping_quantity(a1, a2, a1, a2, g) == 0.0);
    CHECK(stopping_quantity(a1, a2, z1, z2, g) == Approx(1.0));
    CHECK(stopping_quantity(z1, z2, z1, z2, g) == 0.0);
    CHECK(std::isinf(stopping_quantity(z1, z2, a1, a2, g)));

    ControlSamples b2 = a2;
    b2.values[0] += 1.0;
    // |diff| = sqrt(dt) * 1, |new| = sqrt(dt * (1 + 4 + 9 + 16))
    CHECK(stopping_quantity(a1, a2, a1, b2, g) == Approx(1.0 / std::sqrt(30.0)));
}

TEST_CASE("follower cost") {
    const Discretization disc(MovingDomain(0.0, 1.0), 10, 10);
    SNConfig cfg;
    cfg.u2 = 10.0;
    const auto seg = make_segments(SegmentMode::DisjointHalves, 1.0);
    const auto w0 = zero_control(seg.follower, disc.grid());

    CHECK(evaluate_J2(linear_frames(disc, 0.0), w0, cfg, disc) == Approx(50.0).epsilon(1e-13));

    Trajectory at_target = linear_frames(disc, 0.0);
    for (auto& f : at_target.frames) {
        for (auto& v : f.values) v = 10.0;
    }
    CHECK(evaluate_J2(at_target, w0, cfg, disc) == Approx(0.0).scale(1.0));

    ControlSamples w = w0;
    for (int m = 0; m < 5; ++m) w.values[static_cast<std::size_t>(m)] = 0.3 * (m + 1);
    ControlSamples w_twice = w;
    for (auto& v : w_twice.values) v *= 2.0;
    const double base = evaluate_J2(at_target, w0, cfg, disc);
    const double once = evaluate_J2(at_target, w, cfg, disc) - base;
    const double twice = evaluate_J2(at_target, w_twice, cfg, disc) - base;
    CHECK(twice == Approx(4.0 * once));
}

TEST_CASE("leader cost") {
    const auto g = build_time_grid(6.0, 12);
    const TimeSegment s{3.0, 6.0};
    CHECK(evaluate_J(zero_control(s, g), g) == 0.0);
    ControlSamples one = zero_control(s, g);
    for (int m = 6; m < 12; ++m) one.values[static_cast<std::size_t>(m)] = 1.0;
    CHECK(evaluate_J(one, g) == Approx(1.5));
    ControlSamples three = one;
    for (auto& v : three.values) v *= 3.0;
    CHECK(evaluate_J(three, g) == Approx(9.0 * evaluate_J(one, g)));
}

TEST_CASE("reference configuration converges in 4 to 10 sweeps") {
    const auto r = fixed_point_solve(SNConfig{}, reference_disc());
    CHECK(r.converged);
    CHECK(r.iterations >= 4);
    CHECK(r.iterations <= 10);
    CHECK(r.log.back().stop_qty <= 1e-5);
    CHECK(r.log.size() == static_cast<std::size_t>(r.iterations));
}

TEST_CASE("smaller sigma needs more sweeps") {
    SNConfig c10;
    c10.sigma = 10;
    SNConfig c100;
    SNConfig c1000;
    c1000.sigma = 1e3;
    const int i10 = fixed_point_solve(c10, reference_disc()).iterations;
    const int i100 = fixed_point_solve(c100, reference_disc()).iterations;
    const int i1000 = fixed_point_solve(c1000, reference_disc()).iterations;
    CHECK(i10 > i100);
    CHECK(i100 >= i1000);
}

TEST_CASE("homogeneous system is an exact fixed point at the first sweep") {
    SNConfig cfg;
    cfg.u2 = 0.0;
    const auto r = fixed_point_solve(cfg, reference_disc());
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(all_zero(r.u));
    CHECK(all_zero(r.p));
    CHECK(all_zero(r.psi));
    CHECK(all_zero(r.phi));
    CHECK(all_zero(r.w1));
    CHECK(all_zero(r.w2));
}

TEST_CASE("iteration cap gives a non-converged result, not an exception") {
    SNConfig cfg;
    cfg.max_iter = 1;
    const auto r = fixed_point_solve(cfg, reference_disc());
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.log.size() == 1);
}

TEST_CASE("non-finite data aborts with a divergence error") {
    SNConfig cfg;
    cfg.u2 = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fixed_point_solve(cfg, reference_disc()), DivergenceError);
}

TEST_CASE("config validation") {
    SNConfig cfg;
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(fixed_point_solve(cfg, reference_disc()), ConfigError);
    cfg = SNConfig{};
    cfg.epsilon = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SNConfig{};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SNConfig{};
    cfg.initial_w1 = std::vector<double>(7, 1.0);
    CHECK_THROWS_AS(fixed_point_solve(cfg, reference_disc()), ConfigError);
}

TEST_CASE("zero leader data keeps psi, phi and w1 bitwise zero on every sweep") {
    CHECK(verify::leader_subsystem_stays_zero(SNConfig{}, reference_disc()));
    SNConfig c10;
    c10.sigma = 10;
    CHECK(verify::leader_subsystem_stays_zero(c10, reference_disc()));
}

TEST_CASE("nonzero terminal data switches the leader on") {
    SNConfig cfg;
    const double len = alpha(reference_disc().domain(), reference_disc().grid().T);
    cfg.phi_terminal0 = [len](double x) { return std::sin(std::numbers::pi * x / len); };
    const auto r = fixed_point_solve(cfg, reference_disc());
    CHECK(r.converged);
    CHECK_FALSE(all_zero(r.w1));
    CHECK_FALSE(all_zero(r.phi));
    CHECK(evaluate_J(r.w1, reference_disc().grid()) > 0.0);
}

TEST_CASE("converged follower control is linear in the target") {
    CHECK(verify::target_linearity_gap(reference_disc(), 1e2, 10.0, 3.0) <= 1e-8);
    CHECK(verify::target_linearity_gap(reference_disc(), 1e1, 10.0, -0.5) <= 1e-8);
}

TEST_CASE("follower cost drops from the first sweep to convergence") {
    for (double mult : {1.0, 3.0, 6.0}) {
        const Discretization disc(MovingDomain(0.25, mult * control_time(0.25)), 100, 100);
        const auto r = fixed_point_solve(SNConfig{}, disc);
        REQUIRE(r.log.size() >= 2);
        CAPTURE(mult);
        CHECK(r.log.back().J2 < r.log[1].J2);
    }
}

TEST_CASE("sweep observer sees every sweep") {
    SNConfig cfg;
    int calls = 0;
    cfg.on_sweep = [&](const SweepView& v) { CHECK(v.n == calls++); };
    const auto r = fixed_point_solve(cfg, reference_disc());
    CHECK(calls == r.iterations);
}

TEST_CASE("additive overlap puts both controls on the whole horizon") {
    SNConfig cfg;
    cfg.segment_mode = SegmentMode::AdditiveOverlap;
    const auto r = fixed_point_solve(cfg, reference_disc());
    CHECK(r.converged);
    CHECK(r.w2.segment.length() == Approx(reference_disc().grid().T));
    CHECK(r.w1.segment.length() == Approx(reference_disc().grid().T));
}

TEST_CASE("follower characterization at convergence") {
    const auto r = fixed_point_solve(SNConfig{}, reference_disc());
    const auto chk = nash_gradient_check(r.w1, r.w2, SNConfig{}, reference_disc(), 5);
    CHECK(chk.follower_residual <= 1e-3);
    CHECK(chk.max_normalized_pairing <= 1e-3);
    CHECK(chk.fd_derivatives.size() == 5);
}

TEST_CASE("analytic pairing grows linearly with a bump off the optimum") {
    SNConfig cfg;
    const auto r = fixed_point_solve(cfg, reference_disc());
    const auto bump = smooth_direction(r.w2.segment, reference_disc().grid(), 99);
    double pair[3];
    for (int a = 1; a <= 3; ++a) {
        ControlSamples w = r.w2;
        for (std::size_t m = 0; m < w.values.size(); ++m) w.values[m] += a * 0.1 * bump.values[m];
        const auto chk = nash_gradient_check(r.w1, w, cfg, reference_disc(), 1, 7);
        pair[a - 1] = chk.analytic_pairings[0];
    }
    CHECK(pair[1] == Approx(2.0 * pair[0]).epsilon(0.02));
    CHECK(pair[2] == Approx(3.0 * pair[0]).epsilon(0.02));
}

TEST_CASE("finite differences approach the adjoint pairing as dt shrinks") {
    const double tc = control_time(0.25);
    double prev = 1.0;
    for (int M : {100, 200, 400}) {
        const Discretization disc(MovingDomain(0.25, tc), M, 100);
        const auto r = fixed_point_solve(SNConfig{}, disc);
        const auto chk = nash_gradient_check(r.w1, r.w2, SNConfig{}, disc, 5);
        CAPTURE(M);
        CHECK(chk.max_relative_discrepancy < prev);
        prev = chk.max_relative_discrepancy;
    }
    CHECK(prev <= 0.01);
}

TEST_CASE("smooth directions are deterministic and confined to the segment") {
    const auto g = build_time_grid(4.0, 40);
    const TimeSegment s{0.0, 2.0};
    const auto a = smooth_direction(s, g, 5);
    const auto b = smooth_direction(s, g, 5);
    const auto c = smooth_direction(s, g, 6);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    for (int m = 20; m < 40; ++m) CHECK(a.values[static_cast<std::size_t>(m)] == 0.0);
}

TEST_CASE("iteration log CSV") {
    const auto r = fixed_point_solve(SNConfig{}, reference_disc());
    std::ostringstream out;
    write_iteration_log_csv(out, r.log);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,stop_qty,du_L2,dw_L2,J,J2,du_to_final,dw_to_final");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == r.iterations);
}
