#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "snwave/stackelberg.hpp"
#include "snwave/wave.hpp"

namespace snwave::verify {

/// L2(Q) error of the forward solver against u = sin(pi x) cos(pi t) on the
/// fixed unit interval (k = 0) with zero boundary data.
double manufactured_error(int N, int M, double T = 1.0);

/// Max nodal gap between a backward solve with source s(x,t) and the
/// index-reversed forward solve with source s(x,T-t), on the fixed domain.
double reversal_gap(int N, int M, double T = 1.0);

/// Duality identity on the fixed domain with smooth source and boundary data.
DualityReport fixed_domain_duality(int N, int M, FluxMethod method = FluxMethod::ThreePoint);

/// Runs the fixed point and reports whether psi, phi and w1 were bitwise zero
/// at every sweep.
bool leader_subsystem_stays_zero(SNConfig config, const Discretization& disc);

/// max |a - c b| / max|c b| over the converged follower controls for targets
/// u2 and c*u2 (zero initial and terminal data).
double target_linearity_gap(const Discretization& disc, double sigma, double u2, double c);

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Invariant and oracle checks behind the CLI's verify command.
std::vector<CheckLine> run_invariant_suite();

void print_checks(std::ostream& out, const std::vector<CheckLine>& checks);

}  // namespace snwave::verify
