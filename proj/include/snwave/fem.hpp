#pragma once

#include <span>
#include <vector>

#include "snwave/geometry.hpp"

namespace snwave {

/// Tridiagonal matrix stored by bands; lower[0] and upper[n-1] are unused.
struct TriDiagMatrix {
    std::vector<double> lower;
    std::vector<double> diagonal;
    std::vector<double> upper;

    TriDiagMatrix() = default;
    explicit TriDiagMatrix(std::size_t n) : lower(n, 0.0), diagonal(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const noexcept { return diagonal.size(); }
    std::vector<double> multiply(std::span<const double> x) const;
    double norm_inf() const;
};

/// a*A + b*B for matrices of equal size.
TriDiagMatrix combine(double a, const TriDiagMatrix& A, double b, const TriDiagMatrix& B);

TriDiagMatrix assemble_mass(const SpatialMesh& mesh);
TriDiagMatrix assemble_stiffness(const SpatialMesh& mesh);

/// Thomas algorithm without pivoting. Throws SingularMatrixError on a zero pivot.
std::vector<double> solve_tridiagonal(const TriDiagMatrix& A, std::span<const double> rhs);

/// Solves A x = rhs with x[0] = left and x[n-1] = right imposed by eliminating
/// the boundary rows and moving their columns to the right-hand side.
std::vector<double> solve_dirichlet(const TriDiagMatrix& A, std::span<const double> rhs,
                                    double left, double right);

/// P1 function on one time level's mesh.
struct NodalField {
    SpatialMesh mesh;
    std::vector<double> values;
    int level = 0;
};

NodalField zero_field(const SpatialMesh& mesh, int level = 0);

/// Linear interpolation onto target; target nodes past the source's right
/// endpoint receive 0 (the state vanishes on the moving boundary).
NodalField interpolate(const NodalField& field, const SpatialMesh& target);

/// One-sided three-point estimate of the x-derivative at x = 0.
double boundary_flux_left(const NodalField& field);

/// <a, b>_M using the consistent P1 mass matrix of mesh.
double mass_inner(const SpatialMesh& mesh, std::span<const double> a, std::span<const double> b);

/// Boundary control: one value per time interval [t^m, t^{m+1}), m = 0..M-1,
/// zero on intervals outside its segment.
struct ControlSamples {
    TimeSegment segment;
    std::vector<double> values;
};

ControlSamples zero_control(const TimeSegment& segment, const TimeGrid& grid);

/// sqrt(sum_m dt c_m^2) over intervals inside the segment.
double control_l2_norm(const ControlSamples& c, const TimeGrid& grid);

/// Dirichlet datum for each of the M+1 levels: the sum over controls of the
/// value on the interval containing t^m (the last interval for m = M).
std::vector<double> level_boundary_values(std::span<const ControlSamples* const> controls,
                                          const TimeGrid& grid);

}  // namespace snwave
