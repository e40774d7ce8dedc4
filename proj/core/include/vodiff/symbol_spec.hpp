#pragma once

#include <vector>

namespace vodiff {

/** Symbol A(xi) of the spatial operator.  Either a negative definite
 * quadratic form A(xi) = 1/2 xi^T A xi (matrix row-major, n x n), or the
 * Riesz symbol A(xi) = -|xi|^alpha, alpha in (0,2].  In both cases A(0)=0,
 * A(-xi)=A(xi) and A(xi)<0 for xi != 0. */
struct SymbolSpec {
    enum class Family { kQuadraticForm, kRiesz };

    Family family = Family::kQuadraticForm;
    int dimension = 1;
    std::vector<double> matrix;  // quadratic_form only
    double alpha = 2.0;          // riesz only

    static SymbolSpec quadratic(std::vector<double> matrix_rowmajor, int dimension);
    static SymbolSpec riesz(double alpha, int dimension);

    void validate() const;  // symmetry + negative definiteness via eigenvalues
    double operator()(const double* xi) const;
    double value1d(double xi) const;

    /// Tr(-A), the diffusivity constant of the second-moment laws.
    /// Only defined for the quadratic family.
    double trace_neg() const;
};

/** Uniform periodic grid: per axis, `points` nodes x_j = -L + j*(2L/points),
 * paired with the frequency grid xi_k = -Xi + k*dxi, Xi = pi/dx. */
struct SpatialGrid {
    int dimension = 1;   // 1 or 2
    int points = 4096;   // per axis, power of two
    double x_halfwidth = 10.0;

    void validate() const;
    double dx() const { return 2.0 * x_halfwidth / points; }
    double dxi() const;
    double xi_max() const;
    double x(int j) const { return -x_halfwidth + j * dx(); }
    double xi(int k) const;
    std::size_t total_points() const;
};

}  // namespace vodiff
