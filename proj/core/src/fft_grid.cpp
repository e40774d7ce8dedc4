#include <fftw3.h>

#include <cmath>
#include <stdexcept>

#include "vodiff/field.hpp"

namespace vodiff {

SymbolSpec SymbolSpec::quadratic(std::vector<double> matrix_rowmajor, int dimension) {
    SymbolSpec s;
    s.family = Family::kQuadraticForm;
    s.dimension = dimension;
    s.matrix = std::move(matrix_rowmajor);
    s.validate();
    return s;
}

SymbolSpec SymbolSpec::riesz(double alpha, int dimension) {
    SymbolSpec s;
    s.family = Family::kRiesz;
    s.dimension = dimension;
    s.alpha = alpha;
    s.validate();
    return s;
}

void SymbolSpec::validate() const {
    if (dimension != 1 && dimension != 2)
        throw std::domain_error("SymbolSpec: only dimensions 1 and 2 are supported");
    if (family == Family::kRiesz) {
        if (!(alpha > 0.0) || alpha > 2.0)
            throw std::domain_error("SymbolSpec: riesz exponent must be in (0,2]");
        return;
    }
    if (matrix.size() != static_cast<std::size_t>(dimension) * dimension)
        throw std::domain_error("SymbolSpec: matrix must be dimension x dimension");
    if (dimension == 1) {
        if (!(matrix[0] < 0.0))
            throw std::domain_error("SymbolSpec: quadratic form must be negative definite");
        return;
    }
    if (std::abs(matrix[1] - matrix[2]) > 1e-12 * (std::abs(matrix[1]) + 1.0))
        throw std::domain_error("SymbolSpec: matrix must be symmetric");
    // 2x2 eigenvalues
    double tr = matrix[0] + matrix[3];
    double det = matrix[0] * matrix[3] - matrix[1] * matrix[2];
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    double lam_max = 0.5 * tr + disc;
    if (!(lam_max < 0.0))
        throw std::domain_error("SymbolSpec: quadratic form must be negative definite "
                                "(largest eigenvalue is not < 0)");
}

double SymbolSpec::operator()(const double* xi) const {
    if (family == Family::kRiesz) {
        double r2 = 0.0;
        for (int i = 0; i < dimension; ++i) r2 += xi[i] * xi[i];
        return -std::pow(r2, 0.5 * alpha);
    }
    double q = 0.0;
    for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j) q += matrix[i * dimension + j] * xi[i] * xi[j];
    return 0.5 * q;
}

double SymbolSpec::value1d(double xi) const { return (*this)(&xi); }

double SymbolSpec::trace_neg() const {
    if (family != Family::kQuadraticForm)
        throw std::domain_error("SymbolSpec: Tr(-A) is defined for the quadratic family only "
                                "(the Riesz symbol has no finite second moment for alpha < 2)");
    double tr = 0.0;
    for (int i = 0; i < dimension; ++i) tr += matrix[i * dimension + i];
    return -tr;
}

void SpatialGrid::validate() const {
    if (dimension != 1 && dimension != 2)
        throw std::domain_error("SpatialGrid: only dimensions 1 and 2 are supported");
    if (points < 4 || (points & (points - 1)) != 0)
        throw std::domain_error("SpatialGrid: points per axis must be a power of two >= 4");
    if (!(x_halfwidth > 0.0)) throw std::domain_error("SpatialGrid: x_halfwidth must be positive");
}

double SpatialGrid::dxi() const { return 3.14159265358979323846 / x_halfwidth; }
double SpatialGrid::xi_max() const { return 0.5 * points * dxi(); }
double SpatialGrid::xi(int k) const { return -xi_max() + k * dxi(); }
std::size_t SpatialGrid::total_points() const {
    std::size_t n = points;
    return dimension == 1 ? n : n * n;
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::kSpectral: return "spectral";
        case Provenance::kOracle: return "oracle";
        case Provenance::kHybrid: return "hybrid";
    }
    return "?";
}

std::size_t SpectralField::zero_xi_index() const {
    std::size_t half = grid.points / 2;
    return grid.dimension == 1 ? half : half * grid.points + half;
}

// U(x_m) = (dxi/2pi)^n (-1)^(sum m) sum_k [(-1)^(sum k) u_hat_k] e^(-2pi i m.k/M),
// for the symmetric grids x_m = -L + m dx, xi_k = -Xi + k dxi with M a
// multiple of 4.  Realized with FFTW's forward c2c transform.
std::vector<double> synthesize_field(const SpatialGrid& grid, const std::vector<double>& u_hat,
                                     double* imag_residue) {
    grid.validate();
    if (u_hat.size() != grid.total_points())
        throw std::invalid_argument("synthesize_field: u_hat size does not match the grid");
    const int M = grid.points;
    const std::size_t total = grid.total_points();
    std::vector<fftw_complex> in(total), out(total);

    auto sign_of = [](int idx) { return (idx % 2 == 0) ? 1.0 : -1.0; };
    if (grid.dimension == 1) {
        for (int k = 0; k < M; ++k) {
            in[k][0] = sign_of(k) * u_hat[k];
            in[k][1] = 0.0;
        }
    } else {
        for (int k1 = 0; k1 < M; ++k1)
            for (int k2 = 0; k2 < M; ++k2) {
                std::size_t idx = static_cast<std::size_t>(k1) * M + k2;
                in[idx][0] = sign_of(k1 + k2) * u_hat[idx];
                in[idx][1] = 0.0;
            }
    }

    fftw_plan plan = (grid.dimension == 1)
                         ? fftw_plan_dft_1d(M, in.data(), out.data(), FFTW_FORWARD, FFTW_ESTIMATE)
                         : fftw_plan_dft_2d(M, M, in.data(), out.data(), FFTW_FORWARD,
                                            FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale1 = grid.dxi() / (2.0 * 3.14159265358979323846);
    const double scale = grid.dimension == 1 ? scale1 : scale1 * scale1;
    std::vector<double> u(total);
    double resid = 0.0;
    if (grid.dimension == 1) {
        for (int m = 0; m < M; ++m) {
            u[m] = scale * sign_of(m) * out[m][0];
            resid = std::max(resid, std::abs(scale * out[m][1]));
        }
    } else {
        for (int m1 = 0; m1 < M; ++m1)
            for (int m2 = 0; m2 < M; ++m2) {
                std::size_t idx = static_cast<std::size_t>(m1) * M + m2;
                u[idx] = scale * sign_of(m1 + m2) * out[idx][0];
                resid = std::max(resid, std::abs(scale * out[idx][1]));
            }
    }
    if (imag_residue) *imag_residue = resid;
    return u;
}

}  // namespace vodiff
