#pragma once

#include <string>
#include <vector>

#include "vodiff/symbol_spec.hpp"

namespace vodiff {

enum class Provenance { kSpectral, kOracle, kHybrid };

const char* to_string(Provenance p);

/** One output time: the solution multiplier u_hat on the frequency grid and
 * the synthesized real field u on the spatial grid, both in natural
 * (ascending coordinate) order, row-major for dimension 2. */
struct FieldSlice {
    double time;
    std::vector<double> u_hat;
    std::vector<double> u;
};

struct SpectralField {
    SpatialGrid grid;
    Provenance provenance = Provenance::kSpectral;
    std::vector<FieldSlice> slices;
    double max_imag_residue = 0.0;   // largest |Im| left by the synthesis
    double max_boundary_tail = 0.0;  // largest |u_hat| on the frequency-grid boundary

    std::size_t zero_xi_index() const;  // flattened index of xi = 0
};

/** Inverse-transforms u_hat (natural order) onto the spatial grid; returns
 * the real part and records the largest imaginary residue. */
std::vector<double> synthesize_field(const SpatialGrid& grid, const std::vector<double>& u_hat,
                                     double* imag_residue);

}  // namespace vodiff
