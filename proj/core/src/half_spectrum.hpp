#pragma once

#include <cstddef>
#include <vector>

#include "vodiff/symbol_spec.hpp"

namespace vodiff::detail {

// One distinct evaluation point of the frequency grid together with every
// flattened u_hat index it fills (itself plus its mirror, A(-xi) = A(xi)).
struct SpectrumPoint {
    double lambda;
    std::size_t targets[2];
    int num_targets;
};

inline std::vector<SpectrumPoint> half_spectrum(const SymbolSpec& sym, const SpatialGrid& grid) {
    const int M = grid.points;
    std::vector<SpectrumPoint> pts;
    if (grid.dimension == 1) {
        pts.reserve(M / 2 + 1);
        for (int k = 0; k <= M / 2; ++k) {
            double xi = grid.xi(k);
            SpectrumPoint p;
            p.lambda = sym(&xi);
            p.targets[0] = static_cast<std::size_t>(k);
            p.num_targets = 1;
            if (k >= 1 && k < M / 2) {
                p.targets[1] = static_cast<std::size_t>(M - k);
                p.num_targets = 2;
            }
            pts.push_back(p);
        }
        return pts;
    }
    pts.reserve(static_cast<std::size_t>(M / 2 + 1) * M + M / 2);
    for (int k1 = 0; k1 <= M / 2; ++k1)
        for (int k2 = 0; k2 < M; ++k2) {
            double xi[2] = {grid.xi(k1), grid.xi(k2)};
            SpectrumPoint p;
            p.lambda = sym(xi);
            p.targets[0] = static_cast<std::size_t>(k1) * M + k2;
            p.num_targets = 1;
            if (k1 >= 1 && k1 < M / 2 && k2 >= 1) {
                p.targets[1] = static_cast<std::size_t>(M - k1) * M + (M - k2);
                p.num_targets = 2;
            }
            pts.push_back(p);
        }
    for (int k1 = M / 2 + 1; k1 < M; ++k1) {  // row not reached by mirroring
        double xi[2] = {grid.xi(k1), grid.xi(0)};
        SpectrumPoint p;
        p.lambda = sym(xi);
        p.targets[0] = static_cast<std::size_t>(k1) * M;
        p.num_targets = 1;
        pts.push_back(p);
    }
    return pts;
}

}  // namespace vodiff::detail
