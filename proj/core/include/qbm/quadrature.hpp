// quadrature.hpp: Gauss–Legendre rules

#pragma once

#include <vector>

namespace qbm {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss–Legendre rule, computed by Newton iteration on P_n and cached.
// The returned reference stays valid for the lifetime of the program.
const GaussLegendreRule& gauss_legendre(int n);

// Nodes/weights mapped onto [a, b].
GaussLegendreRule gauss_legendre_on(int n, double a, double b);

} // namespace qbm
