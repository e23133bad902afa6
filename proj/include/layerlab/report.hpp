#pragma once

#include <vector>

namespace layerlab {

// One row of energy bookkeeping for a single instance (one eps, one profile).
// delta is always (f_eps - f0)/eps as computed, never re-derived.
struct EnergyReport {
    double eps = 0.0;
    double f_eps = 0.0;   // F_eps(u_eps, h)
    double f0 = 0.0;      // F_0(u_0, h)
    double delta = 0.0;   // (f_eps - f0)/eps
    double f1 = 0.0;      // first-order coefficient F^(1)(u_0, h)
    double g_eps = 0.0;   // F_0 + eps*F^(1)
    double tangential_layer_energy = 0.0;
    double h1_bound_quantity = 0.0;  // |grad u|^2_Omega + eps|grad u|^2_layer + beta|u|^2_outer
    int n_b = 0;                     // boundary panels of the mesh (0 = closed form)
    int m = 0;                       // layer fibers (0 = closed form)
};

// delta-F table over a list of eps values, plus its one-term extrapolation.
struct RateTable {
    std::vector<EnergyReport> rows;
    double richardson = 0.0;
};

}  // namespace layerlab
