// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace lwa {

// Constants fitted against the anchor observables. They absorb what a
// full-wave model knows and this reduced-order model does not: how strongly
// the varactors load the radiating edge (kappa, c_gap, c_fringe_per_m), the
// electrical narrowing of the transverse resonance by the ground-side via
// fence (w_eff_factor), the leakage scale (g_leak) and the transverse
// two-line source parameters (sigma, psi0, y_offset).
struct calibration_constants {
    double c_gap = 10e-12;          // F, series gap to the varactor branch
    double kappa = 0.0425;          // edge-coupling (tap) factor, 0..1
    double c_fringe_per_m = 0.8e-12; // F/m, static fringe loading per side
    double w_eff_factor = 0.64;     // transverse effective-width factor, 0..1
    double g_leak = 0.08;           // leakage scale (dimensionless)
    double sigma = 0.8;             // side attenuation at full shorting, 0..1
    double psi0 = 2.3;              // rad, transverse phase at full asymmetry
    double y_offset = 2.5e-3;       // m, half spacing of the two source lines

    void validate() const {
        if (c_gap < 0.0 || kappa < 0.0 || c_fringe_per_m < 0.0 || g_leak < 0.0 ||
            sigma < 0.0 || psi0 < 0.0 || y_offset < 0.0 || w_eff_factor < 0.0)
            throw std::invalid_argument("calibration: constants must be nonnegative");
        if (sigma > 1.0) throw std::invalid_argument("calibration: sigma must be <= 1");
        if (kappa > 1.0) throw std::invalid_argument("calibration: kappa must be <= 1");
        if (w_eff_factor > 1.0 || w_eff_factor <= 0.0)
            throw std::invalid_argument("calibration: w_eff_factor must be in (0, 1]");
    }
};

} // namespace lwa
