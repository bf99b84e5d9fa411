// SPDX-License-Identifier: Apache-2.0
//
// Lumped models for the tuning elements: varactor (C-V law, finite Q as a
// series resistance) and switching diode (on/off branch with via inductance),
// plus the 24-way control state (12 capacitances, 12 diode bits).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "lwa/constants.hpp"

namespace lwa {

struct varactor_spec {
    double c_min = 0.2e-12;   // F
    double c_max = 1.0e-12;   // F
    double q_at_f0 = 15.0;    // quality factor at f0_q
    double f0_q = 31e9;       // Hz
    // Abrupt-junction C(V) = cv_c0 / (1 + V/cv_vj)^cv_m, clamped to range.
    double cv_c0 = 1.0e-12;   // F
    double cv_vj = 0.7;       // V
    double cv_m = 0.5;
    // Optional Q-vs-frequency table for sensitivity studies; empty = constant.
    std::map<double, double> q_table;

    void validate() const {
        if (!(c_min > 0.0 && c_min < c_max))
            throw std::invalid_argument("varactor: need 0 < c_min < c_max");
        if (q_at_f0 <= 0.0) throw std::invalid_argument("varactor: q_at_f0 must be > 0");
    }
};

struct diode_spec {
    double r_on = 1.0;       // ohms
    double c_off = 25e-15;   // F
    double l_via = 30e-12;   // H, lumped equivalent of the 5-via row

    void validate() const {
        if (r_on < 0.0 || c_off < 0.0 || l_via < 0.0)
            throw std::invalid_argument("diode: r_on, c_off, l_via must be >= 0");
    }
};

// Loading of one unit cell: varactor capacitance and diode state on each edge.
struct cell_loading {
    int cell_index = 1;        // 1-based
    double c_left = 0.6e-12;   // F
    double c_right = 0.6e-12;  // F
    bool diode_left = false;   // true = patch shorted
    bool diode_right = false;
};

struct control_state {
    std::vector<cell_loading> cells;

    static control_state uniform(double c, int n_cells) {
        control_state s;
        s.cells.resize(static_cast<size_t>(n_cells));
        for (int i = 0; i < n_cells; ++i) {
            s.cells[static_cast<size_t>(i)].cell_index = i + 1;
            s.cells[static_cast<size_t>(i)].c_left = c;
            s.cells[static_cast<size_t>(i)].c_right = c;
        }
        return s;
    }

    int shorted_left() const {
        int n = 0;
        for (const auto& c : cells) n += c.diode_left ? 1 : 0;
        return n;
    }
    int shorted_right() const {
        int n = 0;
        for (const auto& c : cells) n += c.diode_right ? 1 : 0;
        return n;
    }
    /// N_L - N_R in [-n_cells, n_cells].
    int asymmetry_index() const { return shorted_left() - shorted_right(); }

    // Canonical diode pattern for a given asymmetry index: shorted patches
    // fill contiguously from the port-1 end on one side only.
    void set_asymmetry(int index) {
        const int n = static_cast<int>(cells.size());
        for (auto& c : cells) { c.diode_left = false; c.diode_right = false; }
        for (int i = 0; i < std::min(std::abs(index), n); ++i) {
            if (index > 0) cells[static_cast<size_t>(i)].diode_left = true;
            else cells[static_cast<size_t>(i)].diode_right = true;
        }
    }

    /// Bits 0..n-1 = left diodes (cell 1 first), bits n..2n-1 = right diodes.
    std::uint32_t diode_bits() const {
        std::uint32_t bits = 0;
        const int n = static_cast<int>(cells.size());
        for (int i = 0; i < n; ++i) {
            if (cells[static_cast<size_t>(i)].diode_left) bits |= 1u << i;
            if (cells[static_cast<size_t>(i)].diode_right) bits |= 1u << (n + i);
        }
        return bits;
    }

    void mirror_sides() {
        for (auto& c : cells) std::swap(c.diode_left, c.diode_right);
    }

    void validate(const varactor_spec& v) const {
        const double lo = v.c_min * (1.0 - 1e-12), hi = v.c_max * (1.0 + 1e-12);
        for (const auto& c : cells)
            if (c.c_left < lo || c.c_left > hi || c.c_right < lo || c.c_right > hi)
                throw std::invalid_argument("control_state: capacitance out of [c_min, c_max]");
    }
};

// Series-resistance Q model: R_s = 1/(omega_q * c * Q), frequency-independent
// after evaluation at f0_q.
inline cplx varactor_impedance(double c, const varactor_spec& spec, double f) {
    if (f <= 0.0) throw std::invalid_argument("varactor_impedance: f must be > 0");
    if (c < spec.c_min * (1.0 - 1e-12) || c > spec.c_max * (1.0 + 1e-12))
        throw std::invalid_argument("varactor_impedance: c out of [c_min, c_max]");
    const double omega_q = 2.0 * constants::pi * spec.f0_q;
    const double r_s = std::isfinite(spec.q_at_f0) ? 1.0 / (omega_q * c * spec.q_at_f0) : 0.0;
    const double omega = 2.0 * constants::pi * f;
    return {r_s, -1.0 / (omega * c)};
}

inline double varactor_cv(double v, const varactor_spec& spec) {
    if (v < 0.0) throw std::invalid_argument("varactor_cv: bias must be >= 0");
    const double c = spec.cv_c0 / std::pow(1.0 + v / spec.cv_vj, spec.cv_m);
    return std::min(std::max(c, spec.c_min), spec.c_max);
}

// Branch impedance of one switched patch. Off with c_off = 0 is an absent
// branch; the impedance is reported as infinite and the admittance as zero.
inline cplx diode_branch(bool on, const diode_spec& spec, double f) {
    if (f <= 0.0) throw std::invalid_argument("diode_branch: f must be > 0");
    const double omega = 2.0 * constants::pi * f;
    if (on) return {spec.r_on, omega * spec.l_via};
    if (spec.c_off <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    return {0.0, omega * spec.l_via - 1.0 / (omega * spec.c_off)};
}

inline cplx diode_admittance(bool on, const diode_spec& spec, double f) {
    const cplx z = diode_branch(on, spec, f);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {0.0, 0.0};
    if (std::abs(z) < 1e-30) return {1e30, 0.0};
    return 1.0 / z;
}

// Q used by sensitivity studies: constant in band by default, linear
// interpolation when a table is configured. Queries outside the table (or the
// configured band) are a range error.
inline double q_interp(double f, const varactor_spec& spec,
                       double band_lo = 20e9, double band_hi = 50e9) {
    if (f < band_lo || f > band_hi)
        throw std::out_of_range("q_interp: frequency outside configured band");
    if (spec.q_table.empty()) return spec.q_at_f0;
    auto hi = spec.q_table.lower_bound(f);
    if (hi == spec.q_table.begin()) {
        if (f < hi->first) throw std::out_of_range("q_interp: below table range");
        return hi->second;
    }
    if (hi == spec.q_table.end())
        throw std::out_of_range("q_interp: above table range");
    auto lo = std::prev(hi);
    if (hi->first == f) return hi->second;
    const double t = (f - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

} // namespace lwa
