// SPDX-License-Identifier: Apache-2.0
//
// Complex two-port chain-matrix algebra and closed-form microstrip line
// parameters. Everything here is a pure function over value types.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lwa/constants.hpp"
#include "lwa/error.hpp"

namespace lwa {

struct substrate_spec {
    double eps_r = 1.0;      // relative permittivity
    double tan_delta = 0.0;  // loss tangent
    double height = 1e-3;    // substrate thickness, m

    void validate() const {
        if (eps_r < 1.0) throw std::invalid_argument("substrate: eps_r must be >= 1");
        if (tan_delta < 0.0) throw std::invalid_argument("substrate: tan_delta must be >= 0");
        if (height <= 0.0) throw std::invalid_argument("substrate: height must be > 0");
    }
};

struct line_params {
    double eps_eff = 1.0;   // effective permittivity
    double z0 = 50.0;       // characteristic impedance, ohms (real)
    double alpha_d = 0.0;   // dielectric attenuation, Np/m
};

struct two_port_abcd {
    cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    static two_port_abcd identity() { return {}; }
    cplx det() const { return a * d - b * c; }
    bool reciprocal(double tol = 1e-6) const { return std::abs(det() - 1.0) < tol; }
};

struct scatter_matrix {
    cplx s11, s12, s21, s22;
    double z_ref = 50.0;
};

namespace detail {

// Hammerstad-Jensen static effective permittivity for a zero-thickness strip.
inline double hj_eps_eff_static(double u, double eps_r) {
    const double a = 1.0
        + std::log((std::pow(u, 4) + std::pow(u / 52.0, 2)) / (std::pow(u, 4) + 0.432)) / 49.0
        + std::log(1.0 + std::pow(u / 18.1, 3)) / 18.7;
    const double b = 0.564 * std::pow((eps_r - 0.9) / (eps_r + 3.0), 0.053);
    return 0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) * std::pow(1.0 + 10.0 / u, -a * b);
}

// Hammerstad-Jensen homogeneous-medium impedance.
inline double hj_z01(double u) {
    const double f = 6.0 + (2.0 * constants::pi - 6.0) * std::exp(-std::pow(30.666 / u, 0.7528));
    return constants::eta0 / (2.0 * constants::pi)
         * std::log(f / u + std::sqrt(1.0 + std::pow(2.0 / u, 2)));
}

// Kobayashi frequency dispersion of eps_eff.
inline double kobayashi_eps_eff(double w, double h, double eps_r, double ee0, double f) {
    const double ratio = (ee0 - 1.0) / (eps_r - ee0);
    const double fk = constants::c0 * std::atan(eps_r * std::sqrt(ratio))
                    / (2.0 * constants::pi * h * std::sqrt(eps_r - ee0));
    const double f50 = fk / (0.75 + (0.75 - 0.332 / std::pow(eps_r, 1.73)) * (w / h));
    const double su = 1.0 / (1.0 + std::sqrt(w / h));
    const double m0 = 1.0 + su + 0.32 * su * su * su;
    double mc = 1.0;
    if (w / h <= 0.7)
        mc = 1.0 + 1.4 / (1.0 + w / h) * (0.15 - 0.235 * std::exp(-0.45 * f / f50));
    const double m = std::min(m0 * mc, 2.32);
    return eps_r - (eps_r - ee0) / (1.0 + std::pow(f / f50, m));
}

} // namespace detail

// Quasi-TEM microstrip parameters. Closed form: Hammerstad-Jensen static
// synthesis with the Kobayashi dispersion correction for eps_eff(f); z0
// rescales as 1/sqrt(eps_eff(f)). Dielectric loss uses the standard filling
// factor q = eps_r*(eps_eff-1)/(eps_eff*(eps_r-1)).
inline line_params microstrip_params(double width, const substrate_spec& sub, double f) {
    if (width <= 0.0) throw std::invalid_argument("microstrip_params: width must be > 0");
    if (f <= 0.0) throw std::invalid_argument("microstrip_params: frequency must be > 0");
    sub.validate();

    const double u = width / sub.height;
    if (sub.eps_r <= 1.0 + 1e-12) {
        // Homogeneous air line: no dielectric interface, no dielectric loss.
        return {1.0, detail::hj_z01(u), 0.0};
    }

    const double ee0 = detail::hj_eps_eff_static(u, sub.eps_r);
    const double ee = detail::kobayashi_eps_eff(width, sub.height, sub.eps_r, ee0, f);
    const double z0 = detail::hj_z01(u) / std::sqrt(ee);

    const double q_fill = sub.eps_r * (ee - 1.0) / (ee * (sub.eps_r - 1.0));
    const double alpha_d = constants::pi * f * std::sqrt(ee) / constants::c0
                         * sub.tan_delta * q_fill;
    return {ee, z0, alpha_d};
}

/// Propagation constant of the quasi-TEM line: alpha_d + j*k0*sqrt(eps_eff).
inline cplx line_gamma(const line_params& p, double f) {
    return {p.alpha_d, k0_of(f) * std::sqrt(p.eps_eff)};
}

inline two_port_abcd tline_abcd(const line_params& p, cplx gamma, double length) {
    if (length < 0.0) throw std::invalid_argument("tline_abcd: length must be >= 0");
    const cplx gl = gamma * length;
    const cplx ch = std::cosh(gl), sh = std::sinh(gl);
    return {ch, p.z0 * sh, sh / p.z0, ch};
}

inline two_port_abcd shunt_abcd(cplx y) {
    return {cplx{1.0}, cplx{0.0}, y, cplx{1.0}};
}

inline two_port_abcd series_abcd(cplx z) {
    return {cplx{1.0}, z, cplx{0.0}, cplx{1.0}};
}

/// Chain product; port 1 of `left` is the composite port 1.
inline two_port_abcd cascade(const two_port_abcd& l, const two_port_abcd& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

inline scatter_matrix abcd_to_s(const two_port_abcd& n, double z_ref) {
    if (z_ref <= 0.0) throw std::invalid_argument("abcd_to_s: z_ref must be > 0");
    const cplx denom = n.a * z_ref + n.b + n.c * z_ref * z_ref + n.d * z_ref;
    if (std::abs(denom) < 1e-30)
        throw degenerate_network_error("abcd_to_s: singular conversion denominator");
    scatter_matrix s;
    s.z_ref = z_ref;
    s.s11 = (n.a * z_ref + n.b - n.c * z_ref * z_ref - n.d * z_ref) / denom;
    s.s12 = 2.0 * n.det() * z_ref / denom;
    s.s21 = 2.0 * z_ref / denom;
    s.s22 = (-n.a * z_ref + n.b - n.c * z_ref * z_ref + n.d * z_ref) / denom;
    return s;
}

// Per-period Bloch propagation constant: cosh(gamma*d) = (a+d)/2, branch with
// Re(gamma) >= 0 (decaying forward wave); pure-imaginary ties resolved to
// Im(gamma) >= 0. Result lives in the principal zone |Im(gamma)*d| <= pi.
inline cplx bloch_gamma(const two_port_abcd& cell, double d_period) {
    if (d_period <= 0.0) throw std::invalid_argument("bloch_gamma: d_period must be > 0");
    if (!cell.reciprocal())
        throw std::invalid_argument("bloch_gamma: cell is not reciprocal (det != 1)");
    cplx g = std::acosh(0.5 * (cell.a + cell.d));
    if (g.real() < 0.0) g = -g;
    if (std::abs(g.real()) < 1e-14 && g.imag() < 0.0) g = -g;
    return g / d_period;
}

/// Bloch (image) impedance of a symmetric reciprocal cell (a == d).
inline cplx bloch_impedance(const two_port_abcd& cell, double d_period) {
    if (std::abs(cell.a - cell.d) > 1e-6 * (1.0 + std::abs(cell.a)))
        throw std::invalid_argument("bloch_impedance: cell must be symmetric (a == d)");
    const cplx g = bloch_gamma(cell, d_period);
    const cplx sh = std::sinh(g * d_period);
    if (std::abs(sh) < 1e-30)
        throw degenerate_network_error("bloch_impedance: cell is electrically transparent");
    return cell.b / sh;
}

} // namespace lwa
