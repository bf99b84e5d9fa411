// SPDX-License-Identifier: Apache-2.0
//
// Radiating aperture and far-field pattern.
//
// The aperture is sampled on two longitudinal source lines at y = +/-
// y_offset. Along x the travelling wave accumulates per-cell attenuation and
// phase; inside each cell the excess phase (beta_i - beta_line)*d is laid
// down as a raised-cosine bump around the loading plane, which is what gives
// the aperture its d-periodic content and hence the n = -1 space harmonic.
// Cell-to-cell the accumulated phase is exactly beta_i * d.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lwa/calibration.hpp"
#include "lwa/components.hpp"
#include "lwa/constants.hpp"
#include "lwa/dispersion.hpp"

namespace lwa {

struct transverse_weights {
    double a_left = 1.0;
    double a_right = 1.0;
    double psi = 0.0;       // rad, phase of right line minus left line
    double y_offset = 2.5e-3;
};

// Side amplitudes and transverse phase from the shorted-patch counts:
// a_s = 1 - sigma*N_s/6, psi = psi0*(N_L - N_R)/6. Positive psi steers the
// beam toward +y (phi > 0).
inline transverse_weights compute_transverse_weights(const control_state& state,
                                                     const calibration_constants& cal) {
    const double n = static_cast<double>(state.cells.size());
    transverse_weights w;
    w.a_left = 1.0 - cal.sigma * state.shorted_left() / n;
    w.a_right = 1.0 - cal.sigma * state.shorted_right() / n;
    w.psi = cal.psi0 * (state.shorted_left() - state.shorted_right()) / n;
    w.y_offset = cal.y_offset;
    return w;
}

struct aperture_sample {
    double x = 0.0;  // m
    double y = 0.0;  // m
    cplx e{0.0, 0.0};
};

struct aperture_field {
    std::vector<aperture_sample> samples;  // left line first, then right line
    int sub_samples_per_cell = 8;
    double dx = 0.0;  // uniform sample spacing, m
};

namespace detail {

// Local propagation at position x in [0, L]: margins run at the quasi-TEM
// slope, cells at beta_line + excess*bump around the cell center.
struct local_rate {
    double beta;
    double alpha;
};

inline local_rate local_propagation(const antenna_geometry& geom,
                                    const dispersion_sample& disp, double x, double f) {
    const double margin = geom.cell_margin();
    const double span = geom.n_cells * geom.cell_period;
    if (x >= margin && x < margin + span) {
        const int i = std::min(static_cast<int>((x - margin) / geom.cell_period),
                               geom.n_cells - 1);
        const auto& pc = disp.per_cell[static_cast<size_t>(i)];
        const double xi = x - geom.cell_center(i);
        const double bump = (1.0 + std::cos(2.0 * constants::pi * xi / geom.cell_period))
                          / geom.cell_period;
        const double excess = (pc.beta - pc.beta_line) * geom.cell_period;
        return {pc.beta_line + excess * bump, pc.alpha};
    }
    const line_params lp = microstrip_params(geom.width_at(x), geom.substrate, f);
    return {k0_of(f) * std::sqrt(lp.eps_eff), lp.alpha_d};
}

} // namespace detail

inline aperture_field build_aperture(const antenna_geometry& geom,
                                     const control_state& state,
                                     const calibration_constants& cal,
                                     double f,
                                     const dispersion_sample& disp,
                                     int sub_samples_per_cell = 8) {
    if (sub_samples_per_cell < 4)
        throw std::invalid_argument("build_aperture: need at least 4 sub-samples per cell");
    if (disp.per_cell.size() != static_cast<size_t>(geom.n_cells))
        throw std::invalid_argument("build_aperture: dispersion missing cells");

    const double dx = geom.cell_period / sub_samples_per_cell;
    const int n_samples = static_cast<int>(std::round(geom.length / dx));

    // March the accumulated attenuation/phase with sub-stepped midpoint
    // integration; the bump is smooth so this converges fast.
    const int sub = 8;
    std::vector<cplx> profile(static_cast<size_t>(n_samples));
    double amp_log = 0.0, phase = 0.0;
    double x = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double x_mid = (k + 0.5) * dx;
        // integrate from x to x_mid, record, then continue to segment end
        for (int half = 0; half < 2; ++half) {
            const double x_to = half == 0 ? x_mid : (k + 1.0) * dx;
            const double h = (x_to - x) / sub;
            for (int s = 0; s < sub; ++s) {
                const auto lr = detail::local_propagation(geom, disp, x + (s + 0.5) * h, f);
                amp_log -= lr.alpha * h;
                phase += lr.beta * h;
            }
            x = x_to;
            if (half == 0)
                profile[static_cast<size_t>(k)] = std::exp(cplx{amp_log, -phase});
        }
    }

    const transverse_weights w = compute_transverse_weights(state, cal);
    aperture_field ap;
    ap.sub_samples_per_cell = sub_samples_per_cell;
    ap.dx = dx;
    ap.samples.reserve(static_cast<size_t>(2 * n_samples));
    const cplx left_ph = std::exp(cplx{0.0, -0.5 * w.psi});
    const cplx right_ph = std::exp(cplx{0.0, +0.5 * w.psi});
    for (int k = 0; k < n_samples; ++k)
        ap.samples.push_back({(k + 0.5) * dx, -w.y_offset,
                              w.a_left * left_ph * profile[static_cast<size_t>(k)]});
    for (int k = 0; k < n_samples; ++k)
        ap.samples.push_back({(k + 0.5) * dx, +w.y_offset,
                              w.a_right * right_ph * profile[static_cast<size_t>(k)]});
    return ap;
}

/// Amplitude-weighted mean phase slope of the cell region, rad/m.
inline double mean_phase_slope(const dispersion_sample& disp, double d_period) {
    double wsum = 0.0, bsum = 0.0, decay = 0.0;
    for (const auto& pc : disp.per_cell) {
        const double w = std::exp(-(decay + 0.5 * pc.alpha * d_period));
        decay += pc.alpha * d_period;
        wsum += w;
        bsum += w * pc.beta;
    }
    return bsum / wsum;
}

struct pattern_grid {
    double theta_min = -90.0, theta_max = 90.0, theta_step = 1.0;  // degrees
    double phi_min = -90.0, phi_max = 90.0, phi_step = 1.0;        // degrees
    double element_exponent = 1.0;  // cos^p element factor

    int n_theta() const {
        return static_cast<int>(std::round((theta_max - theta_min) / theta_step)) + 1;
    }
    int n_phi() const {
        return static_cast<int>(std::round((phi_max - phi_min) / phi_step)) + 1;
    }
};

struct radiation_pattern {
    pattern_grid grid;
    std::vector<double> u;  // n_theta x n_phi, row-major in theta
    double f = 0.0;
    double total_power = 1.0;  // integral of u over the hemisphere

    double at(int it, int ip) const {
        return u[static_cast<size_t>(it) * static_cast<size_t>(grid.n_phi())
               + static_cast<size_t>(ip)];
    }
    double theta_of(int it) const { return grid.theta_min + it * grid.theta_step; }
    double phi_of(int ip) const { return grid.phi_min + ip * grid.phi_step; }
};

// Radiation intensity over the visible hemisphere. Directions are
// r = (sin(theta), cos(theta)sin(phi), cos(theta)cos(phi)) with x the antenna
// axis and z broadside; u = |sum_k e_k exp(j k0 (x_k r_x + y_k r_y))|^2 * EF,
// EF = cos^p of the angle from broadside. u is scaled so its hemisphere
// integral equals total_power.
inline radiation_pattern compute_pattern(const aperture_field& ap, double f,
                                         const pattern_grid& grid = {},
                                         double total_power = 1.0) {
    if (ap.samples.empty())
        throw std::invalid_argument("compute_pattern: empty aperture");
    const double k0 = k0_of(f);
    const int nt = grid.n_theta(), np = grid.n_phi();

    // Group samples by line (unique y) so the x-sum is shared across phi.
    std::vector<double> ys;
    std::vector<size_t> group_of(ap.samples.size());
    for (size_t k = 0; k < ap.samples.size(); ++k) {
        auto it = std::find(ys.begin(), ys.end(), ap.samples[k].y);
        if (it == ys.end()) { ys.push_back(ap.samples[k].y); it = std::prev(ys.end()); }
        group_of[k] = static_cast<size_t>(it - ys.begin());
    }

    radiation_pattern pat;
    pat.grid = grid;
    pat.f = f;
    pat.u.assign(static_cast<size_t>(nt) * static_cast<size_t>(np), 0.0);

    std::vector<cplx> line_sum(ys.size());
    for (int it = 0; it < nt; ++it) {
        const double th = deg2rad(grid.theta_min + it * grid.theta_step);
        const double sin_th = std::sin(th), cos_th = std::cos(th);
        std::fill(line_sum.begin(), line_sum.end(), cplx{0.0, 0.0});
        for (size_t k = 0; k < ap.samples.size(); ++k)
            line_sum[group_of[k]] +=
                ap.samples[k].e * std::exp(cplx{0.0, k0 * ap.samples[k].x * sin_th});
        for (int ip = 0; ip < np; ++ip) {
            const double ph = deg2rad(grid.phi_min + ip * grid.phi_step);
            const double ry = cos_th * std::sin(ph);
            cplx fsum{0.0, 0.0};
            for (size_t g = 0; g < ys.size(); ++g)
                fsum += line_sum[g] * std::exp(cplx{0.0, k0 * ys[g] * ry});
            const double broadside_cos = std::max(cos_th * std::cos(ph), 0.0);
            pat.u[static_cast<size_t>(it) * static_cast<size_t>(np)
                + static_cast<size_t>(ip)] =
                std::norm(fsum) * std::pow(broadside_cos, grid.element_exponent);
        }
    }

    // Normalize the hemisphere integral (dOmega = cos(theta) dtheta dphi).
    double integral = 0.0;
    const double dth = deg2rad(grid.theta_step), dph = deg2rad(grid.phi_step);
    for (int it = 0; it < nt; ++it) {
        const double cos_th = std::cos(deg2rad(pat.theta_of(it)));
        double row = 0.0;
        for (int ip = 0; ip < np; ++ip) row += pat.at(it, ip);
        integral += row * std::max(cos_th, 0.0) * dth * dph;
    }
    if (integral <= 0.0)
        throw std::invalid_argument("compute_pattern: pattern has no radiated power");
    const double scale = total_power / integral;
    for (auto& v : pat.u) v *= scale;
    pat.total_power = total_power;
    return pat;
}

/// Hemisphere integral of u (quadrature self-consistency check).
inline double pattern_integral(const radiation_pattern& pat) {
    double integral = 0.0;
    const double dth = deg2rad(pat.grid.theta_step), dph = deg2rad(pat.grid.phi_step);
    for (int it = 0; it < pat.grid.n_theta(); ++it) {
        const double cos_th = std::cos(deg2rad(pat.theta_of(it)));
        double row = 0.0;
        for (int ip = 0; ip < pat.grid.n_phi(); ++ip) row += pat.at(it, ip);
        integral += row * std::max(cos_th, 0.0) * dth * dph;
    }
    return integral;
}

struct pattern_metrics {
    double theta_peak = 0.0;       // degrees
    double phi_peak = 0.0;         // degrees
    double directivity_dbi = 0.0;
    double realized_gain_dbi = 0.0;
    double hpbw_theta = 0.0;       // degrees
    double hpbw_phi = 0.0;         // degrees
    bool peak_on_boundary = false;
};

namespace detail {

// Vertex of the parabola through three equally spaced samples.
inline double parabolic_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) < 1e-300) return 0.0;
    return std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
}

// -3 dB width of a 1-D cut around index peak; linear crossing interpolation.
inline double half_power_width(const std::vector<double>& cut, int peak, double step) {
    const double half = cut[static_cast<size_t>(peak)] * 0.5;
    double left = 0.0, right = 0.0;
    bool found_l = false, found_r = false;
    for (int i = peak; i > 0; --i) {
        if (cut[static_cast<size_t>(i - 1)] < half) {
            const double t = (cut[static_cast<size_t>(i)] - half)
                           / (cut[static_cast<size_t>(i)] - cut[static_cast<size_t>(i - 1)]);
            left = (peak - i + t) * step;
            found_l = true;
            break;
        }
    }
    for (int i = peak; i + 1 < static_cast<int>(cut.size()); ++i) {
        if (cut[static_cast<size_t>(i + 1)] < half) {
            const double t = (cut[static_cast<size_t>(i)] - half)
                           / (cut[static_cast<size_t>(i)] - cut[static_cast<size_t>(i + 1)]);
            right = (i - peak + t) * step;
            found_r = true;
            break;
        }
    }
    if (found_l && found_r) return left + right;
    if (found_l) return 2.0 * left;
    if (found_r) return 2.0 * right;
    return (static_cast<double>(cut.size()) - 1.0) * step;  // beam wider than the cut
}

} // namespace detail

inline pattern_metrics compute_pattern_metrics(const radiation_pattern& pat,
                                               const power_budget& budget) {
    const int nt = pat.grid.n_theta(), np = pat.grid.n_phi();
    int bt = 0, bp = 0;
    double u_max = -1.0;
    for (int it = 0; it < nt; ++it)
        for (int ip = 0; ip < np; ++ip)
            if (pat.at(it, ip) > u_max) { u_max = pat.at(it, ip); bt = it; bp = ip; }

    pattern_metrics m;
    m.peak_on_boundary = (bt == 0 || bt == nt - 1 || bp == 0 || bp == np - 1);

    double dt = 0.0, dp = 0.0, u_ref = u_max;
    if (!m.peak_on_boundary) {
        // Separable parabolic refinement of the peak position and value.
        const double ctt = pat.at(bt - 1, bp) - 2.0 * u_max + pat.at(bt + 1, bp);
        const double cpp = pat.at(bt, bp - 1) - 2.0 * u_max + pat.at(bt, bp + 1);
        dt = detail::parabolic_offset(pat.at(bt - 1, bp), u_max, pat.at(bt + 1, bp));
        dp = detail::parabolic_offset(pat.at(bt, bp - 1), u_max, pat.at(bt, bp + 1));
        u_ref = std::max(u_max, u_max - 0.5 * (ctt * dt * dt + cpp * dp * dp));
    }
    m.theta_peak = pat.theta_of(bt) + dt * pat.grid.theta_step;
    m.phi_peak = pat.phi_of(bp) + dp * pat.grid.phi_step;

    const double directivity = 4.0 * constants::pi * u_ref / pattern_integral(pat);
    m.directivity_dbi = 10.0 * std::log10(directivity);
    const double eta = budget.radiation_efficiency();
    const double mismatch = 1.0 - budget.p_reflected;
    m.realized_gain_dbi = 10.0 * std::log10(directivity * eta * mismatch);

    std::vector<double> cut_t(static_cast<size_t>(nt)), cut_p(static_cast<size_t>(np));
    for (int it = 0; it < nt; ++it) cut_t[static_cast<size_t>(it)] = pat.at(it, bp);
    for (int ip = 0; ip < np; ++ip) cut_p[static_cast<size_t>(ip)] = pat.at(bt, ip);
    m.hpbw_theta = detail::half_power_width(cut_t, bt, pat.grid.theta_step);
    m.hpbw_phi = detail::half_power_width(cut_p, bp, pat.grid.phi_step);
    return m;
}

/// Great-circle angle in degrees between two (theta, phi) directions.
inline double angular_error_deg(double t1, double p1, double t2, double p2) {
    const auto dir = [](double t, double p) {
        const double th = deg2rad(t), ph = deg2rad(p);
        return std::array<double, 3>{std::sin(th), std::cos(th) * std::sin(ph),
                                     std::cos(th) * std::cos(ph)};
    };
    const auto a = dir(t1, p1), b = dir(t2, p2);
    const double dot = std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
    return rad2deg(std::acos(dot));
}

} // namespace lwa
