// SPDX-License-Identifier: Apache-2.0
//
// Leaky-mode dispersion of the loaded half-width line.
//
// Per cell, a transverse-resonance model gives the transverse wavenumber
// tau = k_t^2 from the edge loading chi, and the phase constant follows from
// beta^2 = eps_eff*k0^2 - tau. The varactors raise chi, lowering tau and
// raising beta; the d-periodic loading makes the n = -1 space harmonic the
// radiating one over most of the band. The longitudinal two-port cascade
// reuses the same per-cell result for port quantities and the power budget.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lwa/calibration.hpp"
#include "lwa/components.hpp"
#include "lwa/constants.hpp"
#include "lwa/twoport.hpp"

namespace lwa {

struct antenna_geometry {
    double length = 39e-3;        // radiating length L, m
    double port_to_port = 45e-3;  // m
    double width_feed = 2.0e-3;   // m, at the ports
    double width_mid = 2.5e-3;    // m, at the middle of the line
    double cell_period = 5e-3;    // d, m
    int n_cells = 6;
    substrate_spec substrate{3.66, 0.0037, 1.55e-3};

    void validate() const {
        substrate.validate();
        if (!(width_mid >= width_feed && width_feed > 0.0))
            throw std::invalid_argument("geometry: need width_mid >= width_feed > 0");
        if (n_cells < 1 || cell_period <= 0.0)
            throw std::invalid_argument("geometry: need n_cells >= 1 and cell_period > 0");
        if (n_cells * cell_period > length + 1e-12)
            throw std::invalid_argument("geometry: n_cells * cell_period must fit in length");
        if (port_to_port < length)
            throw std::invalid_argument("geometry: port_to_port must be >= length");
    }

    /// Strip width at position x in [0, L]; linear taper feed -> mid -> feed.
    double width_at(double x) const {
        const double xm = 0.5 * length;
        const double t = 1.0 - std::abs(x - xm) / xm;
        return width_feed + (width_mid - width_feed) * std::clamp(t, 0.0, 1.0);
    }

    /// Unloaded margin between the ends and the first/last cell.
    double cell_margin() const { return 0.5 * (length - n_cells * cell_period); }
    double cell_center(int i) const { return cell_margin() + (i + 0.5) * cell_period; }
    double feed_stub_length() const { return 0.5 * (port_to_port - length); }
};

struct harmonic_angle {
    int n = 0;
    double theta_deg = 0.0;
    bool radiating = false;
};

struct per_cell_dispersion {
    double beta = 0.0;       // rad/m
    double alpha = 0.0;      // Np/m, leak + dielectric + component
    double alpha_leak = 0.0; // Np/m, radiation part of alpha
    double alpha_comp = 0.0; // Np/m, varactor-loss part of alpha
    double tau = 0.0;        // k_t^2, (rad/m)^2, may be negative
    double eps_eff = 1.0;
    double beta_line = 0.0;  // quasi-TEM phase constant at the local width
    double alpha_d = 0.0;    // Np/m
    double z_qtem = 50.0;    // ohms
    double z_mode = 50.0;    // loaded-mode impedance used in the cascade
    double g_diode_cell = 0.0; // S, lumped diode-loss conductance
    bool evanescent = false;
};

struct dispersion_sample {
    double f = 0.0;
    double k0 = 0.0;
    double k_t_sq = 0.0;   // aggregate tau consistent with beta
    double beta = 0.0;     // amplitude-weighted mean over cells
    double alpha = 0.0;    // amplitude-weighted mean over cells
    double eps_eff = 1.0;  // amplitude-weighted mean over cells
    std::vector<per_cell_dispersion> per_cell;
};

// Transverse-resonance root: the unique tau = k_t^2 in (-inf, (pi/w)^2) with
//   g(tau) = chi,  g(tau) = sqrt(tau)*cot(sqrt(tau)*w)   for tau > 0,
//   g(0) = 1/w,    g(tau) = sqrt(-tau)*coth(sqrt(-tau)*w) for tau < 0.
// g is strictly decreasing there, so bisection is exact. chi >= 0 keeps the
// root at or below the unloaded quarter-wave resonance (pi/(2w))^2.
inline double transverse_root(double width, double chi) {
    if (width <= 0.0) throw std::invalid_argument("transverse_root: width must be > 0");
    if (chi < 0.0) throw std::invalid_argument("transverse_root: chi must be >= 0");
    if (chi == 0.0) {
        const double kt = constants::pi / (2.0 * width);
        return kt * kt;
    }
    const double g0 = 1.0 / width;
    if (std::abs(chi - g0) < 1e-9 * g0) return 0.0;

    if (chi < g0) {
        // tau > 0 branch: solve u*cot(u) = chi*w for u = sqrt(tau)*w in (0, pi/2).
        const double target = chi * width;
        double lo = 1e-12, hi = constants::pi / 2.0;
        for (int it = 0; it < 200; ++it) {
            const double u = 0.5 * (lo + hi);
            const double val = u / std::tan(u);
            if (val > target) lo = u; else hi = u;
        }
        const double u = 0.5 * (lo + hi);
        return (u / width) * (u / width);
    }
    // tau < 0 branch: solve s*coth(s*w) = chi for s = sqrt(-tau) in (0, chi).
    double lo = 0.0, hi = chi;
    for (int it = 0; it < 200; ++it) {
        const double s = 0.5 * (lo + hi);
        const double val = (s < 1e-12) ? g0 : s / std::tanh(s * width);
        if (val < chi) lo = s; else hi = s;
    }
    const double s = 0.5 * (lo + hi);
    return -s * s;
}

// Per-side distributed edge loading. The varactor couples to the radiating
// edge through the gap capacitance and the tap factor kappa:
//   C' = kappa * series(C_gap, C_var) / d + C'_fringe,   chi = omega^2 mu0 h C'.
struct edge_chi {
    double left = 0.0;
    double right = 0.0;
    double total() const { return left + right; }
};

inline double series_cap(double c_gap, double c_var) {
    if (c_var <= 0.0) return 0.0;
    if (!std::isfinite(c_gap)) return c_var;
    if (c_gap <= 0.0) return 0.0;
    return c_gap * c_var / (c_gap + c_var);
}

inline edge_chi edge_loading(const cell_loading& cell, const calibration_constants& cal,
                             double d_period, double f, const substrate_spec& sub) {
    const double omega = 2.0 * constants::pi * f;
    const double scale = omega * omega * constants::mu0 * sub.height;
    const double cl = cal.kappa * series_cap(cal.c_gap, cell.c_left) / d_period + cal.c_fringe_per_m;
    const double cr = cal.kappa * series_cap(cal.c_gap, cell.c_right) / d_period + cal.c_fringe_per_m;
    return {scale * cl, scale * cr};
}

namespace detail {

// Re(Y) of one varactor edge branch as loaded onto the line (tap included).
inline double branch_conductance(double c_var, const varactor_spec& vspec,
                                 const calibration_constants& cal, double f, double q_override) {
    if (c_var <= 0.0) return 0.0;
    varactor_spec vs = vspec;
    if (q_override > 0.0) vs.q_at_f0 = q_override;
    cplx z = varactor_impedance(c_var, vs, f);
    if (std::isfinite(cal.c_gap) && cal.c_gap > 0.0)
        z += cplx{0.0, -1.0 / (2.0 * constants::pi * f * cal.c_gap)};
    const cplx y = cal.kappa / z;
    return std::max(y.real(), 0.0);
}

} // namespace detail

// Dispersion of one loaded cell. q_override > 0 substitutes the varactor Q
// (used by the sensitivity study); 0 keeps the spec value.
inline per_cell_dispersion cell_dispersion(const antenna_geometry& geom,
                                           const cell_loading& cell,
                                           const varactor_spec& vspec,
                                           const diode_spec& dspec,
                                           const calibration_constants& cal,
                                           double f, double q_override = 0.0) {
    per_cell_dispersion out;
    const double x = geom.cell_center(cell.cell_index - 1);
    const double w = geom.width_at(x);
    const line_params lp = microstrip_params(w, geom.substrate, f);
    const double k0 = k0_of(f);

    out.eps_eff = lp.eps_eff;
    out.alpha_d = lp.alpha_d;
    out.z_qtem = lp.z0;
    out.beta_line = k0 * std::sqrt(lp.eps_eff);

    const edge_chi chi = edge_loading(cell, cal, geom.cell_period, f, geom.substrate);
    out.tau = transverse_root(cal.w_eff_factor * w, chi.total());

    const double b2 = lp.eps_eff * k0 * k0 - out.tau;
    double alpha_react = 0.0;
    if (b2 >= 0.0) {
        out.beta = std::sqrt(b2);
    } else {
        // Below-cutoff cell: flagged, reactive decay folded into alpha.
        out.beta = 0.0;
        out.evanescent = true;
        alpha_react = std::sqrt(-b2);
    }

    // Loaded-mode impedance: shunt loading scales Z as beta_line/beta.
    const double beta_guard = std::max(out.beta, 0.2 * k0);
    out.z_mode = lp.z0 * out.beta_line / beta_guard;

    // Perturbational leakage: fixed edge conductance over the carried power,
    // one global scale g_leak.
    out.alpha_leak = cal.g_leak * k0 * k0 / beta_guard;

    // Per-unit-length equivalent of the varactor series loss.
    const double g_var = detail::branch_conductance(cell.c_left, vspec, cal, f, q_override)
                       + detail::branch_conductance(cell.c_right, vspec, cal, f, q_override);
    const double alpha_comp = 0.5 * g_var * out.z_mode / geom.cell_period;

    out.alpha_comp = alpha_comp;
    out.alpha = out.alpha_leak + lp.alpha_d + alpha_comp + alpha_react;

    // Lumped diode-loss conductance seen by the cascade.
    const cplx yd_l = diode_admittance(cell.diode_left, dspec, f);
    const cplx yd_r = diode_admittance(cell.diode_right, dspec, f);
    out.g_diode_cell = cal.kappa * std::max(yd_l.real() + yd_r.real(), 0.0);
    return out;
}

// Whole-antenna dispersion sample. The aggregate beta/alpha are the
// amplitude-weighted means over cells (weights follow the travelling-wave
// decay), and k_t_sq is stored consistently with the aggregate beta.
inline dispersion_sample antenna_dispersion(const antenna_geometry& geom,
                                            const control_state& state,
                                            const varactor_spec& vspec,
                                            const diode_spec& dspec,
                                            const calibration_constants& cal,
                                            double f, double q_override = 0.0) {
    dispersion_sample s;
    s.f = f;
    s.k0 = k0_of(f);
    s.per_cell.reserve(state.cells.size());
    double wsum = 0.0, bsum = 0.0, asum = 0.0, esum = 0.0;
    double decay = 0.0;
    for (const auto& cell : state.cells) {
        per_cell_dispersion pc = cell_dispersion(geom, cell, vspec, dspec, cal, f, q_override);
        const double wgt = std::exp(-(decay + 0.5 * pc.alpha * geom.cell_period));
        decay += pc.alpha * geom.cell_period;
        wsum += wgt;
        bsum += wgt * pc.beta;
        asum += wgt * pc.alpha;
        esum += wgt * pc.eps_eff;
        s.per_cell.push_back(pc);
    }
    s.beta = bsum / wsum;
    s.alpha = asum / wsum;
    s.eps_eff = esum / wsum;
    s.k_t_sq = s.eps_eff * s.k0 * s.k0 - s.beta * s.beta;
    return s;
}

// Floquet harmonic angles theta_n = asin((beta + 2*pi*n/d)/k0), positive
// toward port 2. Non-radiating harmonics are flagged, not dropped.
inline std::vector<harmonic_angle> harmonic_angles(double beta, double /*alpha*/, double f,
                                                   double d_period,
                                                   int n_lo = -2, int n_hi = 1) {
    if (f <= 0.0) throw std::invalid_argument("harmonic_angles: f must be > 0");
    const double k0 = k0_of(f);
    std::vector<harmonic_angle> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double bn = beta + 2.0 * constants::pi * n / d_period;
        harmonic_angle h;
        h.n = n;
        h.radiating = std::abs(bn) <= k0;
        h.theta_deg = h.radiating ? rad2deg(std::asin(bn / k0))
                                  : (bn > 0.0 ? 90.0 : -90.0);
        out.push_back(h);
    }
    return out;
}

/// The radiating harmonic of largest index (closest to n = 0), if any.
inline std::optional<harmonic_angle> dominant_harmonic(double beta, double f, double d_period) {
    auto hs = harmonic_angles(beta, 0.0, f, d_period, -3, 1);
    std::optional<harmonic_angle> best;
    for (const auto& h : hs)
        if (h.radiating && (!best || h.n > best->n)) best = h;
    return best;
}

namespace detail {

struct cascade_element {
    two_port_abcd abcd;
    double frac_radiated = 0.0;  // share of this element's absorption that leaves
                                 // as radiation (alpha_leak / alpha_total)
};

// Ordered element list, port 1 first. Taper sections are piecewise-constant
// sub-segments with linear width interpolation; loaded cells run at the
// leaky-mode gamma and Bloch-scaled impedance so the two-port view stays
// consistent with the dispersion view. Diode losses enter as small shunt
// conductances at the cell planes.
inline std::vector<cascade_element> build_cascade(const antenna_geometry& geom,
                                                  const control_state& state,
                                                  const varactor_spec& vspec,
                                                  const diode_spec& dspec,
                                                  const calibration_constants& cal,
                                                  double f, double q_override,
                                                  int taper_segments = 8) {
    std::vector<cascade_element> elems;
    const auto add_plain = [&](double x0, double x1) {
        if (x1 <= x0) return;
        const int nseg = std::max(1, static_cast<int>(std::ceil(
            (x1 - x0) / (geom.cell_period / taper_segments))));
        for (int i = 0; i < nseg; ++i) {
            const double a = x0 + (x1 - x0) * i / nseg;
            const double b = x0 + (x1 - x0) * (i + 1) / nseg;
            const line_params lp = microstrip_params(geom.width_at(0.5 * (a + b)),
                                                     geom.substrate, f);
            elems.push_back({tline_abcd(lp, line_gamma(lp, f), b - a), 0.0});
        }
    };

    // Feed stub outside the radiating length, at the feed width.
    const line_params feed = microstrip_params(geom.width_feed, geom.substrate, f);
    if (geom.feed_stub_length() > 0.0)
        elems.push_back({tline_abcd(feed, line_gamma(feed, f), geom.feed_stub_length()), 0.0});

    add_plain(0.0, geom.cell_margin());

    for (const auto& cell : state.cells) {
        const per_cell_dispersion pc =
            cell_dispersion(geom, cell, vspec, dspec, cal, f, q_override);
        line_params mode_lp;
        mode_lp.eps_eff = pc.eps_eff;
        mode_lp.z0 = pc.z_mode;
        mode_lp.alpha_d = pc.alpha_d;
        const cplx gamma{pc.alpha, pc.beta};
        const double frac = pc.alpha > 0.0 ? pc.alpha_leak / pc.alpha : 0.0;
        const two_port_abcd half = tline_abcd(mode_lp, gamma, 0.5 * geom.cell_period);
        elems.push_back({half, frac});
        if (pc.g_diode_cell > 0.0)
            elems.push_back({shunt_abcd(cplx{pc.g_diode_cell, 0.0}), 0.0});
        elems.push_back({half, frac});
    }

    add_plain(geom.length - geom.cell_margin(), geom.length);

    if (geom.feed_stub_length() > 0.0)
        elems.push_back({tline_abcd(feed, line_gamma(feed, f), geom.feed_stub_length()), 0.0});
    return elems;
}

} // namespace detail

/// Port scattering of the full antenna cascade at real z_ref.
inline scatter_matrix antenna_two_port(const antenna_geometry& geom,
                                       const control_state& state,
                                       const varactor_spec& vspec,
                                       const diode_spec& dspec,
                                       const calibration_constants& cal,
                                       double f, double z_ref = 50.0,
                                       double q_override = 0.0) {
    geom.validate();
    state.validate(vspec);
    const auto elems = detail::build_cascade(geom, state, vspec, dspec, cal, f, q_override);
    two_port_abcd net = two_port_abcd::identity();
    for (const auto& e : elems) net = cascade(net, e.abcd);
    return abcd_to_s(net, z_ref);
}

struct power_budget {
    double p_reflected = 0.0;
    double p_through = 0.0;
    double p_radiated = 0.0;
    double p_dissipated = 0.0;

    double sum() const { return p_reflected + p_through + p_radiated + p_dissipated; }
    double radiation_efficiency() const {
        const double den = p_radiated + p_dissipated;
        return den > 0.0 ? p_radiated / den : 1.0;
    }
};

// Power split of the incident wave: reflected at port 1, delivered to the
// port-2 load, absorbed in leakage conductances (radiated) and absorbed in
// dielectric plus component resistances (dissipated). The fractions come from
// one linear solve of the cascade, so they sum to 1 to machine precision.
inline power_budget compute_power_budget(const antenna_geometry& geom,
                                         const control_state& state,
                                         const varactor_spec& vspec,
                                         const diode_spec& dspec,
                                         const calibration_constants& cal,
                                         double f, double z_ref = 50.0,
                                         double q_override = 0.0) {
    geom.validate();
    state.validate(vspec);
    const auto elems = detail::build_cascade(geom, state, vspec, dspec, cal, f, q_override);

    // Back-propagate V, I from a unit load voltage at port 2.
    cplx v{1.0, 0.0};
    cplx i = v / z_ref;
    struct node_power { double absorbed; double frac_rad; };
    std::vector<node_power> absorbed(elems.size());
    const auto flow = [](cplx vv, cplx ii) { return 0.5 * (vv * std::conj(ii)).real(); };

    const double p_out = flow(v, i);
    for (size_t idx = elems.size(); idx-- > 0;) {
        const auto& e = elems[idx];
        const cplx v_in = e.abcd.a * v + e.abcd.b * i;
        const cplx i_in = e.abcd.c * v + e.abcd.d * i;
        absorbed[idx] = {flow(v_in, i_in) - flow(v, i), e.frac_radiated};
        v = v_in;
        i = i_in;
    }

    // Incident/reflected split at port 1 against z_ref; P = (|a|^2 - |b|^2)/2.
    const cplx a1 = (v + z_ref * i) / (2.0 * std::sqrt(z_ref));
    const cplx b1 = (v - z_ref * i) / (2.0 * std::sqrt(z_ref));
    const double p_inc = 0.5 * std::norm(a1);
    const double p_ref = 0.5 * std::norm(b1);

    power_budget pb;
    pb.p_reflected = p_ref / p_inc;
    pb.p_through = p_out / p_inc;
    for (const auto& ap : absorbed) {
        const double frac = std::max(ap.absorbed, 0.0) / p_inc;
        pb.p_radiated += frac * ap.frac_rad;
        pb.p_dissipated += frac * (1.0 - ap.frac_rad);
    }
    return pb;
}

} // namespace lwa
