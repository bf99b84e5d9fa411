// SPDX-License-Identifier: Apache-2.0
//
// Config ingestion and the file writers. One JSON config format with strict
// unknown-key rejection; CSV numeric formatting fixed at 9 significant
// digits with LF endings so golden-file comparisons are portable.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwa/calibration.hpp"
#include "lwa/components.hpp"
#include "lwa/dispersion.hpp"
#include "lwa/error.hpp"
#include "lwa/farfield.hpp"
#include "lwa/steering.hpp"

namespace lwa {

using json = nlohmann::json;

struct solver_config {
    double theta_tol_deg = 1.0;
    int max_descent_passes = 3;
    bool full_enumeration = false;
    double gain_penalty_weight = 2.0;
};

struct grid_config {
    double theta_cut_step = 0.5;     // degrees, principal-cut export
    double hemisphere_step = 1.0;    // degrees, full-hemisphere grid
    double element_exponent = 1.0;   // cos^p element factor
    int sub_samples_per_cell = 8;
    int taper_segments_per_cell = 8;
    int map_c_points = 9;
};

struct run_config {
    antenna_geometry geometry;   // carries the substrate
    varactor_spec varactor;
    diode_spec diode;
    calibration_constants calibration;
    bool has_calibration = false;
    solver_config solver;
    grid_config grids;
    double band_lo = 28e9;
    double band_hi = 34e9;

    pattern_grid hemisphere_grid() const {
        pattern_grid g;
        g.theta_step = grids.hemisphere_step;
        g.phi_step = grids.hemisphere_step;
        g.element_exponent = grids.element_exponent;
        return g;
    }
    forward_options forward_opts() const {
        forward_options o;
        o.grid = hemisphere_grid();
        o.sub_samples = grids.sub_samples_per_cell;
        return o;
    }
    std::vector<double> map_c_grid() const {
        std::vector<double> cs;
        for (int i = 0; i < grids.map_c_points; ++i)
            cs.push_back(varactor.c_min + (varactor.c_max - varactor.c_min) * i
                         / std::max(grids.map_c_points - 1, 1));
        return cs;
    }
};

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                                const std::string& path) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw config_error(path.empty() ? key : path + "." + key, "unknown key");
}

inline double require_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        throw config_error(path + "." + key, "missing required key");
    if (!j.at(key).is_number())
        throw config_error(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

inline double opt_number(const json& j, const std::string& key, const std::string& path,
                         double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw config_error(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

inline calibration_constants parse_calibration(const json& j, const std::string& path) {
    reject_unknown_keys(j, {"c_gap", "kappa", "c_fringe_per_m", "w_eff_factor",
                            "g_leak", "sigma", "psi0", "y_offset"}, path);
    calibration_constants c;
    c.c_gap = opt_number(j, "c_gap", path, c.c_gap);
    c.kappa = opt_number(j, "kappa", path, c.kappa);
    c.c_fringe_per_m = opt_number(j, "c_fringe_per_m", path, c.c_fringe_per_m);
    c.w_eff_factor = opt_number(j, "w_eff_factor", path, c.w_eff_factor);
    c.g_leak = opt_number(j, "g_leak", path, c.g_leak);
    c.sigma = opt_number(j, "sigma", path, c.sigma);
    c.psi0 = opt_number(j, "psi0", path, c.psi0);
    c.y_offset = opt_number(j, "y_offset", path, c.y_offset);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(path, e.what());
    }
    return c;
}

} // namespace detail

inline calibration_constants load_calibration_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open calibration file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error(path, std::string("calibration parse error: ") + e.what());
    }
    return detail::parse_calibration(j, "calibration");
}

inline void save_calibration_file(const calibration_constants& c, const std::string& path) {
    json j{{"c_gap", c.c_gap},
           {"kappa", c.kappa},
           {"c_fringe_per_m", c.c_fringe_per_m},
           {"w_eff_factor", c.w_eff_factor},
           {"g_leak", c.g_leak},
           {"sigma", c.sigma},
           {"psi0", c.psi0},
           {"y_offset", c.y_offset}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write calibration file: " + path);
    out << j.dump(2) << "\n";
}

// Strict config loader: unknown keys are rejected with their path, missing
// required keys and out-of-range values are diagnosed with their path. An
// empty file is treated as an empty document (everything missing).
inline run_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;

    json j;
    if (blank) {
        j = json::object();
    } else {
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw config_error(path, std::string("parse error: ") + e.what());
        }
    }

    detail::reject_unknown_keys(j, {"substrate", "geometry", "varactor", "diode",
                                    "band", "solver", "grids", "calibration"}, "");

    run_config cfg;

    const json sub = j.value("substrate", json::object());
    detail::reject_unknown_keys(sub, {"eps_r", "tan_delta", "height"}, "substrate");
    cfg.geometry.substrate.eps_r = detail::require_number(sub, "eps_r", "substrate");
    cfg.geometry.substrate.tan_delta = detail::require_number(sub, "tan_delta", "substrate");
    cfg.geometry.substrate.height = detail::require_number(sub, "height", "substrate");

    const json geo = j.value("geometry", json::object());
    detail::reject_unknown_keys(geo, {"length", "port_to_port", "width_feed", "width_mid",
                                      "cell_period", "n_cells"}, "geometry");
    cfg.geometry.length = detail::require_number(geo, "length", "geometry");
    cfg.geometry.port_to_port = detail::require_number(geo, "port_to_port", "geometry");
    cfg.geometry.width_feed = detail::require_number(geo, "width_feed", "geometry");
    cfg.geometry.width_mid = detail::require_number(geo, "width_mid", "geometry");
    cfg.geometry.cell_period = detail::require_number(geo, "cell_period", "geometry");
    cfg.geometry.n_cells =
        static_cast<int>(detail::require_number(geo, "n_cells", "geometry"));

    const json var = j.value("varactor", json::object());
    detail::reject_unknown_keys(var, {"c_min", "c_max", "q_at_f0", "f0_q",
                                      "cv_c0", "cv_vj", "cv_m", "q_table"}, "varactor");
    cfg.varactor.c_min = detail::require_number(var, "c_min", "varactor");
    cfg.varactor.c_max = detail::require_number(var, "c_max", "varactor");
    cfg.varactor.q_at_f0 = detail::opt_number(var, "q_at_f0", "varactor", cfg.varactor.q_at_f0);
    cfg.varactor.f0_q = detail::opt_number(var, "f0_q", "varactor", cfg.varactor.f0_q);
    cfg.varactor.cv_c0 = detail::opt_number(var, "cv_c0", "varactor", cfg.varactor.cv_c0);
    cfg.varactor.cv_vj = detail::opt_number(var, "cv_vj", "varactor", cfg.varactor.cv_vj);
    cfg.varactor.cv_m = detail::opt_number(var, "cv_m", "varactor", cfg.varactor.cv_m);
    if (var.contains("q_table")) {
        if (!var.at("q_table").is_object())
            throw config_error("varactor.q_table", "expected an object of f_hz: q pairs");
        for (const auto& [key, val] : var.at("q_table").items()) {
            try {
                cfg.varactor.q_table[std::stod(key)] = val.get<double>();
            } catch (const std::exception&) {
                throw config_error("varactor.q_table." + key, "expected numeric f_hz: q pair");
            }
        }
    }
    if (!(cfg.varactor.c_min > 0.0) || cfg.varactor.c_min >= cfg.varactor.c_max)
        throw config_error("varactor.c_min", "out of range: need 0 < c_min < c_max");

    const json dio = j.value("diode", json::object());
    detail::reject_unknown_keys(dio, {"r_on", "c_off", "l_via"}, "diode");
    cfg.diode.r_on = detail::opt_number(dio, "r_on", "diode", cfg.diode.r_on);
    cfg.diode.c_off = detail::opt_number(dio, "c_off", "diode", cfg.diode.c_off);
    cfg.diode.l_via = detail::opt_number(dio, "l_via", "diode", cfg.diode.l_via);

    const json band = j.value("band", json::object());
    detail::reject_unknown_keys(band, {"lo", "hi"}, "band");
    cfg.band_lo = detail::opt_number(band, "lo", "band", cfg.band_lo);
    cfg.band_hi = detail::opt_number(band, "hi", "band", cfg.band_hi);
    if (cfg.band_lo < 20e9 || cfg.band_hi > 50e9 || cfg.band_lo >= cfg.band_hi)
        throw config_error("band", "out of range: band must lie within [20, 50] GHz");

    const json sol = j.value("solver", json::object());
    detail::reject_unknown_keys(sol, {"theta_tol_deg", "max_descent_passes",
                                      "full_enumeration", "gain_penalty_weight"}, "solver");
    cfg.solver.theta_tol_deg =
        detail::opt_number(sol, "theta_tol_deg", "solver", cfg.solver.theta_tol_deg);
    cfg.solver.max_descent_passes = static_cast<int>(detail::opt_number(
        sol, "max_descent_passes", "solver", cfg.solver.max_descent_passes));
    if (sol.contains("full_enumeration")) {
        if (!sol.at("full_enumeration").is_boolean())
            throw config_error("solver.full_enumeration", "expected a boolean");
        cfg.solver.full_enumeration = sol.at("full_enumeration").get<bool>();
    }
    cfg.solver.gain_penalty_weight = detail::opt_number(
        sol, "gain_penalty_weight", "solver", cfg.solver.gain_penalty_weight);

    const json grd = j.value("grids", json::object());
    detail::reject_unknown_keys(grd, {"theta_cut_step", "hemisphere_step", "element_exponent",
                                      "sub_samples_per_cell", "taper_segments_per_cell",
                                      "map_c_points"}, "grids");
    cfg.grids.theta_cut_step =
        detail::opt_number(grd, "theta_cut_step", "grids", cfg.grids.theta_cut_step);
    cfg.grids.hemisphere_step =
        detail::opt_number(grd, "hemisphere_step", "grids", cfg.grids.hemisphere_step);
    cfg.grids.element_exponent =
        detail::opt_number(grd, "element_exponent", "grids", cfg.grids.element_exponent);
    cfg.grids.sub_samples_per_cell = static_cast<int>(detail::opt_number(
        grd, "sub_samples_per_cell", "grids", cfg.grids.sub_samples_per_cell));
    cfg.grids.taper_segments_per_cell = static_cast<int>(detail::opt_number(
        grd, "taper_segments_per_cell", "grids", cfg.grids.taper_segments_per_cell));
    cfg.grids.map_c_points = static_cast<int>(detail::opt_number(
        grd, "map_c_points", "grids", cfg.grids.map_c_points));

    if (j.contains("calibration")) {
        const json& calj = j.at("calibration");
        if (calj.is_object() && calj.contains("file")) {
            detail::reject_unknown_keys(calj, {"file"}, "calibration");
            const std::filesystem::path base = std::filesystem::path(path).parent_path();
            const std::filesystem::path ref{calj.at("file").get<std::string>()};
            const std::filesystem::path full = ref.is_absolute() ? ref : base / ref;
            if (!std::filesystem::exists(full))
                throw config_error("calibration.file",
                                   "referenced file does not exist: " + full.string());
            cfg.calibration = load_calibration_file(full.string());
        } else if (calj.is_object()) {
            cfg.calibration = detail::parse_calibration(calj, "calibration");
        } else {
            throw config_error("calibration", "expected an object");
        }
        cfg.has_calibration = true;
    }

    try {
        cfg.geometry.validate();
        cfg.varactor.validate();
        cfg.diode.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("", e.what());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Numeric formatting: 9 significant digits, "NaN" literal for non-values.

inline std::string fmt9(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// State files

inline void save_state_file(const control_state& st, const std::string& path) {
    json cells = json::array();
    for (const auto& c : st.cells)
        cells.push_back({{"c_left", c.c_left},
                         {"c_right", c.c_right},
                         {"diode_left", c.diode_left},
                         {"diode_right", c.diode_right}});
    json j{{"cells", cells}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write state file: " + path);
    out << j.dump(2) << "\n";
}

inline control_state load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open state file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error(path, std::string("state parse error: ") + e.what());
    }
    detail::reject_unknown_keys(j, {"cells"}, "state");
    if (!j.contains("cells") || !j.at("cells").is_array())
        throw config_error("state.cells", "missing required key");
    control_state st;
    int idx = 1;
    for (const auto& cj : j.at("cells")) {
        detail::reject_unknown_keys(cj, {"c_left", "c_right", "diode_left", "diode_right"},
                                    "state.cells");
        cell_loading c;
        c.cell_index = idx++;
        c.c_left = detail::require_number(cj, "c_left", "state.cells");
        c.c_right = detail::require_number(cj, "c_right", "state.cells");
        c.diode_left = cj.value("diode_left", false);
        c.diode_right = cj.value("diode_right", false);
        st.cells.push_back(c);
    }
    return st;
}

// ---------------------------------------------------------------------------
// CSV writers (LF endings, deterministic)

struct dispersion_row {
    double f = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    double k0 = 0.0;
    double theta_n0 = std::numeric_limits<double>::quiet_NaN();
    double theta_nm1 = std::numeric_limits<double>::quiet_NaN();
    double s11_db = 0.0;
};

inline void write_dispersion_csv(const std::vector<dispersion_row>& rows, std::ostream& out) {
    out << "f_ghz,beta_rad_per_m,alpha_np_per_m,k0_rad_per_m,theta_n0_deg,theta_nm1_deg,s11_db\n";
    for (const auto& r : rows)
        out << fmt9(r.f / 1e9) << ',' << fmt9(r.beta) << ',' << fmt9(r.alpha) << ','
            << fmt9(r.k0) << ',' << fmt9(r.theta_n0) << ',' << fmt9(r.theta_nm1) << ','
            << fmt9(r.s11_db) << '\n';
}

inline void write_pattern_csv(const radiation_pattern& pat, double peak_gain_dbi,
                              std::ostream& out) {
    // Per-direction realized gain, anchored so the pattern peak equals the
    // metrics' realized gain.
    double u_max = 0.0;
    for (const double v : pat.u) u_max = std::max(u_max, v);
    out << "theta_deg,phi_deg,gain_dbi\n";
    for (int it = 0; it < pat.grid.n_theta(); ++it)
        for (int ip = 0; ip < pat.grid.n_phi(); ++ip) {
            const double rel = pat.at(it, ip) / u_max;
            const double g = peak_gain_dbi + 10.0 * std::log10(std::max(rel, 1e-12));
            out << fmt9(pat.theta_of(it)) << ',' << fmt9(pat.phi_of(ip)) << ','
                << fmt9(g) << '\n';
        }
}

inline void write_metrics_sidecar(const beam_solution& sol, const std::string& path) {
    json j{{"theta_peak_deg", sol.theta_peak},
           {"phi_peak_deg", sol.phi_peak},
           {"directivity_dbi", sol.directivity_dbi},
           {"realized_gain_dbi", sol.realized_gain_dbi},
           {"hpbw_theta_deg", sol.hpbw_theta},
           {"hpbw_phi_deg", sol.hpbw_phi},
           {"s11_db", sol.s11_db},
           {"f_hz", sol.f},
           {"budget", {{"p_reflected", sol.budget.p_reflected},
                       {"p_through", sol.budget.p_through},
                       {"p_radiated", sol.budget.p_radiated},
                       {"p_dissipated", sol.budget.p_dissipated}}}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write metrics sidecar: " + path);
    out << j.dump(2) << "\n";
}

inline void write_map_csv(const steering_map_result& map, std::ostream& out) {
    out << "c_pf_1,c_pf_2,c_pf_3,c_pf_4,c_pf_5,c_pf_6,c_pf_7,c_pf_8,c_pf_9,c_pf_10,"
           "c_pf_11,c_pf_12,diodes_hex,theta_deg,phi_deg,gain_dbi,s11_db\n";
    for (const auto& e : map.entries) {
        // c_pf_(2i-1)/c_pf_(2i) are the left/right capacitances of cell i.
        for (const auto& c : e.state.cells)
            out << fmt9(c.c_left * 1e12) << ',' << fmt9(c.c_right * 1e12) << ',';
        char hex[8];
        std::snprintf(hex, sizeof(hex), "%03x", e.state.diode_bits());
        out << hex << ',' << fmt9(e.theta_peak) << ',' << fmt9(e.phi_peak) << ','
            << fmt9(e.realized_gain_dbi) << ',' << fmt9(e.s11_db) << '\n';
    }
}

inline void write_qsense_csv(const std::vector<q_sense_row>& rows, std::ostream& out) {
    out << "f_ghz,q,s11_db,gain_dbi\n";
    for (const auto& r : rows)
        out << fmt9(r.f / 1e9) << ',' << fmt9(r.q) << ',' << fmt9(r.s11_db) << ','
            << fmt9(r.realized_gain_dbi) << '\n';
}

// ---------------------------------------------------------------------------
// Touchstone (2-port, RI, 50-ohm reference)

struct s_sweep_point {
    double f = 0.0;
    scatter_matrix s;
};

inline void write_touchstone(const std::vector<s_sweep_point>& sweep, std::ostream& out) {
    if (sweep.empty()) throw std::invalid_argument("write_touchstone: empty sweep");
    out << "# GHz S RI R 50\n";
    std::vector<const s_sweep_point*> sorted;
    for (const auto& p : sweep) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->f < b->f; });
    for (const auto* p : sorted) {
        out << fmt9(p->f / 1e9) << ' '
            << fmt9(p->s.s11.real()) << ' ' << fmt9(p->s.s11.imag()) << ' '
            << fmt9(p->s.s21.real()) << ' ' << fmt9(p->s.s21.imag()) << ' '
            << fmt9(p->s.s12.real()) << ' ' << fmt9(p->s.s12.imag()) << ' '
            << fmt9(p->s.s22.real()) << ' ' << fmt9(p->s.s22.imag()) << '\n';
    }
}

inline std::vector<s_sweep_point> parse_touchstone(std::istream& in) {
    std::vector<s_sweep_point> sweep;
    std::string line;
    double f_scale = 1e9;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '!') continue;
        if (line[first] == '#') {
            std::istringstream hs(line.substr(first + 1));
            std::string unit, param, fmt, rtok;
            double zref = 50.0;
            hs >> unit >> param >> fmt >> rtok >> zref;
            for (auto& ch : unit) ch = static_cast<char>(std::toupper(ch));
            if (unit == "HZ") f_scale = 1.0;
            else if (unit == "KHZ") f_scale = 1e3;
            else if (unit == "MHZ") f_scale = 1e6;
            else f_scale = 1e9;
            if (param != "S" || fmt != "RI")
                throw io_error("parse_touchstone: only 'S ... RI' files are supported");
            header_seen = true;
            continue;
        }
        if (!header_seen)
            throw io_error("parse_touchstone: data before the option line");
        std::istringstream ls(line.substr(first));
        double v[9];
        for (double& x : v)
            if (!(ls >> x)) throw io_error("parse_touchstone: short data row");
        s_sweep_point p;
        p.f = v[0] * f_scale;
        p.s.s11 = {v[1], v[2]};
        p.s.s21 = {v[3], v[4]};
        p.s.s12 = {v[5], v[6]};
        p.s.s22 = {v[7], v[8]};
        p.s.z_ref = 50.0;
        sweep.push_back(p);
    }
    return sweep;
}

} // namespace lwa
