// SPDX-License-Identifier: Apache-2.0
//
// lwasteer: command-line front end for the reduced-order HWMLWA simulator.
//
// Subcommands: calibrate, dispersion, pattern, map, steer, qsense.
// Exit codes: 0 success, 2 config/usage error, 3 unreachable steer target,
// 4 calibration failure, 5 I/O error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwa/io.hpp"

namespace {

struct state_args {
    std::string state_file;
    double c_uniform_pf = 0.6;
    int asym = 0;
};

lwa::control_state resolve_state(const state_args& sa, const lwa::run_config& cfg) {
    if (!sa.state_file.empty()) return lwa::load_state_file(sa.state_file);
    lwa::control_state st =
        lwa::control_state::uniform(sa.c_uniform_pf * 1e-12, cfg.geometry.n_cells);
    st.set_asymmetry(sa.asym);
    return st;
}

void add_state_flags(CLI::App* cmd, state_args& sa) {
    cmd->add_option("--state", sa.state_file, "state file (overrides --c/--asym)");
    cmd->add_option("--c", sa.c_uniform_pf, "uniform varactor capacitance, pF");
    cmd->add_option("--asym", sa.asym, "diode asymmetry index N_L - N_R");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lwa::io_error("cannot open output file: " + path);
    return out;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced-order beam-steering simulator for a varactor/diode "
                 "loaded half-width microstrip leaky-wave antenna"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "run configuration file")->required();

    // calibrate
    auto* cmd_cal = app.add_subcommand("calibrate", "fit calibration constants to the "
                                                    "built-in anchor set");
    std::string cal_out = "calibration.json";
    cmd_cal->add_option("--out", cal_out, "output calibration file");

    // dispersion
    auto* cmd_disp = app.add_subcommand("dispersion", "frequency sweep of the loaded-line "
                                                      "dispersion and port match");
    state_args disp_state;
    add_state_flags(cmd_disp, disp_state);
    double f_lo_ghz = 28.0, f_hi_ghz = 34.0, f_step_ghz = 0.5;
    cmd_disp->add_option("--f-lo", f_lo_ghz, "sweep start, GHz");
    cmd_disp->add_option("--f-hi", f_hi_ghz, "sweep end, GHz");
    cmd_disp->add_option("--f-step", f_step_ghz, "sweep step, GHz");
    std::string disp_out = "dispersion.csv", touchstone_out;
    cmd_disp->add_option("--out", disp_out, "output CSV");
    cmd_disp->add_option("--touchstone", touchstone_out, "also write a 2-port .s2p file");

    // pattern
    auto* cmd_pat = app.add_subcommand("pattern", "far-field pattern and beam metrics "
                                                  "for one state");
    state_args pat_state;
    add_state_flags(cmd_pat, pat_state);
    double pat_f_ghz = 31.0;
    std::string pat_out = "pattern.csv", metrics_out = "metrics.json";
    cmd_pat->add_option("--f", pat_f_ghz, "frequency, GHz");
    cmd_pat->add_option("--out", pat_out, "output CSV");
    cmd_pat->add_option("--metrics", metrics_out, "metrics sidecar (JSON)");

    // map
    auto* cmd_map = app.add_subcommand("map", "steering map over the control grid");
    double map_f_ghz = 32.0;
    std::string map_out = "map.csv";
    cmd_map->add_option("--f", map_f_ghz, "frequency, GHz");
    cmd_map->add_option("--out", map_out, "output CSV");

    // steer
    auto* cmd_steer = app.add_subcommand("steer", "solve for the control state pointing "
                                                  "the beam at (theta, phi)");
    double steer_theta = 0.0, steer_phi = 0.0, steer_f_ghz = 31.0;
    std::string steer_out = "state.json";
    cmd_steer->add_option("--theta", steer_theta, "target theta, degrees")->required();
    cmd_steer->add_option("--phi", steer_phi, "target phi, degrees")->required();
    cmd_steer->add_option("--f", steer_f_ghz, "frequency, GHz");
    cmd_steer->add_option("--out", steer_out, "output state file");

    // qsense
    auto* cmd_q = app.add_subcommand("qsense", "varactor-Q sensitivity sweep");
    state_args q_state;
    add_state_flags(cmd_q, q_state);
    std::string q_list = "10,20", q_out = "qsense.csv";
    double q_f_lo = 28.0, q_f_hi = 34.0, q_f_step = 0.5;
    cmd_q->add_option("--q", q_list, "comma-separated Q values");
    cmd_q->add_option("--f-lo", q_f_lo, "sweep start, GHz");
    cmd_q->add_option("--f-hi", q_f_hi, "sweep end, GHz");
    cmd_q->add_option("--f-step", q_f_step, "sweep step, GHz");
    cmd_q->add_option("--out", q_out, "output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const lwa::run_config cfg = lwa::load_config(config_path);
        const auto& geom = cfg.geometry;
        const auto& vspec = cfg.varactor;
        const auto& dspec = cfg.diode;
        const auto& cal = cfg.calibration;

        if (cmd_cal->parsed()) {
            auto [fitted, report] = lwa::calibrate(geom, vspec, dspec,
                                                   lwa::paper_anchors(), cal);
            lwa::save_calibration_file(fitted, cal_out);
            std::cout << "calibration written to " << cal_out << "\n";
            for (size_t i = 0; i < report.residuals.size(); ++i)
                std::cout << "anchor " << i << " residual " << report.residuals[i] << "\n";
            return 0;
        }

        if (cmd_disp->parsed()) {
            const lwa::control_state st = resolve_state(disp_state, cfg);
            std::vector<lwa::dispersion_row> rows;
            std::vector<lwa::s_sweep_point> sweep;
            const int n = static_cast<int>(std::round((f_hi_ghz - f_lo_ghz) / f_step_ghz)) + 1;
            for (int i = 0; i < n; ++i) {
                const double f = (f_lo_ghz + i * f_step_ghz) * 1e9;
                const auto d = lwa::antenna_dispersion(geom, st, vspec, dspec, cal, f);
                const double beta_bar = lwa::mean_phase_slope(d, geom.cell_period);
                const auto hs = lwa::harmonic_angles(beta_bar, d.alpha, f, geom.cell_period);
                lwa::dispersion_row r;
                r.f = f;
                r.beta = beta_bar;
                r.alpha = d.alpha;
                r.k0 = d.k0;
                for (const auto& h : hs) {
                    if (h.n == 0 && h.radiating) r.theta_n0 = h.theta_deg;
                    if (h.n == -1 && h.radiating) r.theta_nm1 = h.theta_deg;
                }
                const auto s = lwa::antenna_two_port(geom, st, vspec, dspec, cal, f);
                r.s11_db = 20.0 * std::log10(std::max(std::abs(s.s11), 1e-15));
                rows.push_back(r);
                sweep.push_back({f, s});
            }
            auto out = open_out(disp_out);
            lwa::write_dispersion_csv(rows, out);
            if (!touchstone_out.empty()) {
                auto ts = open_out(touchstone_out);
                lwa::write_touchstone(sweep, ts);
            }
            return 0;
        }

        if (cmd_pat->parsed()) {
            const lwa::control_state st = resolve_state(pat_state, cfg);
            const double f = pat_f_ghz * 1e9;
            lwa::forward_options opts = cfg.forward_opts();
            opts.grid.theta_step = cfg.grids.theta_cut_step;
            const lwa::beam_solution sol =
                lwa::forward(geom, st, vspec, dspec, cal, f, opts);
            const auto disp = lwa::antenna_dispersion(geom, st, vspec, dspec, cal, f);
            const auto ap = lwa::build_aperture(geom, st, cal, f, disp, opts.sub_samples);
            const auto pat = lwa::compute_pattern(ap, f, opts.grid,
                                                  std::max(sol.budget.p_radiated, 1e-12));
            auto out = open_out(pat_out);
            lwa::write_pattern_csv(pat, sol.realized_gain_dbi, out);
            lwa::write_metrics_sidecar(sol, metrics_out);
            std::cout << "peak theta " << sol.theta_peak << " deg, phi " << sol.phi_peak
                      << " deg, realized gain " << sol.realized_gain_dbi << " dBi\n";
            return 0;
        }

        if (cmd_map->parsed()) {
            const auto map = lwa::steering_map(map_f_ghz * 1e9, cfg.map_c_grid(), geom,
                                               vspec, dspec, cal, cfg.forward_opts());
            auto out = open_out(map_out);
            lwa::write_map_csv(map, out);
            std::cout << map.entries.size() << " map entries written to "
                      << map_out << "\n";
            return 0;
        }

        if (cmd_steer->parsed()) {
            lwa::solve_options sopts;
            sopts.fwd = cfg.forward_opts();
            sopts.tol_deg = cfg.solver.theta_tol_deg;
            sopts.max_descent_passes = cfg.solver.max_descent_passes;
            sopts.full_enumeration = cfg.solver.full_enumeration;
            sopts.gain_penalty_weight = cfg.solver.gain_penalty_weight;
            const lwa::beam_solution sol =
                lwa::solve_2d(steer_theta, steer_phi, steer_f_ghz * 1e9, geom, vspec,
                              dspec, cal, sopts);
            lwa::save_state_file(sol.state, steer_out);
            std::cout << "solved state written to " << steer_out << "\n"
                      << "achieved theta " << sol.theta_peak << " deg, phi "
                      << sol.phi_peak << " deg, error " << sol.achieved_error_deg
                      << " deg, gain " << sol.realized_gain_dbi << " dBi\n";
            for (const auto& c : sol.state.cells)
                std::cout << "cell " << c.cell_index << ": c_left " << c.c_left * 1e12
                          << " pF, c_right " << c.c_right * 1e12 << " pF, diodes "
                          << (c.diode_left ? "S" : "o") << (c.diode_right ? "S" : "o")
                          << "\n";
            if (sol.nearest) {
                std::cerr << "unreachable-target: nearest reachable solution emitted, "
                             "error=" << sol.achieved_error_deg << "deg\n";
                return 3;
            }
            return 0;
        }

        if (cmd_q->parsed()) {
            const lwa::control_state st = resolve_state(q_state, cfg);
            std::vector<double> fs;
            const int n = static_cast<int>(std::round((q_f_hi - q_f_lo) / q_f_step)) + 1;
            for (int i = 0; i < n; ++i) fs.push_back((q_f_lo + i * q_f_step) * 1e9);
            const auto rows = lwa::q_sensitivity(fs, parse_list(q_list), st, geom, vspec,
                                                 dspec, cal, cfg.forward_opts());
            auto out = open_out(q_out);
            lwa::write_qsense_csv(rows, out);
            return 0;
        }
    } catch (const lwa::config_error& e) {
        std::cerr << "config-error: " << e.what() << "\n";
        return 2;
    } catch (const lwa::calibration_failure& e) {
        std::cerr << "calibration-failure: " << e.what() << "\n";
        return 4;
    } catch (const lwa::unreachable_target_error& e) {
        std::cerr << "unreachable-target: " << e.what() << "\n";
        return 3;
    } catch (const lwa::io_error& e) {
        std::cerr << "io-error: " << e.what() << "\n";
        return 5;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config-error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
