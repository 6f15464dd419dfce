#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixfb/mixfb.hpp"

namespace mixfb::cli {

using nlohmann::json;

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 1;
};

/// Parse "lo:hi:count" where count is the number of subdivisions
/// (count + 1 inclusive grid points).
inline RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    char c1 = 0, c2 = 0;
    long count = 0;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 0) {
        throw CLI::ValidationError("range", "expected lo:hi:count, got '" + text + "'");
    }
    r.points = static_cast<std::size_t>(count) + 1;
    return r;
}

inline std::optional<FeedbackConfig> load_config(const std::string& path, std::ostream& out,
                                                 std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "cannot open config file: " << path << "\n";
        return std::nullopt;
    }
    FeedbackConfig cfg;
    try {
        json j = json::parse(in);
        cfg = j.get<FeedbackConfig>();
    } catch (const std::exception& e) {
        err << "config parse error: " << e.what() << "\n";
        return std::nullopt;
    }
    ValidationReport rep = validate(cfg);
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    if (!rep.ok()) {
        json diag{{"error", "invalid config"}, {"violations", rep.errors}};
        out << diag.dump(2) << "\n";
        return std::nullopt;
    }
    return cfg;
}

inline bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "cannot write: " << path << "\n";
        return false;
    }
    out << content;
    return true;
}

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 validation or numerical failure, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mixed-feedback oscillator design toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    double omega = 1.0;
    double T = 0.0;
    double dt = 0.0;
    std::string k_range_text, beta_range_text;
    std::string friction = "on";
    std::string sweep_path;
    double window = 0.0;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON file")->required();
    };

    CLI::App* region = app.add_subcommand("region", "classify the (k, beta) plane");
    add_config(region);
    region->add_option("--k", k_range_text, "gain range lo:hi:count")->required();
    region->add_option("--beta", beta_range_text, "balance range lo:hi:count")->required();
    region->add_option("--out", out_path, "output CSV path")->required();

    CLI::App* dhb = app.add_subcommand("design-hb", "quasi-harmonic frequency design");
    add_config(dhb);
    dhb->add_option("--omega", omega, "target frequency (rad/s)")->required();

    CLI::App* dfs = app.add_subcommand("design-fs", "relaxation frequency design");
    add_config(dfs);
    dfs->add_option("--omega", omega, "target frequency (rad/s)")->required();
    dfs->add_option("--sweep-out", sweep_path, "per-balance sweep CSV path");

    CLI::App* pred = app.add_subcommand("predict", "describing-function oscillation prediction");
    add_config(pred);

    CLI::App* sim = app.add_subcommand("simulate", "integrate the closed loop");
    add_config(sim);
    sim->add_option("--T", T, "duration (s)");
    sim->add_option("--dt", dt, "step (s); default min time constant / 20");
    sim->add_option("--out", out_path, "trajectory CSV path");

    CLI::App* tm = app.add_subcommand("two-mass", "two-mass locomotion simulation");
    add_config(tm);
    tm->add_option("--friction", friction, "on|off (default on)");
    tm->add_option("--T", T, "duration (s)");
    tm->add_option("--dt", dt, "step (s)");
    tm->add_option("--window", window, "displacement window (s); default T/4");
    tm->add_option("--out", out_path, "trace CSV path");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    auto cfg_opt = load_config(config_path, out, err);
    if (!cfg_opt) return 1;
    const FeedbackConfig cfg = *cfg_opt;
    json summary;
    summary["config_hash"] = config_hash(cfg);

    try {
        if (region->parsed()) {
            RangeSpec kr = parse_range(k_range_text);
            RangeSpec br = parse_range(beta_range_text);
            RegionGrid grid = region_scan(cfg, kr.lo, kr.hi, kr.points, br.lo, br.hi, br.points);
            std::ostringstream csv;
            grid.write_csv(csv);
            if (!write_file(out_path, csv.str(), err)) return 1;
            std::size_t n_osc = 0, n_dom = 0, n_out = 0;
            for (CellLabel l : grid.labels) {
                if (l == CellLabel::Osc) ++n_osc;
                else if (l == CellLabel::DomStable) ++n_dom;
                else ++n_out;
            }
            summary["subcommand"] = "region";
            summary["cells"] = grid.labels.size();
            summary["counts"] = {{"OSC", n_osc}, {"DOM_STABLE", n_dom}, {"NOT_2DOM", n_out}};
            summary["csv"] = out_path;
        } else if (dhb->parsed()) {
            HBDesignResult res = design_hb(cfg, omega);
            summary["subcommand"] = "design-hb";
            summary["omega_r"] = omega;
            summary["accepted"] = res.design.has_value();
            if (res.design) {
                const HBDesign& d = *res.design;
                summary["beta"] = d.beta;
                summary["k_min"] = d.k_min;
                summary["k_max"] = d.k_max;
                summary["k"] = d.k;
                summary["theta_n_deg"] = d.theta_n_deg;
                summary["theta_n_bucket"] = d.theta_n_bucket;
            } else {
                summary["reason"] = res.reason;
                if (res.rejected_beta) summary["rejected_beta"] = *res.rejected_beta;
            }
        } else if (dfs->parsed()) {
            FSDesign res = design_fs(cfg, omega);
            summary["subcommand"] = "design-fs";
            summary["omega_r"] = omega;
            summary["h_r"] = res.h_r;
            json cands = json::array();
            for (const FSCandidate& c : res.candidates) {
                cands.push_back({{"beta", c.beta},
                                 {"k", c.k},
                                 {"d", c.d},
                                 {"h2", c.h2},
                                 {"beta_above_beta_bar", c.beta_above_beta_bar},
                                 {"k_above_k_bar", c.k_above_k_bar}});
            }
            summary["candidates"] = cands;
            if (res.candidates.empty()) {
                json rej = json::array();
                for (const FSRejection& r : res.rejections) {
                    rej.push_back({{"beta", r.beta}, {"reason", r.reason}});
                }
                summary["rejections"] = rej;
            }
            if (!sweep_path.empty()) {
                std::ostringstream csv;
                write_sweep_csv(res, csv);
                if (!write_file(sweep_path, csv.str(), err)) return 1;
                summary["sweep_csv"] = sweep_path;
            }
        } else if (pred->parsed()) {
            std::vector<HBPrediction> ps = predict(cfg);
            summary["subcommand"] = "predict";
            json arr = json::array();
            for (const HBPrediction& p : ps) {
                arr.push_back({{"omega", p.omega},
                               {"amplitude", p.amplitude},
                               {"beta_accurate", p.beta_accurate},
                               {"k_accurate", p.k_accurate}});
            }
            summary["predictions"] = arr;
            summary["intersections"] = ps.size();
        } else if (sim->parsed()) {
            const double step = dt > 0.0 ? dt : default_time_step(cfg);
            const double horizon = T > 0.0 ? T : 400.0;
            StateSpaceModel ss = realize_loop(cfg);
            Vector x0 = Vector::Zero(ss.order());
            x0(0) = 1e-2 / std::max(1.0, std::abs(cfg.load.num().leading()));
            Timeseries ts = simulate(cfg, x0, horizon, step);
            summary["subcommand"] = "simulate";
            summary["T"] = horizon;
            summary["dt"] = step;
            if (auto est = estimate_oscillation(ts)) {
                summary["omega"] = est->omega;
                summary["amplitude"] = est->amplitude;
                summary["waveform"] =
                    est->waveform == WaveformClass::Relaxation ? "relaxation" : "quasi-harmonic";
            } else {
                summary["omega"] = nullptr;
            }
            if (!out_path.empty()) {
                std::ostringstream csv;
                csv << "t,y\n";
                for (std::size_t i = 0; i < ts.t.size(); ++i) {
                    csv << detail::fmt9(ts.t[i]) << ',' << detail::fmt9(ts.y[i]) << '\n';
                }
                if (!write_file(out_path, csv.str(), err)) return 1;
                summary["csv"] = out_path;
            }
        } else if (tm->parsed()) {
            if (friction != "on" && friction != "off") {
                err << "--friction must be on or off\n";
                return 2;
            }
            TwoMassParams params;
            const bool fric = friction == "on";
            const double step = dt > 0.0 ? dt : (fric ? 1e-3 : 2e-3);
            const double horizon = T > 0.0 ? T : 400.0;
            LocomotionTrace tr = simulate_locomotion(params, cfg, fric, horizon, step);
            summary["subcommand"] = "two-mass";
            summary["friction"] = fric;
            summary["T"] = horizon;
            summary["dt"] = step;
            if (auto est = estimate_oscillation(tr.t, tr.w)) {
                summary["omega"] = est->omega;
                summary["amplitude"] = est->amplitude;
            } else {
                summary["omega"] = nullptr;
            }
            const double win = window > 0.0 ? window : horizon / 4.0;
            summary["net_displacement"] = net_displacement(tr, win);
            summary["window"] = win;
            if (!out_path.empty()) {
                std::ostringstream csv;
                write_csv(tr, csv);
                if (!write_file(out_path, csv.str(), err)) return 1;
                summary["csv"] = out_path;
            }
        }
    } catch (const std::exception& e) {
        json diag{{"error", "numerical failure"}, {"what", e.what()}};
        out << diag.dump(2) << "\n";
        return 1;
    }

    out << summary.dump(2) << "\n";
    return 0;
}

}  // namespace mixfb::cli
