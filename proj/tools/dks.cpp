// Command-line front end: single evaluations, figure-style scans and
// robustness sweeps over the delta-kick-squeezing protocol, CSV output.

#include "dks/collective_spin.hpp"
#include "dks/config.hpp"
#include "dks/constants.hpp"
#include "dks/errors.hpp"
#include "dks/gain_formulas.hpp"
#include "dks/meanfield.hpp"
#include "dks/scan.hpp"
#include "dks/sequence.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

namespace {

using dks::cfg::RunConfig;

struct Out {
    std::unique_ptr<std::ofstream> file;
    std::ostream& stream() { return file ? *file : std::cout; }
};

Out open_out(const std::string& path) {
    Out o;
    if (!path.empty()) {
        o.file = std::make_unique<std::ofstream>(path);
        if (!*o.file) throw dks::ConfigError("cannot open output file '" + path + "'");
    }
    return o;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string r = s;
    for (auto& c : r)
        if (c == ',' || c == '\n') c = ';';
    return r;
}

dks::mf::Vec3 omega_from(const RunConfig& cfg, const std::string& prefix) {
    const double twopi = 2.0 * dks::constants::pi;
    return {twopi * cfg.real(prefix + "_x_hz"), twopi * cfg.real(prefix + "_y_hz"),
            twopi * cfg.real(prefix + "_z_hz")};
}

dks::mf::PhysicalParams params_from(const RunConfig& cfg) {
    dks::mf::PhysicalParams p;
    p.n_atoms = cfg.i64("N");
    p.mass = cfg.real("mass_kg");
    p.scattering_length = cfg.real("scattering_length_m");
    p.wavenumber = 2.0 * dks::constants::pi / cfg.real("wavelength_m");
    std::string pt = cfg.str("pulse_type");
    if (pt == "raman")
        p.pulse_type = dks::mf::PulseType::raman;
    else if (pt == "bragg")
        p.pulse_type = dks::mf::PulseType::bragg;
    else
        throw dks::ConfigError("pulse_type must be raman or bragg, got '" + pt + "'");
    return p;
}

dks::seq::ProtocolSpec spec_from(const RunConfig& cfg) {
    dks::seq::ProtocolSpec s;
    s.params = params_from(cfg);
    s.omega_initial = omega_from(cfg, "omega_initial");
    s.omega_dks1 = omega_from(cfg, "omega_dks1");
    s.omega_dks2 = omega_from(cfg, "omega_dks2");
    s.T0 = cfg.real("T0_s");
    s.t_exp = cfg.real("t_exp_s");
    s.dt1 = cfg.real("dt1_s");
    s.T_tau_prime = cfg.real("T_tau_prime_s");
    s.T_theta = cfg.real("T_theta_s");
    s.dt2 = cfg.real("dt2_s");
    std::string ro = cfg.str("readout");
    if (ro == "linear")
        s.readout = dks::seq::Readout::linear;
    else if (ro == "echo")
        s.readout = dks::seq::Readout::echo;
    else
        throw dks::ConfigError("readout must be linear or echo, got '" + ro + "'");
    s.collimate_before_bs2 = cfg.flag("collimate_before_bs2");
    s.include_pre_dks2_window = cfg.flag("include_pre_dks2_window");
    s.delta_n = cfg.real("delta_n");
    s.mf_dt_max = cfg.real("mf_dt_max_s");
    s.mf_refine_rel = cfg.real("mf_refine_rel");
    s.engine_cap = cfg.i64("engine_cap");
    s.t_tau_prime_min = cfg.real("t_tau_prime_min_s");
    s.t_tau_prime_max = cfg.real("t_tau_prime_max_s");
    s.dt2_min = cfg.real("dt2_min_s");
    s.dt2_max = cfg.real("dt2_max_s");
    return s;
}

// ------------------------------------------------------------------ commands

int cmd_gain(const RunConfig& cfg, Out& out) {
    using namespace dks;
    const long long n = cfg.i64("N");
    const double dn = cfg.real("delta_n");
    const std::string mode = cfg.str("mode");

    seq::GainReport rep;
    rep.delta_n = dn;
    if (mode == "linear") {
        double tau = cfg.real_or_auto("tau").value_or(gain::tau_opt(n));
        rep.tau1 = tau;
        rep.mode = seq::Readout::linear;
        rep.branch = seq::Branch::closed_form;
        rep.gain = gain::gain_linear({n, tau, dn});
    } else if (mode == "echo") {
        double tau1, tau2;
        if (cfg.is_set("tau1") || cfg.is_set("tau2")) {
            tau1 = cfg.real("tau1");
            tau2 = cfg.real("tau2");
        } else {
            double tau = cfg.real_or_auto("tau").value_or(gain::tau_opt(n));
            tau1 = tau;
            tau2 = -tau;
        }
        double tau_ai = cfg.real("tau_ai");
        auto [g, br] = seq::echo_gain_dispatch(n, tau1, tau2, tau_ai, dn,
                                               cfg.i64("engine_cap"));
        rep.tau1 = tau1;
        rep.tau2 = tau2;
        rep.tau_ai = tau_ai;
        rep.mode = seq::Readout::echo;
        rep.branch = br;
        rep.gain = g;
    } else if (mode == "perturbative") {
        double tau = cfg.real_or_auto("tau").value_or(0.1 * gain::tau_opt(n));
        double eta = cfg.real("tau_ai");
        rep.tau1 = tau;
        rep.tau2 = -tau;
        rep.tau_ai = eta;
        rep.mode = seq::Readout::echo;
        rep.branch = seq::Branch::perturbative;
        rep.gain = gain::gain_echo_perturbative(n, tau, eta);
    } else {
        throw ConfigError("mode must be linear, echo or perturbative, got '" + mode + "'");
    }
    rep.gain_db = rep.gain > 0 ? gain::to_db(rep.gain)
                               : -std::numeric_limits<double>::infinity();
    rep.delta_theta =
        rep.gain > 0 ? 1.0 / (std::sqrt(double(n)) * rep.gain)
                     : std::numeric_limits<double>::infinity();

    out.stream() << seq::GainReport::csv_header() << "\n" << rep.csv_row() << "\n";
    std::cerr << "gain = " << num(rep.gain) << " (" << num(rep.gain_db)
              << " dB), delta_theta = " << num(rep.delta_theta) << " rad\n";
    return 0;
}

int cmd_prep_scan(const RunConfig& cfg, Out& out) {
    using namespace dks;
    const int nx = int(cfg.i64("t_exp_steps"));
    const int ny = int(cfg.i64("dt1_steps"));
    if (nx < 1 || ny < 1) throw ConfigError("prep-scan: zero-size grid");
    auto xs = scan::linspace(cfg.real("t_exp_min_s"), cfg.real("t_exp_max_s"), nx);
    auto ys = scan::linspace(cfg.real("dt1_min_s"), cfg.real("dt1_max_s"), ny);

    std::vector<mf::PulseType> pulses;
    std::string sel = cfg.str("pulse_types");
    if (sel == "bragg" || sel == "both") pulses.push_back(mf::PulseType::bragg);
    if (sel == "raman" || sel == "both") pulses.push_back(mf::PulseType::raman);
    if (pulses.empty())
        throw ConfigError("pulse_types must be bragg, raman or both, got '" + sel + "'");

    const seq::ProtocolSpec base = spec_from(cfg);
    const long long n = base.params.n_atoms;
    const double dn = base.delta_n;

    struct Row {
        double t_exp, dt1, tau1 = 0, gain = 0, gain_db = 0;
        const char* pulse;
        std::string error;
    };
    std::vector<Row> rows(pulses.size() * xs.size() * ys.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            std::size_t pi = i / (xs.size() * ys.size());
            std::size_t rest = i % (xs.size() * ys.size());
            Row& r = rows[i];
            r.t_exp = xs[rest / ys.size()];
            r.dt1 = ys[rest % ys.size()];
            r.pulse = pulses[pi] == mf::PulseType::bragg ? "bragg" : "raman";
            try {
                seq::ProtocolSpec s = base;
                s.params.pulse_type = pulses[pi];
                s.t_exp = r.t_exp;
                s.dt1 = r.dt1;
                s.readout = seq::Readout::linear;
                r.tau1 = seq::compute_taus(s).tau1;
                r.gain = gain::gain_linear({n, r.tau1, dn});
                r.gain_db = gain::to_db(r.gain);
            } catch (const std::exception& e) {
                r.tau1 = r.gain = r.gain_db = std::numeric_limits<double>::quiet_NaN();
                r.error = sanitize(e.what());
            }
        }
    };
    int threads = std::max<long long>(1, cfg.i64("threads"));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    auto& os = out.stream();
    os << "t_exp_s,dt1_s,pulse,tau1,sign_tau1,gain,gain_db,error\n";
    for (const auto& r : rows) {
        int sign = r.tau1 > 0 ? 1 : (r.tau1 < 0 ? -1 : 0);
        os << num(r.t_exp) << ',' << num(r.dt1) << ',' << r.pulse << ',' << num(r.tau1)
           << ',' << sign << ',' << num(r.gain) << ',' << num(r.gain_db) << ','
           << r.error << "\n";
    }
    std::cerr << "prep-scan: " << rows.size() << " points\n";
    return 0;
}

int cmd_echo_tune(const RunConfig& cfg, Out& out) {
    using namespace dks;
    seq::ProtocolSpec spec = spec_from(cfg);
    const std::string sel = cfg.str("tune");
    auto& os = out.stream();

    const long long sweep_steps = cfg.i64("dt2_sweep_steps");
    if (sweep_steps > 0) {
        // tau2(dt2) curve for picking the untwist point by eye
        spec.readout = seq::Readout::echo;
        os << "dt2_s,tau1,tau2,mismatch\n";
        auto grid = scan::linspace(spec.dt2_min, spec.dt2_max, int(sweep_steps));
        for (double dt2 : grid) {
            seq::ProtocolSpec s = spec;
            s.dt2 = dt2;
            try {
                auto t = seq::compute_taus(s);
                os << num(dt2) << ',' << num(t.tau1) << ',' << num(t.tau2) << ','
                   << num(t.tau2 + t.tau1) << "\n";
            } catch (const std::exception& e) {
                os << num(dt2) << ",nan,nan," << sanitize(e.what()) << "\n";
            }
        }
        return 0;
    }

    os << "tuner,tuned_value_s,tau1,tau_ai,tau2,residual_rel\n";
    if (sel == "linear" || sel == "both") {
        double tp = seq::tune_linear_condition(spec);
        seq::ProtocolSpec s = spec;
        s.T_tau_prime = tp;
        auto t = seq::compute_taus(s);
        os << "linear_condition," << num(tp) << ',' << num(t.tau1) << ',' << num(t.tau_ai)
           << ',' << num(t.tau2) << ',' << num(std::abs(t.tau_ai) / std::abs(t.tau1))
           << "\n";
        std::cerr << "linear condition: T_tau_prime = " << num(tp) << " s\n";
    }
    if (sel == "untwist" || sel == "both") {
        double dt2 = seq::tune_untwist(spec);
        seq::ProtocolSpec s = spec;
        s.dt2 = dt2;
        s.readout = seq::Readout::echo;
        auto t = seq::compute_taus(s);
        os << "untwist," << num(dt2) << ',' << num(t.tau1) << ',' << num(t.tau_ai) << ','
           << num(t.tau2) << ',' << num(std::abs(t.tau2 + t.tau1) / std::abs(t.tau1))
           << "\n";
        std::cerr << "untwist: dt2 = " << num(dt2) << " s\n";
    }
    if (sel != "linear" && sel != "untwist" && sel != "both")
        throw ConfigError("tune must be linear, untwist or both, got '" + sel + "'");
    return 0;
}

int cmd_robustness(const RunConfig& cfg, Out& out) {
    using namespace dks;
    const long long n = cfg.i64("N");
    const int steps = int(cfg.i64("delta_n_steps"));
    if (steps < 1) throw ConfigError("robustness: zero-size grid");
    auto dns = scan::linspace(cfg.real("delta_n_min"), cfg.real("delta_n_max"), steps);

    const double topt = gain::tau_opt(n);
    struct Setting {
        const char* label;
        double tau;
    };
    const Setting settings[2] = {{"tau_opt", topt}, {"0.1tau_opt", 0.1 * topt}};

    auto& os = out.stream();
    os << "delta_n,tau_setting,tau,gain_linear,gain_linear_db,gain_echo,gain_echo_db\n";
    for (const auto& s : settings) {
        for (double dn : dns) {
            double gl = gain::gain_linear({n, s.tau, dn});
            double ge = gain::gain_echo_exact({n, s.tau, -s.tau, 0.0, dn});
            os << num(dn) << ',' << s.label << ',' << num(s.tau) << ',' << num(gl) << ','
               << num(gain::to_db(gl)) << ',' << num(ge) << ',' << num(gain::to_db(ge))
               << "\n";
        }
    }
    std::cerr << "robustness: tau_opt = " << num(topt) << "\n";
    return 0;
}

int cmd_sequence_eval(const RunConfig& cfg, Out& out) {
    using namespace dks;
    seq::GainReport rep = seq::evaluate(spec_from(cfg));
    out.stream() << seq::GainReport::csv_header() << "\n" << rep.csv_row() << "\n";
    std::cerr << "tau1 = " << num(rep.tau1) << ", tau_ai = " << num(rep.tau_ai)
              << ", tau2 = " << num(rep.tau2) << "\n"
              << "gain = " << num(rep.gain) << " (" << num(rep.gain_db) << " dB), branch "
              << seq::to_string(rep.branch) << "\n";
    return 0;
}

int cmd_chi_trace(const RunConfig& cfg, Out& out) {
    using namespace dks;
    seq::ProtocolSpec spec = spec_from(cfg);
    mf::Timeline tl = seq::build_timeline(spec);
    mf::ChiTrace trace =
        mf::build_chi_trace(tl, spec.params, spec.omega_initial, spec.mf_dt_max);
    auto& os = out.stream();
    os << mf::ChiTrace::csv_header() << "\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        os << num(trace.times[i]) << ',' << num(trace.radii[i][0]) << ','
           << num(trace.radii[i][1]) << ',' << num(trace.radii[i][2]) << ','
           << num(trace.chi_self_v[i]) << ',' << num(trace.chi_cross_v[i]) << ','
           << num(trace.chi_eff_v[i]) << ',' << num(trace.separation[i]) << "\n";
    }
    std::cerr << "chi-trace: " << trace.times.size() << " samples, t_end = "
              << num(tl.end) << " s\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-kick-squeezing interferometry toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // allow --config/--out after the subcommand

    std::string config_path, out_path;
    bool dump_config = false;
    app.add_option("--config", config_path, "run configuration file (key = value lines)");
    app.add_option("--out", out_path, "CSV output path (default: stdout)");
    app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

    auto* c_gain = app.add_subcommand("gain", "closed-form sensitivity gain");
    auto* c_prep = app.add_subcommand("prep-scan", "gain landscape over (t_exp, dt1)");
    auto* c_tune = app.add_subcommand("echo-tune", "tune T_tau_prime and dt2");
    auto* c_rob = app.add_subcommand("robustness", "gain vs detection noise");
    auto* c_seq = app.add_subcommand("sequence-eval", "full protocol evaluation");
    auto* c_chi = app.add_subcommand("chi-trace", "mean-field chi(t) trace CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (dump_config) {
            std::cout << cfg.dump();
            return 0;
        }
        Out out = open_out(out_path);
        if (c_gain->parsed()) return cmd_gain(cfg, out);
        if (c_prep->parsed()) return cmd_prep_scan(cfg, out);
        if (c_tune->parsed()) return cmd_echo_tune(cfg, out);
        if (c_rob->parsed()) return cmd_robustness(cfg, out);
        if (c_seq->parsed()) return cmd_sequence_eval(cfg, out);
        if (c_chi->parsed()) return cmd_chi_trace(cfg, out);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const dks::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const dks::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
