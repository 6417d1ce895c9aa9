#include "dks/sequence.hpp"

#include "dks/collective_spin.hpp"
#include "dks/errors.hpp"
#include "dks/gain_formulas.hpp"
#include "dks/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dks::seq {

const char* to_string(Readout r) { return r == Readout::linear ? "linear" : "echo"; }

const char* to_string(Branch b) {
    switch (b) {
    case Branch::closed_form: return "closed_form";
    case Branch::perturbative: return "perturbative";
    default: return "exact_engine";
    }
}

void ProtocolSpec::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (v < 0.0)
            throw std::invalid_argument(std::string("ProtocolSpec: ") + name +
                                        " must be >= 0");
    };
    nonneg(T0, "T0");
    nonneg(t_exp, "t_exp");
    nonneg(dt1, "dt1");
    nonneg(T_tau_prime, "T_tau_prime");
    nonneg(T_theta, "T_theta");
    nonneg(dt2, "dt2");
    if (params.n_atoms < 2)
        throw std::invalid_argument("ProtocolSpec: N must be >= 2");
    if (!(mf_dt_max > 0))
        throw std::invalid_argument("ProtocolSpec: mf_dt_max must be > 0");
}

mf::Timeline build_timeline(const ProtocolSpec& spec) {
    spec.validate();
    mf::Timeline tl;
    const double T_tau = spec.t_exp + spec.dt1;
    tl.bs1 = spec.T0;
    const double m1 = spec.T0 + T_tau;
    const double m2 = spec.T0 + 2 * T_tau + spec.T_tau_prime;
    tl.bs2 = spec.T0 + 2 * T_tau + 2 * spec.T_tau_prime;
    const double m3 = tl.bs2 + spec.T_theta;
    tl.bs3 = tl.bs2 + 2 * spec.T_theta;
    tl.mirrors = {m1, m2, m3};

    const double dks1_on = spec.T0 + spec.t_exp;
    const double dks1_off = dks1_on + spec.dt1;
    auto add_seg = [&tl](double t0, double t1, const mf::Vec3& w) {
        if (t1 > t0) tl.segments.push_back({t0, t1, w});
    };
    const mf::Vec3 free{0, 0, 0};
    add_seg(0.0, dks1_on, free);
    add_seg(dks1_on, dks1_off, spec.omega_dks1);
    add_seg(dks1_off, tl.bs2, free);

    if (spec.readout == Readout::echo) {
        const double T_tau2 = spec.t_exp + spec.dt2;
        const double dks2_on = tl.bs3 + spec.t_exp;
        const double dks2_off = dks2_on + spec.dt2;
        const double m4 = tl.bs3 + T_tau2;
        const double m5 = tl.bs3 + 2 * T_tau2 + spec.T_tau_prime;
        tl.end = tl.bs3 + 2 * T_tau2 + 2 * spec.T_tau_prime;
        tl.mirrors.push_back(m4);
        tl.mirrors.push_back(m5);
        add_seg(tl.bs2, dks2_on, free);
        add_seg(dks2_on, dks2_off, spec.omega_dks2);
        add_seg(dks2_off, tl.end, free);
        tl.tau2_window_start = spec.include_pre_dks2_window ? tl.bs3 : dks2_on;
    } else {
        tl.end = tl.bs3;
        add_seg(tl.bs2, tl.end, free);
        tl.tau2_window_start = tl.bs3;
    }
    if (spec.collimate_before_bs2) tl.collimation = tl.bs2;
    std::sort(tl.mirrors.begin(), tl.mirrors.end());
    tl.validate();
    return tl;
}

namespace {

Taus taus_from_trace(const mf::ChiTrace& trace, const mf::Timeline& tl) {
    Taus t;
    t.tau1 = mf::accumulate_tau(trace, tl.bs1, tl.bs2);
    t.tau_ai = mf::accumulate_tau(trace, tl.bs2, tl.bs3);
    if (tl.end > tl.bs3)
        t.tau2 = mf::accumulate_tau(trace, tl.tau2_window_start, tl.end);
    return t;
}

} // namespace

Taus compute_taus(const ProtocolSpec& spec) {
    mf::Timeline tl = build_timeline(spec);
    double dt = spec.mf_dt_max;
    auto trace = mf::build_chi_trace(tl, spec.params, spec.omega_initial, dt);
    Taus cur = taus_from_trace(trace, tl);
    if (spec.mf_refine_rel > 0) {
        for (int pass = 0; pass < 6; ++pass) {
            dt *= 0.5;
            auto fine = mf::build_chi_trace(tl, spec.params, spec.omega_initial, dt);
            Taus next = taus_from_trace(fine, tl);
            // the small windows only need absolute accuracy on the scale of
            // the dominant twist, not their own (possibly vanishing) scale
            double scale = std::max({std::abs(next.tau1), std::abs(next.tau_ai),
                                     std::abs(next.tau2), 1e-12});
            auto ok = [&](double a, double b) {
                return std::abs(a - b) <=
                       spec.mf_refine_rel * std::max({std::abs(a), std::abs(b), scale});
            };
            bool converged = ok(cur.tau1, next.tau1) && ok(cur.tau_ai, next.tau_ai) &&
                             ok(cur.tau2, next.tau2);
            cur = next;
            if (converged) break;
        }
    }
    return cur;
}

double tune_linear_condition(const ProtocolSpec& spec) {
    spec.validate();
    const double lo = spec.t_tau_prime_min, hi = spec.t_tau_prime_max;
    if (!(hi > lo))
        throw std::invalid_argument("tune_linear_condition: empty bracket");

    auto taus_at = [&](double tp) {
        ProtocolSpec s = spec;
        s.T_tau_prime = tp;
        return compute_taus(s);
    };
    auto taus_coarse = [&](double tp) {
        ProtocolSpec s = spec;
        s.T_tau_prime = tp;
        if (s.mf_refine_rel > 0) s.mf_refine_rel = std::max(s.mf_refine_rel, 1e-4);
        return compute_taus(s);
    };

    const double rel_tol = 1e-4;
    Taus at_lo = taus_at(std::max(lo, 0.0));
    if (at_lo.tau1 == 0.0) return lo; // no interactions: condition holds trivially
    if (std::abs(at_lo.tau_ai) < rel_tol * std::abs(at_lo.tau1)) return lo;

    // pre-scan, denser near the lower end where tau_ai varies fastest
    const int npts = 17;
    std::vector<double> xs(npts), fs(npts), t1s(npts);
    for (int i = 0; i < npts; ++i) {
        double u = double(i) / (npts - 1);
        xs[i] = lo + (hi - lo) * u * u;
        Taus t = taus_coarse(xs[i]);
        fs[i] = t.tau_ai;
        t1s[i] = t.tau1;
    }

    auto accept = [&](double tp) {
        Taus t = taus_at(tp);
        return std::abs(t.tau_ai) < rel_tol * std::abs(t.tau1);
    };

    // 1) a sign change of tau_ai itself
    for (int i = 0; i + 1 < npts; ++i) {
        if ((fs[i] > 0) != (fs[i + 1] > 0)) {
            auto f = [&](double tp) { return taus_at(tp).tau_ai; };
            auto r = numeric::bisect_secant(f, xs[i], xs[i + 1], fs[i], fs[i + 1], 1e-12);
            if (accept(r.x)) return r.x;
        }
    }
    // 2) threshold crossing of |tau_ai| - rel_tol |tau1| (monotone dilution decay)
    auto g = [&](double tp) {
        Taus t = taus_at(tp);
        return std::abs(t.tau_ai) - rel_tol * std::abs(t.tau1);
    };
    for (int i = 0; i + 1 < npts; ++i) {
        double gi = std::abs(fs[i]) - rel_tol * std::abs(t1s[i]);
        double gj = std::abs(fs[i + 1]) - rel_tol * std::abs(t1s[i + 1]);
        if (gi > 0 && gj < 0) {
            auto r = numeric::bisect_secant(g, xs[i], xs[i + 1], gi, gj, 1e-12);
            double tp = r.x;
            if (!accept(tp)) tp = std::min(hi, tp + 2e-12); // land on the inside
            if (accept(tp)) return tp;
        }
    }
    double fmin = *std::min_element(fs.begin(), fs.end());
    double fmax = *std::max_element(fs.begin(), fs.end());
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "tune_linear_condition: no root/threshold crossing in [%g, %g] s; "
                  "tau_ai range [%g, %g], tau1 = %g",
                  lo, hi, fmin, fmax, at_lo.tau1);
    throw NoRootError(buf);
}

double tune_untwist(const ProtocolSpec& spec) {
    spec.validate();
    if (spec.params.pulse_type != mf::PulseType::bragg)
        throw std::invalid_argument("tune_untwist: requires Bragg pulses");
    ProtocolSpec base = spec;
    base.readout = Readout::echo;

    auto taus_at = [&](double dt2) -> Taus {
        ProtocolSpec s = base;
        s.dt2 = dt2;
        return compute_taus(s);
    };
    // bracketing only needs coarse taus; the root polish below re-evaluates
    // candidate brackets at full resolution
    auto taus_coarse = [&](double dt2) -> Taus {
        ProtocolSpec s = base;
        s.dt2 = dt2;
        if (s.mf_refine_rel > 0) s.mf_refine_rel = std::max(s.mf_refine_rel, 1e-4);
        return compute_taus(s);
    };

    Taus ref = taus_at(std::max(spec.dt2_min, 0.0));
    const double tau1 = ref.tau1;
    if (tau1 == 0.0) return 0.0;
    const double tol = 1e-3 * std::abs(tau1);

    const double lo = spec.dt2_min, hi = spec.dt2_max;
    if (!(hi > lo)) throw std::invalid_argument("tune_untwist: empty bracket");
    // quadratic crowding toward the lower end: the untwist dip sits at kick
    // durations far below the default bracket width
    const int npts = 49;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> xs, fs, t2s;
    for (int i = 0; i < npts; ++i) {
        double u = double(i) / (npts - 1);
        double x = lo + (hi - lo) * u * u;
        double f = nan, t2 = nan;
        try {
            Taus t = taus_coarse(x);
            t2 = t.tau2;
            f = t.tau2 + t.tau1;
        } catch (const FocusSingularityError&) {
            // over-focused corner of the bracket; skip the sample
        }
        xs.push_back(x);
        fs.push_back(f);
        t2s.push_back(t2);
    }

    auto f_of = [&](double x) {
        Taus t = taus_at(x);
        return t.tau2 + t.tau1;
    };
    // x resolution consistent with the 1e-3 relative target on tau2 + tau1
    const double xtol = std::max(1e-9, 1e-7 * (hi - lo));
    for (int i = 0; i + 1 < npts; ++i) {
        if (std::isnan(fs[i]) || std::isnan(fs[i + 1])) continue;
        if ((fs[i] > 0) == (fs[i + 1] > 0)) continue;
        try {
            double flo = f_of(xs[i]), fhi = f_of(xs[i + 1]);
            if (std::abs(flo) < tol) return xs[i];
            if (std::abs(fhi) < tol) return xs[i + 1];
            if ((flo > 0) == (fhi > 0)) continue; // coarse bracket did not survive
            auto r = numeric::bisect_secant(f_of, xs[i], xs[i + 1], flo, fhi, xtol);
            Taus t = taus_at(r.x);
            if (std::abs(t.tau2 + t.tau1) < 1e-3 * std::abs(t.tau1)) return r.x;
        } catch (const FocusSingularityError&) {
            continue; // singular interior; try the next bracket
        }
    }
    double t2min = std::numeric_limits<double>::infinity(), t2max = -t2min;
    for (double v : t2s)
        if (!std::isnan(v)) {
            t2min = std::min(t2min, v);
            t2max = std::max(t2max, v);
        }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "tune_untwist: tau2 never reaches -tau1 = %g in [%g, %g] s; "
                  "tau2 range over bracket [%g, %g]",
                  -tau1, lo, hi, t2min, t2max);
    throw NoRootError(buf);
}

const char* GainReport::csv_header() {
    return "tau1,tau_ai,tau2,mode,branch,delta_n,gain,gain_db";
}

std::string GainReport::csv_row() const {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%s,%s,%.12g,%.12g,%.12g", tau1,
                  tau_ai, tau2, to_string(mode), to_string(branch), delta_n, gain, gain_db);
    return buf;
}

std::pair<double, Branch> echo_gain_dispatch(long long n_atoms, double tau1, double tau2,
                                             double tau_ai, double delta_n,
                                             long long engine_cap) {
    const bool balanced = std::abs(tau1 + tau2) <= 1e-12 * (1.0 + std::abs(tau1));
    if (balanced && tau_ai == 0.0)
        return {gain::gain_echo_exact({n_atoms, tau1, tau2, tau_ai, delta_n}),
                Branch::closed_form};

    const bool near_balanced = std::abs(tau1 + tau2) <= 1e-3 * std::abs(tau1);
    if (near_balanced && std::abs(tau_ai) <= 0.2 * std::abs(tau1) &&
        std::abs(tau1) <= 0.1 * gain::tau_opt(n_atoms)) {
        double tau = 0.5 * (tau1 - tau2);
        return {gain::gain_echo_perturbative_corrected(n_atoms, tau, tau_ai, delta_n),
                Branch::perturbative};
    }

    spin::EchoSpec es;
    es.tau1 = tau1;
    es.tau2 = tau2;
    es.tau_ai = tau_ai;
    es.final_rotation = spin::EchoSpec::quadrature_to_z();
    return {spin::engine_gain(n_atoms, es, delta_n, engine_cap), Branch::exact_engine};
}

GainReport evaluate(const ProtocolSpec& spec) {
    Taus taus = compute_taus(spec);
    GainReport rep;
    rep.tau1 = taus.tau1;
    rep.tau_ai = taus.tau_ai;
    rep.tau2 = taus.tau2;
    rep.delta_n = spec.delta_n;
    rep.mode = spec.readout;

    const long long n = spec.params.n_atoms;
    if (spec.readout == Readout::linear) {
        rep.gain = gain::gain_linear({n, taus.tau1, spec.delta_n});
        rep.branch = Branch::closed_form;
    } else {
        auto [g, br] =
            echo_gain_dispatch(n, taus.tau1, taus.tau2, taus.tau_ai, spec.delta_n,
                               spec.engine_cap);
        rep.gain = g;
        rep.branch = br;
    }
    rep.gain_db = rep.gain > 0 ? gain::to_db(rep.gain)
                               : -std::numeric_limits<double>::infinity();
    rep.delta_theta = rep.gain > 0
                          ? 1.0 / (std::sqrt(double(n)) * rep.gain)
                          : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace dks::seq
