#include "dks/meanfield.hpp"

#include "dks/constants.hpp"
#include "dks/errors.hpp"
#include "dks/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace dks::mf {

using constants::hbar;
using constants::pi;

namespace {
// Scaling factors below this are treated as an over-focused (collapsing)
// cloud; the Thomas-Fermi scaling ansatz has no validity there anyway.
constexpr double lambda_floor = 1e-3;
} // namespace

double PhysicalParams::coupling() const {
    return 4.0 * pi * hbar * hbar * scattering_length / mass;
}

double PhysicalParams::recoil_velocity() const {
    return 2.0 * hbar * wavenumber / mass;
}

double tf_chemical_potential(const PhysicalParams& params, const Vec3& omega0) {
    for (double w : omega0)
        if (!(w > 0.0))
            throw std::invalid_argument("tf_chemical_potential: trap frequencies must be > 0");
    double wbar = std::cbrt(omega0[0] * omega0[1] * omega0[2]);
    double abar = std::sqrt(hbar / (params.mass * wbar));
    double x = 15.0 * double(params.n_atoms) * params.scattering_length / abar;
    return 0.5 * hbar * wbar * std::pow(x, 0.4);
}

Vec3 initial_tf_radii(const PhysicalParams& params, const Vec3& omega0) {
    double mu = tf_chemical_potential(params, omega0);
    Vec3 r;
    for (int i = 0; i < 3; ++i)
        r[i] = std::sqrt(2.0 * mu / (params.mass * omega0[i] * omega0[i]));
    return r;
}

namespace {

numeric::OdeRhs scaling_rhs(const Vec3& omega0, const Vec3& omega) {
    return [omega0, omega](double, const std::vector<double>& y, std::vector<double>& dydt) {
        double prod = y[0] * y[1] * y[2];
        for (int i = 0; i < 3; ++i) {
            dydt[i] = y[3 + i];
            dydt[3 + i] = omega0[i] * omega0[i] / (y[i] * prod) -
                          omega[i] * omega[i] * y[i];
        }
    };
}

numeric::OdeEvent collapse_event() {
    return [](double, const std::vector<double>& y) {
        return std::min({y[0], y[1], y[2]}) - lambda_floor;
    };
}

int collapsing_axis(const std::vector<double>& y) {
    int ax = 0;
    for (int i = 1; i < 3; ++i)
        if (y[i] < y[ax]) ax = i;
    return ax;
}

} // namespace

std::vector<ScalingState> evolve_scaling(const ScalingState& state,
                                         const TrapSegment& segment,
                                         const Vec3& omega0, double dt_max) {
    for (double l : state.lambda)
        if (!(l > 0.0)) throw std::invalid_argument("evolve_scaling: lambda must be > 0");
    if (segment.duration < 0.0)
        throw std::invalid_argument("evolve_scaling: negative segment duration");
    if (!(dt_max > 0.0)) throw std::invalid_argument("evolve_scaling: dt_max must be > 0");

    std::vector<double> y0(6);
    for (int i = 0; i < 3; ++i) {
        y0[i] = state.lambda[i];
        y0[3 + i] = state.lambda_dot[i];
    }

    std::vector<ScalingState> traj;
    auto push = [&](double t, const std::vector<double>& y) {
        ScalingState s;
        s.r0 = state.r0;
        s.t = state.t + t;
        for (int i = 0; i < 3; ++i) {
            s.lambda[i] = y[i];
            s.lambda_dot[i] = y[3 + i];
        }
        traj.push_back(s);
    };

    if (segment.duration == 0.0) {
        push(0.0, y0);
        return traj;
    }

    numeric::OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-12;
    opt.max_step = dt_max; // bounds the trajectory spacing
    auto observer = [&](double t, const std::vector<double>& y, const std::vector<double>&) {
        push(t, y);
    };
    auto res = numeric::integrate_dp54(scaling_rhs(omega0, segment.omega), y0, 0.0,
                                       segment.duration, opt, observer, collapse_event());
    if (res.event_hit)
        throw FocusSingularityError(state.t + res.event_time, collapsing_axis(res.y));
    if (traj.empty() || traj.back().t < state.t + segment.duration - 1e-15)
        push(segment.duration, res.y);
    return traj;
}

double chi_self(const Vec3& radii, const PhysicalParams& params) {
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("chi_self: radii must be > 0");
    return 15.0 * params.coupling() / (14.0 * pi * hbar * radii[0] * radii[1] * radii[2]);
}

double chi_cross(const Vec3& radii, double separation_z, const PhysicalParams& params) {
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("chi_cross: radii must be > 0");
    if (separation_z < 0.0)
        throw std::invalid_argument("chi_cross: separation must be >= 0");
    const double rz = radii[2];
    if (separation_z >= 2.0 * rz) return 0.0;
    if (separation_z == 0.0) return chi_self(radii, params); // exact overlap limit

    const double d = separation_z;
    // transverse-integrated overlap of the two displaced parabolic envelopes:
    // pi Rx Ry [A B m - (A+B) m^2/2 + m^3/3], m = min(A, B),
    // A = 1 - z^2/Rz^2, B = 1 - (z-d)^2/Rz^2
    auto f = [rz, d](double z) {
        double A = 1.0 - z * z / (rz * rz);
        double zb = z - d;
        double B = 1.0 - zb * zb / (rz * rz);
        if (A <= 0.0 || B <= 0.0) return 0.0;
        double m = std::min(A, B);
        return A * B * m - 0.5 * (A + B) * m * m + m * m * m / 3.0;
    };
    // integrand is polynomial on each side of z = d/2 (where min() switches)
    double tol = 1e-11 * rz;
    double iz = numeric::adaptive_simpson(f, d - rz, d / 2, tol) +
                numeric::adaptive_simpson(f, d / 2, rz, tol);
    double c = 15.0 / (8.0 * pi * radii[0] * radii[1] * radii[2]);
    return params.coupling() / hbar * c * c * pi * radii[0] * radii[1] * iz;
}

double chi_effective(PulseType pulse, double chi_s, double chi_c) {
    return pulse == PulseType::raman ? chi_s - chi_c : chi_s - 2.0 * chi_c;
}

// -------------------------------------------------------------------- timeline

void Timeline::validate() const {
    if (segments.empty()) throw std::invalid_argument("Timeline: no segments");
    double t = 0.0;
    for (const auto& s : segments) {
        if (s.t1 < s.t0 || std::abs(s.t0 - t) > 1e-12)
            throw std::invalid_argument("Timeline: segments must tile [0, end] in order");
        t = s.t1;
    }
    if (std::abs(t - end) > 1e-12)
        throw std::invalid_argument("Timeline: segments do not reach the end time");
    double prev = bs1;
    for (double m : mirrors) {
        if (m < prev) throw std::invalid_argument("Timeline: unordered pulse events");
        prev = m;
    }
}

double Timeline::omega_z_at(double t) const {
    for (const auto& s : segments)
        if (t >= s.t0 && t < s.t1) return s.omega[2];
    return 0.0;
}

SeparationProfile::SeparationProfile(const Timeline& timeline, const PhysicalParams& params)
    : segments_(timeline.segments), bs1_(timeline.bs1) {
    timeline.validate();
    // breakpoints after BS1: every mirror and every segment boundary;
    // coincident times are merged so a mirror flips the velocity exactly once
    struct Break {
        double t;
        bool mirror;
    };
    std::vector<Break> breaks;
    for (double m : timeline.mirrors) breaks.push_back({m, true});
    for (const auto& s : segments_) {
        breaks.push_back({s.t0, false});
        breaks.push_back({s.t1, false});
    }
    std::sort(breaks.begin(), breaks.end(),
              [](const Break& a, const Break& b) { return a.t < b.t; });
    std::vector<Break> merged;
    for (const auto& b : breaks) {
        if (b.t <= bs1_ + 1e-15) continue;
        if (!merged.empty() && b.t <= merged.back().t + 1e-15)
            merged.back().mirror = merged.back().mirror || b.mirror;
        else
            merged.push_back(b);
    }

    double z = 0.0, v = params.recoil_velocity();
    double tcur = bs1_;
    knots_.push_back({tcur, z, v});
    auto advance = [&](double t0, double t1, double& zz, double& vv) {
        double w = timeline.omega_z_at(0.5 * (t0 + t1));
        double dt = t1 - t0;
        if (w == 0.0) {
            zz += vv * dt;
        } else {
            double zn = zz * std::cos(w * dt) + vv / w * std::sin(w * dt);
            vv = -zz * w * std::sin(w * dt) + vv * std::cos(w * dt);
            zz = zn;
        }
    };
    for (const auto& b : merged) {
        advance(tcur, b.t, z, v);
        if (b.mirror) v = -v;
        tcur = b.t;
        knots_.push_back({tcur, z, v});
    }
}

double SeparationProfile::operator()(double t) const {
    if (t <= bs1_) return 0.0;
    // find the last knot at or before t
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double tt, const Knot& k) { return tt < k.t; });
    const Knot& k = *(it - 1);
    double z = k.z, v = k.v;
    // advance within one homogeneous interval (knots cover all boundaries)
    double w = 0.0;
    for (const auto& s : segments_)
        if (k.t >= s.t0 - 1e-15 && t <= s.t1 + 1e-15 && k.t < s.t1) {
            w = s.omega[2];
            break;
        }
    double dt = t - k.t;
    if (w == 0.0) return std::abs(z + v * dt);
    return std::abs(z * std::cos(w * dt) + v / w * std::sin(w * dt));
}

SeparationProfile relative_separation(const Timeline& timeline,
                                      const PhysicalParams& params) {
    return SeparationProfile(timeline, params);
}

// ------------------------------------------------------------------- chi trace

const char* ChiTrace::csv_header() {
    return "time_s,Rx_m,Ry_m,Rz_m,chi_self_hz,chi_cross_hz,chi_eff_hz,separation_m";
}

ChiTrace build_chi_trace(const Timeline& timeline, const PhysicalParams& params,
                         const Vec3& omega0, double dt_max) {
    timeline.validate();
    if (!(dt_max > 0.0)) throw std::invalid_argument("build_chi_trace: dt_max must be > 0");
    SeparationProfile sep(timeline, params);

    // sample times that must be present: pulse events and window edges
    std::vector<double> required{timeline.bs1, timeline.bs2, timeline.bs3,
                                 timeline.tau2_window_start, timeline.end};
    required.insert(required.end(), timeline.mirrors.begin(), timeline.mirrors.end());
    std::sort(required.begin(), required.end());

    ChiTrace trace;
    ScalingState state;
    state.r0 = initial_tf_radii(params, omega0);

    auto emit = [&](const ScalingState& s) {
        if (!trace.times.empty() && s.t <= trace.times.back() + 1e-15) return;
        Vec3 r = s.radii();
        double d = sep(s.t);
        double cs = chi_self(r, params);
        double cc = chi_cross(r, d, params);
        trace.times.push_back(s.t);
        trace.radii.push_back(r);
        trace.separation.push_back(d);
        trace.chi_self_v.push_back(cs);
        trace.chi_cross_v.push_back(cc);
        trace.chi_eff_v.push_back(chi_effective(params.pulse_type, cs, cc));
    };

    for (const auto& seg : timeline.segments) {
        // split the segment at required interior times
        std::vector<double> cuts{seg.t0};
        for (double r : required)
            if (r > seg.t0 + 1e-15 && r < seg.t1 - 1e-15) cuts.push_back(r);
        cuts.push_back(seg.t1);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            TrapSegment ts;
            ts.duration = cuts[c + 1] - cuts[c];
            ts.omega = seg.omega;
            double step = std::min(dt_max, std::max(ts.duration / 8.0, 1e-9));
            auto part = evolve_scaling(state, ts, omega0, step);
            for (const auto& s : part) emit(s);
            if (!part.empty()) state = part.back();
        }
        if (timeline.collimation && std::abs(seg.t1 - *timeline.collimation) < 1e-15)
            state.lambda_dot = {0.0, 0.0, 0.0};
    }
    return trace;
}

double accumulate_tau(const ChiTrace& trace, double t_a, double t_b) {
    if (!(t_b > t_a)) return 0.0;
    if (trace.times.size() < 2)
        throw std::invalid_argument("accumulate_tau: trace too short");
    if (t_a < trace.times.front() - 1e-12 || t_b > trace.times.back() + 1e-12)
        throw std::invalid_argument("accumulate_tau: window outside trace support");

    auto value_at = [&](double t, std::size_t hint_lo) {
        // linear interpolation inside the trace grid
        std::size_t i = hint_lo;
        while (i + 2 < trace.times.size() && trace.times[i + 1] < t) ++i;
        double t0 = trace.times[i], t1 = trace.times[i + 1];
        double f = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
        return trace.chi_eff_v[i] + f * (trace.chi_eff_v[i + 1] - trace.chi_eff_v[i]);
    };

    double total = 0.0;
    double prev_t = t_a, prev_v = value_at(t_a, 0);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i];
        if (t <= t_a + 1e-18) continue;
        if (t >= t_b) break;
        total += 0.5 * (prev_v + trace.chi_eff_v[i]) * (t - prev_t);
        prev_t = t;
        prev_v = trace.chi_eff_v[i];
    }
    total += 0.5 * (prev_v + value_at(t_b, 0)) * (t_b - prev_t);
    return total;
}

} // namespace dks::mf
