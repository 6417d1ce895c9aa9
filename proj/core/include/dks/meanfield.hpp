#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dks::mf {

using Vec3 = std::array<double, 3>;

enum class PulseType { raman, bragg };

struct PhysicalParams {
    long long n_atoms = 100000;
    double mass = 1.44e-25;              // kg
    double scattering_length = 5.2e-9;   // m
    double wavenumber = 8.05536e6;       // 1/m (2 pi / 780 nm)
    PulseType pulse_type = PulseType::bragg;

    double coupling() const; // g = 4 pi hbar^2 a / m
    double recoil_velocity() const; // 2 hbar k / m, relative packet velocity
};

/// Thomas-Fermi scaling factors and rates per axis; radii are lambda_i * R0_i.
struct ScalingState {
    Vec3 lambda{1.0, 1.0, 1.0};
    Vec3 lambda_dot{0.0, 0.0, 0.0};
    Vec3 r0{0.0, 0.0, 0.0}; // initial Thomas-Fermi radii, m
    double t = 0.0;

    Vec3 radii() const {
        return {lambda[0] * r0[0], lambda[1] * r0[1], lambda[2] * r0[2]};
    }
};

enum class SegmentLabel { pre_expansion, dks1, free_flight, dks2, hold };

struct TrapSegment {
    double duration = 0.0;
    Vec3 omega{0.0, 0.0, 0.0}; // rad/s during the segment; 0 = free flight
    SegmentLabel label = SegmentLabel::free_flight;
};

/// Ground-state Thomas-Fermi radii R_i = sqrt(2 mu / (m w_i^2)) with
/// mu = (hbar wbar / 2)(15 N a / abar)^(2/5).
Vec3 initial_tf_radii(const PhysicalParams& params, const Vec3& omega0);

/// Chemical potential used by initial_tf_radii (exposed for cross-checks).
double tf_chemical_potential(const PhysicalParams& params, const Vec3& omega0);

/// Integrate the scaling equations
///   lambda_i'' = w0_i^2 / (lambda_i lx ly lz) - w_i(t)^2 lambda_i
/// through one segment with adaptive step control (rtol 1e-10); the returned
/// trajectory is sampled no coarser than dt_max. A scaling factor reaching
/// the collapse floor raises FocusSingularityError with the crossing time.
std::vector<ScalingState> evolve_scaling(const ScalingState& state,
                                         const TrapSegment& segment,
                                         const Vec3& omega0, double dt_max);

/// Self-phase modulation rate of a unit-normalized Thomas-Fermi envelope:
/// chi_S = 15 g / (14 pi hbar Rx Ry Rz).
double chi_self(const Vec3& radii, const PhysicalParams& params);

/// Cross-phase rate of two identical Thomas-Fermi envelopes displaced by
/// separation_z along z: 1-D adaptive quadrature of the transverse-integrated
/// overlap. Equals chi_self at zero separation and 0 beyond 2 Rz.
double chi_cross(const Vec3& radii, double separation_z, const PhysicalParams& params);

/// Raman: chi_S - chi_C. Bragg: chi_S - 2 chi_C.
double chi_effective(PulseType pulse, double chi_s, double chi_c);

// ------------------------------------------------------------------ timeline

/// Trap segments plus pulse events of a full protocol. Segments tile
/// [0, end] contiguously; pulses are instantaneous.
struct Timeline {
    struct Segment {
        double t0 = 0, t1 = 0;
        Vec3 omega{0, 0, 0};
    };
    std::vector<Segment> segments;
    double bs1 = 0, bs2 = 0, bs3 = 0;
    std::vector<double> mirrors;          // ordered mirror-pulse times
    std::optional<double> collimation;    // impulse zeroing lambda_dot
    double end = 0;
    double tau2_window_start = 0;         // = bs3, or the DKS2 start

    void validate() const; // ordering and coverage checks
    double omega_z_at(double t) const;
};

/// Piecewise relative coordinate of the two wave packets: |z| with
/// dz/dt = +-(2 hbar k / m) in free flight, sign flipped at each mirror,
/// harmonic rotation of (z, v) inside trap segments.
class SeparationProfile {
public:
    SeparationProfile(const Timeline& timeline, const PhysicalParams& params);
    double operator()(double t) const;

private:
    struct Knot {
        double t, z, v;
    };
    std::vector<Knot> knots_; // state right after each breakpoint
    std::vector<Timeline::Segment> segments_;
    double bs1_;
};

SeparationProfile relative_separation(const Timeline& timeline,
                                      const PhysicalParams& params);

// ----------------------------------------------------------------- chi trace

struct ChiTrace {
    std::vector<double> times;
    std::vector<Vec3> radii;
    std::vector<double> separation;
    std::vector<double> chi_self_v, chi_cross_v, chi_eff_v;

    static const char* csv_header(); // fixed schema for the chi-trace CSV
};

/// Integrate the scaling dynamics over the whole timeline and tabulate the
/// chi rates on a grid no coarser than dt_max (segment boundaries and pulse
/// times are always included).
ChiTrace build_chi_trace(const Timeline& timeline, const PhysicalParams& params,
                         const Vec3& omega0, double dt_max);

/// Trapezoidal integral of chi_eff over [t_a, t_b] on the trace grid.
/// An empty or inverted window yields 0.
double accumulate_tau(const ChiTrace& trace, double t_a, double t_b);

} // namespace dks::mf
