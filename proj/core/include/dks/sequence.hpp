#pragma once

#include "dks/meanfield.hpp"

#include <string>

namespace dks::seq {

enum class Readout { linear, echo };
enum class Branch { closed_form, perturbative, exact_engine };

const char* to_string(Readout r);
const char* to_string(Branch b);

/// Full protocol description: physics, trap frequencies per stage (rad/s),
/// pulse timings, readout mode and numerics.
struct ProtocolSpec {
    mf::PhysicalParams params;
    mf::Vec3 omega_initial{2 * 3.14159265358979 * 80, 2 * 3.14159265358979 * 80,
                           2 * 3.14159265358979 * 80};
    mf::Vec3 omega_dks1{2 * 3.14159265358979 * 250, 2 * 3.14159265358979 * 250,
                        2 * 3.14159265358979 * 20};
    mf::Vec3 omega_dks2{2 * 3.14159265358979 * 250, 2 * 3.14159265358979 * 250,
                        2 * 3.14159265358979 * 20};
    double T0 = 1e-3;
    double t_exp = 5e-3;
    double dt1 = 0.25e-3;
    double T_tau_prime = 5.25e-3;
    double T_theta = 5e-3;
    double dt2 = 0.0;
    Readout readout = Readout::linear;
    bool collimate_before_bs2 = false;
    double delta_n = 0.0;
    bool include_pre_dks2_window = true; // count [BS3, DKS2 start) toward tau2

    // numerics
    double mf_dt_max = 2e-5;
    double mf_refine_rel = 1e-6; // 0 disables grid-halving refinement
    long long engine_cap = 4096;

    // tuner brackets
    double t_tau_prime_min = 0.0;
    double t_tau_prime_max = 0.2;
    double dt2_min = 0.0;
    double dt2_max = 5e-3;

    void validate() const;
};

/// Event/segment layout of the protocol:
/// release - T0 - BS1 - t_exp - DKS1(dt1) - M1 at T_tau = t_exp+dt1 -
/// (packets re-overlap at 2 T_tau) - M2 at 2 T_tau + T'_tau - BS2 at
/// T_i = T0 + 2 T_tau + 2 T'_tau - [MZ: M3, BS3 spaced by T_theta] -
/// [echo: t_exp drift, DKS2(dt2), M4, M5, detection], mirroring the
/// preparation stage layout.
mf::Timeline build_timeline(const ProtocolSpec& spec);

struct Taus {
    double tau1 = 0.0;
    double tau_ai = 0.0;
    double tau2 = 0.0;
};

/// Accumulated twisting strengths over the three protocol windows,
/// self-refined until stable to spec.mf_refine_rel under grid halving.
Taus compute_taus(const ProtocolSpec& spec);

/// Adjust T'_tau inside [t_tau_prime_min, t_tau_prime_max] until
/// |tau_ai| < 1e-4 |tau1| (root or threshold crossing; bisection + secant).
double tune_linear_condition(const ProtocolSpec& spec);

/// Adjust dt2 inside [dt2_min, dt2_max] until |tau2 + tau1| < 1e-3 |tau1|.
/// Requires Bragg pulses (the sign-tunable case).
double tune_untwist(const ProtocolSpec& spec);

struct GainReport {
    double tau1 = 0, tau_ai = 0, tau2 = 0;
    double delta_n = 0;
    Readout mode = Readout::linear;
    Branch branch = Branch::closed_form;
    double gain = 0;
    double gain_db = 0;
    double delta_theta = 0;

    static const char* csv_header(); // fixed schema for the report CSV
    std::string csv_row() const;
};

/// Echo-gain dispatch shared by evaluate() and the CLI:
/// closed form when tau2 = -tau1 and tau_ai = 0; the first-order expansion
/// when |tau1 + tau2| <= 1e-3 |tau1|, |tau_ai| <= 0.2 |tau1| and
/// |tau1| <= 0.1 tau_opt(N); the exact engine otherwise (N capped, a
/// CapacityError beyond the cap rather than a silent approximation).
std::pair<double, Branch> echo_gain_dispatch(long long n_atoms, double tau1, double tau2,
                                             double tau_ai, double delta_n,
                                             long long engine_cap);

/// Full evaluation: taus from the mean-field trace, then the gain dispatch.
GainReport evaluate(const ProtocolSpec& spec);

} // namespace dks::seq
