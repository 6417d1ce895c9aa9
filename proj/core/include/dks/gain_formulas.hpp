#pragma once

#include <cstdint>

namespace dks::gain {

struct LinearGainInputs {
    long long n_atoms = 2;
    double tau = 0.0;
    double delta_n = 0.0;
};

struct EchoGainInputs {
    long long n_atoms = 2;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau_ai = 0.0;
    double delta_n = 0.0;
};

/// Metrological gain of the linearly-read interferometer fed with a
/// one-axis-twisted state (optimal quadrature rotation assumed):
///   G = slope / (sqrt(N) sqrt(sigma_min^2 + delta_n^2)),
///   slope = (N/2) cos(tau)^(N-1),
///   sigma_min^2 = N [4 + (N-1)(A - sqrt(A^2+B^2))] / 16,
///   A = 1 - cos(2 tau)^(N-2), B = 4 sin(tau) cos(tau)^(N-2).
/// Powers run in log space; A - sqrt(A^2+B^2) uses the cancellation-free form.
double gain_linear(const LinearGainInputs& in);

/// Variance of the measured quadrature after the optimal rotation (the
/// sigma_min^2 above). Exposed for the detection-noise model.
double squeezed_variance(long long n_atoms, double tau);

/// Slope (N/2) cos(tau)^(N-1) of the linear readout.
double linear_slope(long long n_atoms, double tau);

/// Rotation angle about x that aligns the minimal variance of the twisted
/// state with S_z, in the exp(-i angle S_x) convention used by
/// spin::apply_rotation; equals -atan2(B, A)/2.
double optimal_prerotation_angle(long long n_atoms, double tau);

/// Balanced-echo gain, tau2 = -tau1 and tau_ai = 0 (throws BranchMismatchError
/// otherwise): Q = S(2S-1)|sin tau| cos(tau)^(2S-2) / (sqrt(N) sqrt(N/4 + dn^2)).
double gain_echo_exact(const EchoGainInputs& in);

/// First-order-in-eta echo gain sqrt(Q0^2 + A eta) with the three-line
/// coefficient A printed in the source material. Restricted to |tau| < pi/6.
/// The expansion does not track the exact engine quantitatively (see the
/// corrected variant); it is kept as the reference closed form.
double gain_echo_perturbative(long long n_atoms, double tau, double eta);

/// Double-linearized form Q = |(4 tau - 3 eta) N/2 - (2 tau - eta)| / 2.
double gain_echo_eq5(long long n_atoms, double tau, double eta);

/// First-order echo gain rebuilt from the verified identity table:
/// slope(eta) = slope0 - eta t5 / S, Var(eta) = S/2 + eta g4, with
/// slope0 = -i<[S_y, U^dag S_y U]>, t5 the symmetrized triple product and
/// g4 = Im<[S_y^2, U^dag S_y^2 U]>. Tracks the exact engine to O(eta^2).
double gain_echo_perturbative_corrected(long long n_atoms, double tau, double eta,
                                        double delta_n = 0.0);

/// Numeric maximizer of gain_linear over tau in (0, pi/2); coarse log-spaced
/// bracketing around the 1.2 N^(-1/3) seed followed by golden-section.
double tau_opt(long long n_atoms);

/// Variance gain in decibels, 20 log10(gain).
double to_db(double gain);

} // namespace dks::gain
