#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>

namespace dks::spin {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

enum class Axis { x, y, z };

struct Rotation {
    Axis axis = Axis::z;
    double angle = 0.0;
};

/// Symmetric collective-spin state in the |S, m> basis, m = S, S-1, ..., -S.
/// amplitudes[k] is the coefficient of m = S - k.
class DickeState {
public:
    DickeState(double spin, Vector amplitudes);

    /// Coherent spin state along +x for N atoms (binomial amplitudes,
    /// computed in log space; valid up to N ~ 1e6).
    static DickeState coherent(long long n_atoms);

    double spin() const { return spin_; }
    long long n_atoms() const { return static_cast<long long>(std::lround(2.0 * spin_)); }
    Eigen::Index dim() const { return amplitudes_.size(); }
    const Vector& amplitudes() const { return amplitudes_; }
    double m_of(Eigen::Index k) const { return spin_ - double(k); }

    double norm_squared() const { return amplitudes_.squaredNorm(); }

    /// Fidelity |<other|this>|^2.
    double fidelity(const DickeState& other) const;

private:
    double spin_;
    Vector amplitudes_;
};

struct SpinMoments {
    double mean_x = 0, mean_y = 0, mean_z = 0;
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero(); // symmetrized <S_i S_j>
    double variance_z = 0;
    double variance_y = 0;
};

/// One-axis-twisting echo pipeline parameters. The interferometer block is
/// exp(i theta S_y) exp(-i tau_ai S_y^2): the residual twist carries the same
/// Schroedinger sign as the S_z^2 twists, so that equal-sign tau1 and tau_ai
/// degrade the echo and opposite signs can enhance it.
struct EchoSpec {
    double tau1 = 0.0;
    double theta = 0.0;
    double tau_ai = 0.0;
    double tau2 = 0.0;
    std::optional<Rotation> pre_rotation;   // applied after twist(tau1)
    std::optional<Rotation> final_rotation; // applied after twist(tau2)

    /// Rotation that maps the S_y quadrature onto the measured S_z
    /// (the recombiner before detection in the echo readout).
    static Rotation quadrature_to_z() { return {Axis::x, 1.5707963267948966}; }
};

inline constexpr long long default_engine_cap = 4096;

/// exp(-i tau S_z^2), diagonal phases.
DickeState apply_twist(const DickeState& state, double tau);

/// exp(-i angle S_axis). z is diagonal; x and y go through a cached
/// eigendecomposition of the tridiagonal S_x (one per N).
DickeState apply_rotation(const DickeState& state, Axis axis, double angle,
                          long long engine_cap = default_engine_cap);

/// exp(i (theta S_y + eta S_y^2)), evaluated exactly in the S_y eigenbasis.
DickeState apply_phase_block(const DickeState& state, double theta, double eta,
                             long long engine_cap = default_engine_cap);

SpinMoments moments(const DickeState& state);

/// Full echo pipeline; returns the output state.
DickeState echo_state(long long n_atoms, const EchoSpec& spec,
                      long long engine_cap = default_engine_cap);

/// Echo pipeline reduced to output moments.
SpinMoments run_echo(long long n_atoms, const EchoSpec& spec,
                     long long engine_cap = default_engine_cap);

struct Sensitivity {
    double delta_theta = 0.0;
    double gain = 0.0;
};

/// Error propagation on the measured population difference:
/// delta_theta^2 = (Var(S_z) + delta_n^2) / slope^2, gain = 1/(sqrt(N) dtheta).
Sensitivity sensitivity(const SpinMoments& at_theta, double slope,
                        long long n_atoms, double delta_n);

/// d<S_z>/dtheta of the echo pipeline at spec.theta, central difference with
/// one Richardson extrapolation level.
double slope_at_zero(long long n_atoms, const EchoSpec& spec,
                     double delta_theta_step = 1e-4,
                     long long engine_cap = default_engine_cap);

/// Exact-engine gain of the echo pipeline at theta = spec.theta:
/// |slope| / (sqrt(N) sqrt(Var + delta_n^2)).
double engine_gain(long long n_atoms, const EchoSpec& spec, double delta_n,
                   long long engine_cap = default_engine_cap);

} // namespace dks::spin
