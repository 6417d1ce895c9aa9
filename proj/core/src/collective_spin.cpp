#include "dks/collective_spin.hpp"

#include "dks/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace dks::spin {

namespace {

constexpr double half_pi = 1.5707963267948966;

/// Eigendecomposition of S_x in the Dicke basis (real symmetric tridiagonal
/// with zero diagonal). S_y rotations and the phase block reuse it through
/// S_y = exp(-i pi/2 S_z) S_x exp(+i pi/2 S_z).
struct SxEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

const SxEigen& sx_eigen(long long n_atoms) {
    static std::mutex mutex;
    static std::map<long long, std::unique_ptr<SxEigen>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n_atoms);
    if (it != cache.end()) return *it->second;

    const double S = 0.5 * double(n_atoms);
    const Eigen::Index dim = n_atoms + 1;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sub(dim - 1);
    for (Eigen::Index k = 0; k + 1 < dim; ++k)
        sub[k] = 0.5 * std::sqrt(double(k + 1) * (2.0 * S - double(k)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub);
    auto entry = std::make_unique<SxEigen>(SxEigen{solver.eigenvalues(), solver.eigenvectors()});
    const SxEigen& ref = *entry;
    cache.emplace(n_atoms, std::move(entry));
    return ref;
}

void check_cap(long long n_atoms, long long cap, const char* op) {
    if (n_atoms > cap)
        throw CapacityError(std::string(op) + ": N = " + std::to_string(n_atoms) +
                            " exceeds the exact-engine cap " + std::to_string(cap));
}

Vector mul_sz(const DickeState& s) {
    Vector out(s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k) out[k] = s.m_of(k) * s.amplitudes()[k];
    return out;
}

// S_x v and S_y v through the ladder actions; O(N).
Vector mul_sx(const DickeState& s) {
    const auto& a = s.amplitudes();
    const double S = s.spin();
    Vector out = Vector::Zero(s.dim());
    for (Eigen::Index k = 0; k + 1 < s.dim(); ++k) {
        double c = 0.5 * std::sqrt(double(k + 1) * (2.0 * S - double(k)));
        out[k] += c * a[k + 1];
        out[k + 1] += c * a[k];
    }
    return out;
}

Vector mul_sy(const DickeState& s) {
    const auto& a = s.amplitudes();
    const double S = s.spin();
    Vector out = Vector::Zero(s.dim());
    const Complex i(0.0, 1.0);
    for (Eigen::Index k = 0; k + 1 < s.dim(); ++k) {
        // S_y = (S+ - S-)/(2i); |m+1><m| entry is +1/(2i) sqrt(...)
        double c = 0.5 * std::sqrt(double(k + 1) * (2.0 * S - double(k)));
        out[k] += -i * c * a[k + 1]; // raising: m_{k+1} -> m_k
        out[k + 1] += i * c * a[k];  // lowering
    }
    return out;
}

Vector zrot_phases(const DickeState& s, double angle) {
    Vector out(s.dim());
    const Complex i(0.0, 1.0);
    for (Eigen::Index k = 0; k < s.dim(); ++k)
        out[k] = std::exp(-i * angle * s.m_of(k)) * s.amplitudes()[k];
    return out;
}

} // namespace

DickeState::DickeState(double spin, Vector amplitudes)
    : spin_(spin), amplitudes_(std::move(amplitudes)) {
    long long n = static_cast<long long>(std::lround(2.0 * spin));
    if (n < 1 || std::abs(2.0 * spin - double(n)) > 1e-12)
        throw std::invalid_argument("DickeState: spin must be a positive half-integer");
    if (amplitudes_.size() != n + 1)
        throw std::invalid_argument("DickeState: amplitude vector must have 2S+1 entries");
}

DickeState DickeState::coherent(long long n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("coherent: N must be a positive integer");
    const double S = 0.5 * double(n_atoms);
    Vector amp(n_atoms + 1);
    const double log2 = std::log(2.0);
    for (long long k = 0; k <= n_atoms; ++k) {
        double logbin = std::lgamma(double(n_atoms) + 1.0) - std::lgamma(double(k) + 1.0) -
                        std::lgamma(double(n_atoms - k) + 1.0);
        amp[k] = std::exp(0.5 * logbin - S * log2);
    }
    return DickeState(S, std::move(amp));
}

double DickeState::fidelity(const DickeState& other) const {
    if (other.dim() != dim())
        throw std::invalid_argument("fidelity: dimension mismatch");
    Complex ov = other.amplitudes().dot(amplitudes_);
    return std::norm(ov);
}

DickeState apply_twist(const DickeState& state, double tau) {
    Vector out(state.dim());
    const Complex i(0.0, 1.0);
    for (Eigen::Index k = 0; k < state.dim(); ++k) {
        double m = state.m_of(k);
        out[k] = std::exp(-i * tau * m * m) * state.amplitudes()[k];
    }
    return DickeState(state.spin(), std::move(out));
}

DickeState apply_rotation(const DickeState& state, Axis axis, double angle,
                          long long engine_cap) {
    if (axis == Axis::z)
        return DickeState(state.spin(), zrot_phases(state, angle));

    check_cap(state.n_atoms(), engine_cap, "apply_rotation");
    const auto& eig = sx_eigen(state.n_atoms());
    const Complex i(0.0, 1.0);

    Vector v = state.amplitudes();
    if (axis == Axis::y) {
        // exp(-i a S_y) = exp(-i pi/2 S_z) exp(-i a S_x) exp(+i pi/2 S_z)
        v = zrot_phases(DickeState(state.spin(), v), -half_pi);
    }
    Vector w = eig.vectors.transpose() * v;
    for (Eigen::Index k = 0; k < w.size(); ++k)
        w[k] *= std::exp(-i * angle * eig.values[k]);
    v = eig.vectors * w;
    if (axis == Axis::y) v = zrot_phases(DickeState(state.spin(), v), half_pi);
    return DickeState(state.spin(), std::move(v));
}

DickeState apply_phase_block(const DickeState& state, double theta, double eta,
                             long long engine_cap) {
    check_cap(state.n_atoms(), engine_cap, "apply_phase_block");
    const auto& eig = sx_eigen(state.n_atoms());
    const Complex i(0.0, 1.0);
    // f(S_y) = exp(-i pi/2 S_z) f(S_x) exp(+i pi/2 S_z), applied right to left
    Vector v = zrot_phases(state, -half_pi);
    Vector w = eig.vectors.transpose() * v;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        double lam = eig.values[k];
        w[k] *= std::exp(i * (theta * lam + eta * lam * lam));
    }
    v = eig.vectors * w;
    return DickeState(state.spin(), zrot_phases(DickeState(state.spin(), v), half_pi));
}

SpinMoments moments(const DickeState& state) {
    Vector sx = mul_sx(state), sy = mul_sy(state), sz = mul_sz(state);
    const Vector& a = state.amplitudes();
    SpinMoments mom;
    mom.mean_x = a.dot(sx).real();
    mom.mean_y = a.dot(sy).real();
    mom.mean_z = a.dot(sz).real();
    const Vector* ops[3] = {&sx, &sy, &sz};
    for (int p = 0; p < 3; ++p)
        for (int q = p; q < 3; ++q) {
            double v = ops[p]->dot(*ops[q]).real(); // Re<S_p psi|S_q psi> = <{S_p,S_q}>/2
            mom.second(p, q) = v;
            mom.second(q, p) = v;
        }
    mom.variance_z = mom.second(2, 2) - mom.mean_z * mom.mean_z;
    mom.variance_y = mom.second(1, 1) - mom.mean_y * mom.mean_y;
    return mom;
}

DickeState echo_state(long long n_atoms, const EchoSpec& spec, long long engine_cap) {
    if (n_atoms < 2) throw std::invalid_argument("echo_state: N must be >= 2");
    DickeState psi = DickeState::coherent(n_atoms);
    psi = apply_twist(psi, spec.tau1);
    if (spec.pre_rotation)
        psi = apply_rotation(psi, spec.pre_rotation->axis, spec.pre_rotation->angle, engine_cap);
    psi = apply_phase_block(psi, spec.theta, -spec.tau_ai, engine_cap);
    psi = apply_twist(psi, spec.tau2);
    if (spec.final_rotation)
        psi = apply_rotation(psi, spec.final_rotation->axis, spec.final_rotation->angle,
                             engine_cap);
    return psi;
}

SpinMoments run_echo(long long n_atoms, const EchoSpec& spec, long long engine_cap) {
    return moments(echo_state(n_atoms, spec, engine_cap));
}

Sensitivity sensitivity(const SpinMoments& at_theta, double slope,
                        long long n_atoms, double delta_n) {
    if (slope == 0.0)
        throw DivergentSensitivityError("sensitivity: zero signal slope");
    if (delta_n < 0.0)
        throw std::invalid_argument("sensitivity: delta_n must be >= 0");
    double var = at_theta.variance_z + delta_n * delta_n;
    double dtheta = std::sqrt(var) / std::abs(slope);
    return {dtheta, 1.0 / (std::sqrt(double(n_atoms)) * dtheta)};
}

double slope_at_zero(long long n_atoms, const EchoSpec& spec,
                     double delta_theta_step, long long engine_cap) {
    if (delta_theta_step <= 0.0)
        throw std::invalid_argument("slope_at_zero: step must be > 0");
    auto mean_z_at = [&](double theta) {
        EchoSpec s = spec;
        s.theta = theta;
        return run_echo(n_atoms, s, engine_cap).mean_z;
    };
    const double h = delta_theta_step;
    double d_h = (mean_z_at(spec.theta + h) - mean_z_at(spec.theta - h)) / (2.0 * h);
    double d_h2 = (mean_z_at(spec.theta + h / 2) - mean_z_at(spec.theta - h / 2)) / h;
    return (4.0 * d_h2 - d_h) / 3.0;
}

double engine_gain(long long n_atoms, const EchoSpec& spec, double delta_n,
                   long long engine_cap) {
    SpinMoments mom = run_echo(n_atoms, spec, engine_cap);
    double slope = slope_at_zero(n_atoms, spec, 1e-4, engine_cap);
    return sensitivity(mom, slope, n_atoms, delta_n).gain;
}

} // namespace dks::spin
