#include "dks/gain_formulas.hpp"

#include "dks/errors.hpp"
#include "dks/identities.hpp"
#include "dks/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dks::gain {

namespace {

void require_n(long long n, long long min_n, const char* who) {
    if (n < min_n)
        throw std::invalid_argument(std::string(who) + ": N must be >= " +
                                    std::to_string(min_n));
}

struct LinearParts {
    double slope;
    double var_min;
};

LinearParts linear_parts(long long n, double tau) {
    const double N = double(n);
    double cN1 = numeric::pow_log_space(std::cos(tau), N - 1);
    double cN2 = numeric::pow_log_space(std::cos(tau), N - 2);
    double A = 1.0 - numeric::pow_log_space(std::cos(2 * tau), N - 2);
    double B = 4.0 * std::sin(tau) * cN2;
    double d = numeric::diff_sqrt_hypot(A, B); // A - sqrt(A^2+B^2), stable
    double var = N * (4.0 + (N - 1) * d) / 16.0;
    if (!(var > 0.0))
        throw Error("gain_linear: squeezed variance is not positive (tau out of range?)");
    return {0.5 * N * cN1, var};
}

} // namespace

double linear_slope(long long n, double tau) {
    require_n(n, 2, "linear_slope");
    return 0.5 * double(n) * numeric::pow_log_space(std::cos(tau), double(n) - 1);
}

double squeezed_variance(long long n, double tau) {
    require_n(n, 2, "squeezed_variance");
    return linear_parts(n, tau).var_min;
}

double optimal_prerotation_angle(long long n, double tau) {
    require_n(n, 2, "optimal_prerotation_angle");
    const double N = double(n);
    double A = 1.0 - numeric::pow_log_space(std::cos(2 * tau), N - 2);
    double B = 4.0 * std::sin(tau) * numeric::pow_log_space(std::cos(tau), N - 2);
    return -0.5 * std::atan2(B, A);
}

double gain_linear(const LinearGainInputs& in) {
    require_n(in.n_atoms, 2, "gain_linear");
    if (in.delta_n < 0) throw std::invalid_argument("gain_linear: delta_n must be >= 0");
    auto p = linear_parts(in.n_atoms, in.tau);
    return p.slope /
           (std::sqrt(double(in.n_atoms)) * std::sqrt(p.var_min + in.delta_n * in.delta_n));
}

double gain_echo_exact(const EchoGainInputs& in) {
    require_n(in.n_atoms, 2, "gain_echo_exact");
    if (in.delta_n < 0) throw std::invalid_argument("gain_echo_exact: delta_n must be >= 0");
    if (std::abs(in.tau1 + in.tau2) > 1e-12 * (1.0 + std::abs(in.tau1)) || in.tau_ai != 0.0)
        throw BranchMismatchError(
            "gain_echo_exact: closed form requires tau2 = -tau1 and tau_ai = 0");
    const double N = double(in.n_atoms), S = 0.5 * N;
    double tau = in.tau1;
    double slope = S * (2 * S - 1) * std::abs(std::sin(tau)) *
                   numeric::pow_log_space(std::cos(tau), 2 * S - 2);
    return slope / (std::sqrt(N) * std::sqrt(N / 4.0 + in.delta_n * in.delta_n));
}

double gain_echo_perturbative(long long n, double tau, double eta) {
    require_n(n, 2, "gain_echo_perturbative");
    if (std::abs(tau) >= 0.5235987755982988) // pi/6
        throw std::invalid_argument(
            "gain_echo_perturbative: |tau| must be < pi/6 (cos(3 tau) power branch)");
    const double S = 0.5 * double(n);
    const double c = std::cos(tau), s = std::sin(tau);
    const double c2 = std::cos(2 * tau), c3 = std::cos(3 * tau);
    const double c4 = std::cos(4 * tau), c8 = std::cos(8 * tau);
    auto P = [](double b, double p) { return numeric::pow_log_space(b, p); };

    double q0sq = (2 * S - 1) * (2 * S - 1) * s * s * P(c, 4 * S - 4);
    double a1 = 0.25 * (2 * S - 1) * (2 * S - 1) * s * P(c, 2 * S - 2) * P(c3, 2 * S - 3) *
                ((2 * S - 1) * c2 + S * c4);
    double a2 = 2.0 * (2 * S - 1) * (2 * S - 1) * s * s * s * P(c, 4 * S - 3) *
                (-2.0 * (2 * S + 1) * c2 +
                 P(c2, 2 * S - 3) * (3 + 4 * S * (S - 1) + 2 * (S + 1) * c4 + c8));
    double a3 = 0.25 * (2 * S - 1) * s * P(c, 4 * S - 5) *
                (-1 + 4 * S - 8 * S * S + (1 - 2 * S * (2 * S + 1)) * c2 +
                 (3 - 9 * S + 6 * S * S) * c4);
    double q2 = q0sq + (a1 + a2 + a3) * eta;
    return std::sqrt(std::max(q2, 0.0));
}

double gain_echo_eq5(long long n, double tau, double eta) {
    require_n(n, 2, "gain_echo_eq5");
    const double N = double(n);
    return 0.5 * std::abs((4 * tau - 3 * eta) * N / 2 - (2 * tau - eta));
}

double gain_echo_perturbative_corrected(long long n, double tau, double eta,
                                        double delta_n) {
    require_n(n, 2, "gain_echo_perturbative_corrected");
    if (delta_n < 0)
        throw std::invalid_argument("gain_echo_perturbative_corrected: delta_n >= 0");
    const double S = 0.5 * double(n);
    double g1 = supplemental_identity("comm_Sy_UdSyU", S, tau).imag();
    double g4 = supplemental_identity("comm_Sy2_UdSy2U", S, tau).imag();
    double t5 = supplemental_identity("triple_sym", S, tau).real();
    double slope = -g1 - eta * t5 / S;
    double var = S / 2.0 + eta * g4;
    if (!(var > 0.0)) return 0.0;
    return std::abs(slope) /
           (std::sqrt(2.0 * S) * std::sqrt(var + delta_n * delta_n));
}

double tau_opt(long long n) {
    require_n(n, 10, "tau_opt");
    auto G = [n](double tau) { return gain_linear({n, tau, 0.0}); };
    const double seed = 1.2 * std::pow(double(n), -1.0 / 3.0);
    // coarse log-spaced scan across (0, pi/2), denser near the seed's decade
    const double lo = 1e-7, hi = 1.5;
    const int grid = 400;
    double best_tau = seed, best_val = -1.0;
    for (int i = 0; i < grid; ++i) {
        double t = lo * std::pow(hi / lo, double(i) / (grid - 1));
        double v = G(t);
        if (v > best_val) {
            best_val = v;
            best_tau = t;
        }
    }
    double bl = best_tau / 1.2, bh = best_tau * 1.2;
    return numeric::golden_max(G, bl, bh, 1e-13 * best_tau + 1e-16);
}

double to_db(double gain) {
    if (gain <= 0) throw std::invalid_argument("to_db: gain must be positive");
    return 20.0 * std::log10(gain);
}

} // namespace dks::gain
