#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace dks::numeric {

/// Signed power with an integer exponent; handles negative bases.
double ipow(double base, long long n);

/// pow(base, n) through log space for large positive bases/exponents,
/// with correct sign handling for negative bases and integer exponents.
double pow_log_space(double base, double n);

/// Stable a - sqrt(a^2 + b^2) (avoids cancellation for a > 0, |b| << a).
double diff_sqrt_hypot(double a, double b);

// ---------------------------------------------------------------- quadrature

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol, int max_depth = 48);

// ------------------------------------------------------------- root finding

struct RootResult {
    double x = 0.0;
    double f = 0.0;
    int iterations = 0;
};

/// Bisection with a secant polish on a bracketing interval [lo, hi]
/// (f(lo) and f(hi) of opposite sign). xtol is absolute on x.
RootResult bisect_secant(const std::function<double(double)>& f,
                         double lo, double hi, double f_lo, double f_hi,
                         double xtol, int max_iter = 200);

// ----------------------------------------------------------- 1-D maximizers

/// Golden-section maximization of f on [lo, hi] to absolute x tolerance.
double golden_max(const std::function<double(double)>& f,
                  double lo, double hi, double xtol, int max_iter = 300);

// -------------------------------------------------------------- Nelder-Mead

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free maximization inside a box, deterministic under seed.
/// Points outside the box are clamped. `restarts` additional simplex starts
/// are drawn uniformly in the box from a seeded generator.
NelderMeadResult nelder_mead_max(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0,
    const std::vector<double>& lo, const std::vector<double>& hi,
    int restarts, std::uint64_t seed,
    double ftol = 1e-12, int max_iter = 2000);

// ------------------------------------------------------------ ODE (DP 5(4))

/// Dormand-Prince 5(4) adaptive step control. The observer is called after
/// every accepted step with (t, y, dydt). The event function, when given,
/// is checked after each accepted step; on a sign change the crossing is
/// located by bisection on the dense output and integration stops there
/// (return value false).
struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 = auto
    double max_step = 0.0;      // 0 = unbounded
};

using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;
using OdeObserver = std::function<void(double, const std::vector<double>&, const std::vector<double>&)>;
using OdeEvent = std::function<double(double, const std::vector<double>&)>;

struct OdeResult {
    bool event_hit = false;
    double event_time = 0.0;
    std::vector<double> y;  // state at t1 (or at the event)
};

OdeResult integrate_dp54(const OdeRhs& rhs, std::vector<double> y0,
                         double t0, double t1, const OdeOptions& opt,
                         const OdeObserver& observer = nullptr,
                         const OdeEvent& event = nullptr);

} // namespace dks::numeric
