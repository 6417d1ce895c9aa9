#include "dks/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace dks::numeric {

double ipow(double base, long long n) {
    if (n < 0) return 1.0 / ipow(base, -n);
    double r = 1.0, b = base;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

double pow_log_space(double base, double n) {
    if (base > 0.0) return std::exp(n * std::log(base));
    if (base == 0.0) return n == 0.0 ? 1.0 : 0.0;
    // negative base: only meaningful for integer exponents
    double ni = std::round(n);
    if (std::abs(n - ni) > 1e-9)
        throw std::invalid_argument("pow_log_space: negative base with non-integer exponent");
    double mag = std::exp(n * std::log(-base));
    bool odd = std::fmod(std::abs(ni), 2.0) > 0.5;
    return odd ? -mag : mag;
}

double diff_sqrt_hypot(double a, double b) {
    double h = std::hypot(a, b);
    if (a > 0.0) return -b * b / (a + h);
    return a - h;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    (void)m;
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f,
                            double a, double fa, double b, double fb,
                            double m, double fm, double whole, double tol,
                            int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, m, fm, lm, flm);
    double right = simpson(f, m, fm, b, fb, rm, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(f, a, fa, b, fb, m, fm);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

RootResult bisect_secant(const std::function<double(double)>& f,
                         double lo, double hi, double f_lo, double f_hi,
                         double xtol, int max_iter) {
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo > 0) == (f_hi > 0))
        throw std::invalid_argument("bisect_secant: endpoints do not bracket a root");
    RootResult res;
    for (int i = 0; i < max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++res.iterations;
        if (fm == 0.0 || hi - lo < xtol) {
            res.x = mid;
            res.f = fm;
            break;
        }
        if ((fm > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
        res.x = mid;
        res.f = fm;
    }
    // secant polish from the bracket endpoints
    double x0 = lo, x1 = hi, g0 = f_lo, g1 = f_hi;
    for (int i = 0; i < 4; ++i) {
        if (g1 == g0) break;
        double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if (!(x2 > lo && x2 < hi)) break;
        double g2 = f(x2);
        ++res.iterations;
        if (std::abs(g2) <= std::abs(res.f)) {
            res.x = x2;
            res.f = g2;
        }
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g2;
        if (g2 == 0.0) break;
    }
    return res;
}

double golden_max(const std::function<double(double)>& f,
                  double lo, double hi, double xtol, int max_iter) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

namespace {

NelderMeadResult nm_single(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x0,
                           const std::vector<double>& lo, const std::vector<double>& hi,
                           double ftol, int max_iter) {
    const std::size_t n = x0.size();
    auto clamp = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    };
    clamp(x0);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double span = hi[i] - lo[i];
        simplex[i + 1][i] += (span > 0 ? 0.05 * span : 0.05);
        clamp(simplex[i + 1]);
    }
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(simplex[i]);

    for (int it = 0; it < max_iter; ++it) {
        // sort descending (maximization)
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return val[a] > val[b]; });
        std::vector<std::vector<double>> sx;
        std::vector<double> sv;
        for (auto i : idx) {
            sx.push_back(simplex[i]);
            sv.push_back(val[i]);
        }
        simplex = sx;
        val = sv;
        if (std::isfinite(val[0]) && std::isfinite(val[n]) &&
            std::abs(val[0] - val[n]) < ftol * (std::abs(val[0]) + ftol))
            break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / double(n);

        auto combine = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            clamp(x);
            return x;
        };

        auto xr = combine(-1.0);
        double vr = eval(xr);
        if (vr > val[0]) {
            auto xe = combine(-2.0);
            double ve = eval(xe);
            if (ve > vr) {
                simplex[n] = xe;
                val[n] = ve;
            } else {
                simplex[n] = xr;
                val[n] = vr;
            }
        } else if (vr > val[n - 1]) {
            simplex[n] = xr;
            val[n] = vr;
        } else {
            auto xc = combine(0.5);
            double vc = eval(xc);
            if (vc > val[n]) {
                simplex[n] = xc;
                val[n] = vc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    clamp(simplex[i]);
                    val[i] = eval(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (val[i] > val[best]) best = i;
    return {simplex[best], val[best], evals};
}

} // namespace

NelderMeadResult nelder_mead_max(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0,
    const std::vector<double>& lo, const std::vector<double>& hi,
    int restarts, std::uint64_t seed, double ftol, int max_iter) {
    NelderMeadResult best = nm_single(f, x0, lo, hi, ftol, max_iter);
    std::mt19937_64 rng(seed);
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> x(x0.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::uniform_real_distribution<double> dist(lo[i], hi[i]);
            x[i] = dist(rng);
        }
        auto cand = nm_single(f, x, lo, hi, ftol, max_iter);
        best.evaluations += cand.evaluations;
        if (cand.value > best.value) {
            best.x = cand.x;
            best.value = cand.value;
        }
    }
    return best;
}

// --------------------------------------------------------------------- DP54

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

OdeResult integrate_dp54(const OdeRhs& rhs, std::vector<double> y0,
                         double t0, double t1, const OdeOptions& opt,
                         const OdeObserver& observer, const OdeEvent& event) {
    const std::size_t n = y0.size();
    std::vector<double> y = std::move(y0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), yerr(n);

    double t = t0;
    double dir = (t1 >= t0) ? 1.0 : -1.0;
    double span = std::abs(t1 - t0);
    if (span == 0.0) {
        if (observer) {
            rhs(t, y, k1);
            observer(t, y, k1);
        }
        return {false, 0.0, y};
    }

    rhs(t, y, k1);
    if (observer) observer(t, y, k1);
    double prev_event = event ? event(t, y) : 1.0;

    double h = opt.initial_step > 0 ? opt.initial_step : span / 100.0;
    if (opt.max_step > 0) h = std::min(h, opt.max_step);
    h *= dir;

    const int max_steps = 10'000'000;
    for (int step = 0; step < max_steps; ++step) {
        if ((t1 - t) * dir <= 1e-15 * span) break;
        if ((t + h - t1) * dir > 0.0) h = t1 - t;

        auto stage = [&](std::vector<double>& out, double frac,
                         std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = y[i];
                for (auto& [k, a] : terms) acc += h * a * (*k)[i];
                out[i] = acc;
            }
            (void)frac;
        };

        stage(ytmp, c2, {{&k1, a21}});
        rhs(t + c2 * h, ytmp, k2);
        stage(ytmp, c3, {{&k1, a31}, {&k2, a32}});
        rhs(t + c3 * h, ytmp, k3);
        stage(ytmp, c4, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
        rhs(t + c4 * h, ytmp, k4);
        stage(ytmp, c5, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
        rhs(t + c5 * h, ytmp, k5);
        stage(ytmp, 1.0, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / double(n));

        if (err <= 1.0) {
            double tnew = t + h;
            if (event) {
                double ev = event(tnew, ynew);
                if (prev_event > 0.0 && ev <= 0.0) {
                    // locate crossing on this step by bisection (re-integrating
                    // the small step is cheap and avoids dense-output code)
                    double lo = t, hi = tnew;
                    std::vector<double> ylo = y, yhi = ynew;
                    for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi));
                         ++it) {
                        double mid = 0.5 * (lo + hi);
                        OdeOptions sub = opt;
                        sub.initial_step = (mid - lo) / 4;
                        auto r = integrate_dp54(rhs, ylo, lo, mid, sub);
                        if (event(mid, r.y) <= 0.0) {
                            hi = mid;
                            yhi = r.y;
                        } else {
                            lo = mid;
                            ylo = r.y;
                        }
                    }
                    return {true, hi, yhi};
                }
                prev_event = ev;
            }
            t = tnew;
            y.swap(ynew);
            k1.swap(k7); // FSAL
            if (observer) observer(t, y, k1);
        }

        double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (opt.max_step > 0 && std::abs(h) > opt.max_step) h = opt.max_step * dir;
        if (err > 1.0 && std::abs(h) < 1e-14 * span)
            throw std::runtime_error("integrate_dp54: step size underflow");
    }
    return {false, 0.0, y};
}

} // namespace dks::numeric
