#include "dks/scan.hpp"

#include "dks/errors.hpp"
#include "dks/numeric.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dks::scan {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

std::vector<double> GridResult::point(std::size_t i) const {
    std::vector<double> p(axes.size());
    std::size_t rest = i;
    for (std::size_t a = axes.size(); a-- > 0;) {
        p[a] = axes[a].values[rest % axes[a].values.size()];
        rest /= axes[a].values.size();
    }
    return p;
}

GridResult grid(const std::vector<Axis>& axes, const PointEval& eval, int threads) {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("grid: 1 or 2 axes supported");
    for (const auto& a : axes)
        if (a.values.empty())
            throw std::invalid_argument("grid: axis '" + a.name + "' has no values");

    GridResult res;
    res.axes = axes;
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    res.value.assign(total, std::numeric_limits<double>::quiet_NaN());
    res.error.assign(total, std::string());

    auto work_one = [&](std::size_t i) {
        try {
            res.value[i] = eval(res.point(i));
        } catch (const std::exception& e) {
            res.error[i] = e.what();
        }
    };

    int nthreads = std::max(1, threads);
    if (nthreads == 1 || total < 2) {
        for (std::size_t i = 0; i < total; ++i) work_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                    work_one(i);
            });
        for (auto& th : pool) th.join();
    }
    return res;
}

MaxResult maximize(const PointEval& eval, const std::vector<double>& x0,
                   const std::vector<double>& lo, const std::vector<double>& hi,
                   std::uint64_t seed) {
    if (x0.size() != lo.size() || lo.size() != hi.size())
        throw std::invalid_argument("maximize: dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || hi[i] < lo[i])
            throw std::invalid_argument("maximize: bounds must be finite with hi >= lo");

    bool degenerate = true;
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (hi[i] > lo[i]) degenerate = false;
    if (degenerate) {
        double v = eval(lo);
        if (!std::isfinite(v)) throw OptimizationError("maximize: evaluation failed");
        return {lo, v};
    }

    std::atomic<bool> any_ok{false};
    auto safe = [&](const std::vector<double>& x) -> double {
        try {
            double v = eval(x);
            if (std::isfinite(v)) any_ok = true;
            return v;
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    auto r = numeric::nelder_mead_max(safe, x0, lo, hi, /*restarts=*/3, seed);
    if (!any_ok || !std::isfinite(r.value))
        throw OptimizationError("maximize: all evaluations failed");
    return {r.x, r.value};
}

} // namespace dks::scan
