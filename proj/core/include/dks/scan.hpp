#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dks::scan {

/// One scan dimension: a parameter key and a monotone value grid.
struct Axis {
    std::string name;
    std::vector<double> values;
};

std::vector<double> linspace(double lo, double hi, int n);

/// Flattened (row-major over axes) grid evaluation result. Failed points
/// carry NaN and an error tag instead of aborting the scan.
struct GridResult {
    std::vector<Axis> axes;
    std::vector<double> value;
    std::vector<std::string> error; // empty string = ok

    std::size_t size() const { return value.size(); }
    /// Axis values of flattened point i.
    std::vector<double> point(std::size_t i) const;
};

using PointEval = std::function<double(const std::vector<double>&)>;

/// Cartesian-product evaluation of eval over 1 or 2 axes; data-parallel over
/// `threads` workers, results gathered in input order (chunking cannot change
/// any per-point arithmetic).
GridResult grid(const std::vector<Axis>& axes, const PointEval& eval, int threads = 1);

struct MaxResult {
    std::vector<double> x;
    double value = 0.0;
};

/// Derivative-free maximization of eval inside [lo, hi] boxes: Nelder-Mead
/// started from x0 plus 3 seeded random restarts. Throws OptimizationError
/// if every evaluation failed.
MaxResult maximize(const PointEval& eval, const std::vector<double>& x0,
                   const std::vector<double>& lo, const std::vector<double>& hi,
                   std::uint64_t seed = 0);

} // namespace dks::scan
