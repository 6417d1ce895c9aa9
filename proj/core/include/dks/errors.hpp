#pragma once

#include <stdexcept>
#include <string>

namespace dks {

/// Base class for all library errors that are not plain invalid arguments.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad key, bad value or malformed line in a run configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A request exceeded the exact-engine size cap.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(what) {}
};

/// A scaling factor crossed zero during integration (over-focused cloud).
class FocusSingularityError : public Error {
public:
    FocusSingularityError(double t_cross, int axis)
        : Error("scaling factor crossed zero on axis " + std::to_string(axis) +
                " at t = " + std::to_string(t_cross) + " s"),
          time(t_cross), axis_index(axis) {}
    double time;
    int axis_index;
};

/// A tuner could not bracket its target.
class NoRootError : public Error {
public:
    explicit NoRootError(const std::string& what) : Error(what) {}
};

/// Error propagation with a vanishing signal slope.
class DivergentSensitivityError : public Error {
public:
    explicit DivergentSensitivityError(const std::string& what) : Error(what) {}
};

/// A closed-form gain evaluator was called outside its branch.
class BranchMismatchError : public Error {
public:
    explicit BranchMismatchError(const std::string& what) : Error(what) {}
};

/// Derivative-free search failed at every probed point.
class OptimizationError : public Error {
public:
    explicit OptimizationError(const std::string& what) : Error(what) {}
};

} // namespace dks
