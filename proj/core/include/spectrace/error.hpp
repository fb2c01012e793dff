#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spectrace {

/// Base class for all library errors. Carries a short pipeline-stage tag so a
/// driver can attribute a failure ("stage <tag>: <message>") without parsing
/// the message text.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Caller-supplied argument violates a documented precondition.
class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error("argument", what) {}
};

/// Metric coefficients fail the Riemannian condition (A > 0, AC - B^2 > 0) at
/// a sampled point, or a construction parameter makes the metric degenerate.
class DegenerateMetricError : public Error {
public:
    explicit DegenerateMetricError(const std::string& what) : Error("metric", what) {}
};

/// An evaluation was requested too close to a coordinate singularity of the
/// active chart.
class PoleProximityError : public Error {
public:
    explicit PoleProximityError(const std::string& what) : Error("pole", what) {}
};

/// Order-doubling refinement of a surface integral stopped converging before
/// reaching the requested error estimate.
class QuadratureFailureError : public Error {
public:
    explicit QuadratureFailureError(const std::string& what) : Error("quadrature", what) {}
};

/// The adaptive ODE integrator underflowed its step size (stiffness or a
/// singularity on the traversed region). The message names the state reached.
class StiffnessError : public Error {
public:
    explicit StiffnessError(const std::string& what) : Error("ode", what) {}
};

/// A theta/Abel evaluation was requested at a t too small for the available
/// spectrum depth; min_usable_t() reports the smallest certified t.
class TailBoundError : public Error {
public:
    TailBoundError(const std::string& what, double min_usable_t)
        : Error("theta", what), min_usable_t_(min_usable_t) {}
    double min_usable_t() const noexcept { return min_usable_t_; }

private:
    double min_usable_t_;
};

/// A cluster below the reliability cap does not contain exactly 2k+1
/// eigenvalues; k() names the offending cluster.
class ClusterIntegrityError : public Error {
public:
    ClusterIntegrityError(const std::string& what, int k)
        : Error("clusters", what), k_(k) {}
    int k() const noexcept { return k_; }

private:
    int k_;
};

/// Least-squares design matrix is rank deficient, or a mandatory fit residual
/// threshold was exceeded.
class FitDegenerateError : public Error {
public:
    explicit FitDegenerateError(const std::string& what) : Error("fit", what) {}
};

/// A discrete operator lost symmetry or another solver-level consistency
/// check failed.
class DiscretizationError : public Error {
public:
    explicit DiscretizationError(const std::string& what) : Error("spectra", what) {}
};

/// The two independent evaluations of the great-circle kernel double integral
/// disagree beyond tolerance.
class KernelEvaluationError : public Error {
public:
    explicit KernelEvaluationError(const std::string& what) : Error("kernel", what) {}
};

/// Geodesic closure was required (length-2pi periodicity) but the residual
/// exceeded the certification threshold.
class ClosureError : public Error {
public:
    explicit ClosureError(const std::string& what) : Error("closure", what) {}
};

/// Experiment configuration failed strict parsing/validation.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Spectrum cache file is unreadable or inconsistent with its header.
class CacheError : public Error {
public:
    explicit CacheError(const std::string& what) : Error("cache", what) {}
};

} // namespace spectrace
