#pragma once

#include <stdexcept>
#include <string>

namespace swmode {

/// Requested frequency supports no guided modes; the forward model is undefined.
struct NoGuidedModes : std::runtime_error {
  explicit NoGuidedModes(const std::string& what) : std::runtime_error(what) {}
};

/// A bracketed root failed to polish to the requested residual.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// An adaptive quadrature did not reach its relative tolerance.
struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Step-size underflow or non-convergence in a moment-system integrator.
struct IntegratorFailure : std::runtime_error {
  explicit IntegratorFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Euler-Maruyama step violates the stability precondition.
struct StepTooLarge : std::invalid_argument {
  explicit StepTooLarge(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested lag leaves no overlap between the shifted apertures.
struct EmptyAperture : std::invalid_argument {
  explicit EmptyAperture(const std::string& what) : std::invalid_argument(what) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// Every frequency of an inverse problem failed in the forward model.
struct ForwardModelFailure : std::runtime_error {
  explicit ForwardModelFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Coupling matrix is reducible; the perturbation expansion is not defined.
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or malformed run configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace swmode
