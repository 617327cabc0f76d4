#ifndef WGF_ERRORS_HPP
#define WGF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wgf {

/// Base class for all solver errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Positions are not non-decreasing.
class NonMonotoneError : public Error { using Error::Error; };

/// A position lies outside the closed domain interval.
class OutOfDomainError : public Error { using Error::Error; };

/// A NaN or infinity where a finite value is required.
class NonFiniteError : public Error { using Error::Error; };

/// Supplied density does not integrate to one.
class MassNotOneError : public Error { using Error::Error; };

/// Supplied density takes negative values.
class NegativeDensityError : public Error { using Error::Error; };

/// Two adjacent quantile positions coincide where a cell width is needed.
class ZeroGapError : public Error { using Error::Error; };

/// Operands live on different grid sizes.
class GridMismatchError : public Error { using Error::Error; };

/// Operation requires a measure with a density but the measure has atoms.
class SingularMeasureError : public Error { using Error::Error; };

/// Interaction kernel failed the symmetry audit.
class AsymmetricKernelError : public Error { using Error::Error; };

/// Time step at or above the admissible threshold.
class TauAboveThresholdError : public Error { using Error::Error; };

/// Step or state index outside the trajectory.
class IndexOutOfRangeError : public Error { using Error::Error; };

/// Ill-posed input to a fit or reduction (empty, non-positive, wrong order).
class DegenerateInputError : public Error { using Error::Error; };

/// Non-positive time where a positive one is required.
class NonpositiveTimeError : public Error { using Error::Error; };

/// Config file failed validation.
class ConfigError : public Error { using Error::Error; };

} // namespace wgf

#endif
