#ifndef IRFORGE_ERRORS_HPP
#define IRFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace irforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };
struct OutOfFrame : Error { using Error::Error; };
struct InvalidCalibration : Error { using Error::Error; };
struct ZeroClutter : Error { using Error::Error; };
struct ZeroContrast : Error { using Error::Error; };
struct EmptyTarget : Error { using Error::Error; };
struct VisibilityNotSubset : Error { using Error::Error; };
struct LayoutInconsistent : Error { using Error::Error; };
struct MissingRegionLambda : Error { using Error::Error; };
struct SamplerStuck : Error { using Error::Error; };
struct InfeasibleK : Error { using Error::Error; };
struct DegenerateTarget : Error { using Error::Error; };
struct Unachievable : Error { using Error::Error; };
struct TargetTooLarge : Error { using Error::Error; };
struct EmptySweep : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct AssetError : Error { using Error::Error; };

} // namespace irforge

#endif
