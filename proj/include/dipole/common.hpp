#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dipole {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

// Base class for every error raised by the library. The CLI maps these to
// exit codes; tests match on the concrete subclass.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DIPOLE_ERROR(Name)                 \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

DIPOLE_ERROR(InvalidArgument)
DIPOLE_ERROR(MismatchedGaussian)
DIPOLE_ERROR(ToleranceNotMet)
DIPOLE_ERROR(PoleAtBoundary)
DIPOLE_ERROR(InconsistentFinitePart)
DIPOLE_ERROR(PoleProximity)
DIPOLE_ERROR(DimensionMismatch)
DIPOLE_ERROR(NonDecaying)
DIPOLE_ERROR(OriginSingularity)
DIPOLE_ERROR(RegularizationNotConverged)
DIPOLE_ERROR(CoincidentPoints)
DIPOLE_ERROR(ParseError)

#undef DIPOLE_ERROR

enum class Channel { In, Loc, Out };
enum class Sign { Plus, Minus, None };

const char* to_string(Channel c);
const char* to_string(Sign s);
Channel parse_channel(const std::string& s);
Sign parse_sign(const std::string& s);

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : (s == Sign::Minus ? -1.0 : 0.0); }

}  // namespace dipole
