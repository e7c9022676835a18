#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace wibp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. Each class names the failure category; messages carry the
// detail and are surfaced verbatim by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The membership oracle contradicted a certified property of the body
/// (interior ball, outer radius, or the convexity of a section).
class OracleIntegrityError : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil left the admissible domain.
class MarginError : public Error {
 public:
  using Error::Error;
};

/// The requested graph is infinite for this body/direction.
class CaseError : public Error {
 public:
  using Error::Error;
};

/// The direction carries too much vertical boundary mass.
class DirectionError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be positive (a gradient-formula denominator) is
/// numerically zero.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class MassError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

inline void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace wibp
