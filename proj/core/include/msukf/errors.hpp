#pragma once

#include <stdexcept>
#include <string>

namespace msukf {

/// Base class for every error raised by the estimation library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// A Cholesky pivot was <= 0, or a covariance lost positive definiteness.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonPositiveLambda : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance S could not be factored.
class SingularInnovation : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class AllRunsFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace msukf
