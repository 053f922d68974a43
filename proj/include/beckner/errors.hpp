#pragma once

#include <stdexcept>
#include <string>

namespace beckner {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or evaluation point lies outside the domain of the object.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters violate the preconditions of an operation.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// An adaptive procedure exhausted its evaluation budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A regression was requested on data indistinguishable from noise.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// A stochastic check could not reach a verdict (e.g. too many non-absorbed paths).
class Inconclusive : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// A Phi function fails n-admissibility on the range it is applied to.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnknownCheck : public Error {
 public:
  using Error::Error;
};

}  // namespace beckner
