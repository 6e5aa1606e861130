#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InterpolationNotSupported : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

class OracleUnavailable : public Error {
 public:
  using Error::Error;
};

class RateTableError : public Error {
 public:
  using Error::Error;
};

class DegenerateRates : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class FitUnreliable : public Error {
 public:
  using Error::Error;
};

class DegenerateSteadyState : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  using Error::Error;
};

class GeneratorSignError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// Raised when the eigenvalue branch near zero is not uniquely resolvable.
class BranchAmbiguity : public Error {
 public:
  BranchAmbiguity(const std::string& what, std::vector<std::complex<double>> candidates)
      : Error(what), candidates_(std::move(candidates)) {}
  const std::vector<std::complex<double>>& candidates() const { return candidates_; }

 private:
  std::vector<std::complex<double>> candidates_;
};

}  // namespace kinlab
