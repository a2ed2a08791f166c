#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace moreau {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Syntax error in a function expression. `offset` is the byte offset of the
/// offending token; `expected` lists the tokens that would have been accepted.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& found);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Variable index outside x1..xn.
class ArityError : public Error {
 public:
  ArityError(std::size_t offset, std::size_t index, std::size_t dim);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// lambda is at or above the prox-boundedness threshold lambda_phi.
class ThresholdExceeded : public Error {
 public:
  ThresholdExceeded(double lambda, double threshold, const std::string& which);
  double lambda() const { return lambda_; }
  double threshold() const { return threshold_; }

 private:
  double lambda_;
  double threshold_;
};

class NoFeasiblePoint : public Error {
 public:
  using Error::Error;
};

class InvalidLambda : public Error {
 public:
  using Error::Error;
};

class MultivaluedProx : public Error {
 public:
  MultivaluedProx(std::size_t clusters);
  std::size_t clusters() const { return clusters_; }

 private:
  std::size_t clusters_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InfiniteAtCenter : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// An evaluator produced NaN or -infinity.
class InvalidValue : public Error {
 public:
  using Error::Error;
};

/// A prox-bound certificate failed sampled validation.
class CertificateViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace moreau
