#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvlab {

/// Base of every error raised by the library.
class CurvlabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field value is NaN or infinite.
class NonFiniteError : public CurvlabError {
 public:
  NonFiniteError(const std::string& what, std::size_t node)
      : CurvlabError(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Metric is singular, indefinite or badly conditioned at some node.
class DegenerateMetricError : public CurvlabError {
 public:
  DegenerateMetricError(const std::string& what, std::size_t node)
      : CurvlabError(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Grid or stencil configuration cannot support the requested operation.
class ConfigurationError : public CurvlabError {
 public:
  using CurvlabError::CurvlabError;
};

/// An operation's stated precondition does not hold.
class PreconditionError : public CurvlabError {
 public:
  using CurvlabError::CurvlabError;
};

/// Dimension mismatch, e.g. a three-dimensional routine given a 4D metric.
class DimensionError : public CurvlabError {
 public:
  using CurvlabError::CurvlabError;
};

/// Argument outside the mathematical domain of a formula (e.g. n <= 4).
class DomainError : public CurvlabError {
 public:
  using CurvlabError::CurvlabError;
};

/// Malformed file or stream contents.
class FormatError : public CurvlabError {
 public:
  using CurvlabError::CurvlabError;
};

}  // namespace curvlab
