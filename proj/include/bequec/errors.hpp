#pragma once

#include <stdexcept>
#include <string>

namespace bequec {

/// Invalid model or algorithm parameter (non-positive concentration, eta out of range, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query plan violates the edge query principle or does not fit the data.
class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A stacked block pair has numerical rank below K.
class DegenerateBlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank deficiency or singularity detected in a factor.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric is undefined for the given inputs (zero-norm row, ...).
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file; message carries path and line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bequec

#include <functional>

namespace bequec {

/// Non-fatal diagnostics (near-singular anchors, renormalized input, ...).
/// The default handler writes "warning: <msg>" to stderr.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace bequec
