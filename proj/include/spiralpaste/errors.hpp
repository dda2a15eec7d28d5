#pragma once

#include <stdexcept>
#include <string>

namespace spiralpaste {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The supplied distances do not form a metric.
class InvalidMetric : public Error {
 public:
  using Error::Error;
};

/// An input document failed to parse against its schema. `field()` names the
/// offending member.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DegenerateTriple : public Error {
 public:
  using Error::Error;
};

/// A radius of the schedule would leave the double range.
class ScheduleOverflow : public Error {
 public:
  using Error::Error;
};

/// Some point lies beyond the last odd radius of the schedule.
class ScheduleTooShort : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class CoverageViolated : public Error {
 public:
  using Error::Error;
};

class NotARay : public Error {
 public:
  using Error::Error;
};

class ModelInvalid : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class NetTooCoarse : public Error {
 public:
  using Error::Error;
};

}  // namespace spiralpaste
