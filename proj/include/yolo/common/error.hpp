#ifndef YOLO_COMMON_ERROR_HPP_
#define YOLO_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace yolo {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (wrong vector length, bad index).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InterpretationError : public Error {
 public:
  using Error::Error;
};

class PlannerProtocolError : public Error {
 public:
  using Error::Error;
};

class PlannerTimeout : public PlannerProtocolError {
 public:
  using PlannerProtocolError::PlannerProtocolError;
};

// Well-formed response carrying a label outside the assignment set.
class InvalidAssignmentLabel : public PlannerProtocolError {
 public:
  using PlannerProtocolError::PlannerProtocolError;
};

class OptimizerError : public Error {
 public:
  using Error::Error;
};

class TrainingAborted : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class OfflineError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

}  // namespace yolo

#endif  // YOLO_COMMON_ERROR_HPP_
