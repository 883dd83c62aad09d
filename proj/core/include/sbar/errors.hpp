// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_ERRORS_HPP
#define SBAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sbar {

// Base class for all library errors. Port indices in messages are 1-based.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class InvalidGeometryError : public Error {
  public:
    using Error::Error;
};

// A pilot batch does not match the schedule it claims to come from.
class ScheduleMismatchError : public Error {
  public:
    using Error::Error;
};

// Requested more measurements than ports (P*M > N).
class CapacityError : public Error {
  public:
    using Error::Error;
};

// Every port has already been measured.
class ExhaustedScheduleError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

class InvariantViolationError : public Error {
  public:
    using Error::Error;
};

// A linear system stayed singular after regularization. Carries an estimate
// of the condition number of the offending matrix.
class NumericalFailureError : public Error {
  public:
    NumericalFailureError(const std::string &msg, double condition_estimate)
        : Error(msg), condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

  private:
    double condition_estimate_;
};

// Configuration problem; carries the offending field path (e.g.
// "estimator[fas-omp].sparsity").
class ConfigError : public Error {
  public:
    ConfigError(const std::string &field, const std::string &msg)
        : Error(field + ": " + msg), field_(field) {}

    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

} // namespace sbar

#endif
