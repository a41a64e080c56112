// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace volsre {

/// Base class for all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (inadmissible parameter, state below the restricted state space, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// No feasible (invertible) parameter was found, or a configuration fails a
/// stationarity / moment diagnostic.
class InfeasibleError : public Error
{
  public:
    using Error::Error;
};

/// Malformed input data or configuration.
class InputError : public Error
{
  public:
    using Error::Error;
};

}  // namespace volsre
