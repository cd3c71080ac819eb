#pragma once

#include <stdexcept>
#include <string>

namespace hgctr {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad shape, invalid relation, ...).
struct ContractError : Error {
  using Error::Error;
};

// Non-finite value produced or consumed where a finite one is required.
struct NumericError : Error {
  using Error::Error;
};

// Invalid or infeasible configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (files, records, ids).
struct DataError : Error {
  using Error::Error;
};

// Metric is undefined for the given inputs (e.g. single-class AUC).
struct MetricError : Error {
  using Error::Error;
};

}  // namespace hgctr
