#pragma once

#include <stdexcept>
#include <string>

namespace floodroute {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad index, empty seed set, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Two rasters that must share a frame do not.
class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace floodroute
