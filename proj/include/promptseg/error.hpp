#pragma once

#include <stdexcept>
#include <string>

namespace promptseg {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Two rasters that must share a shape do not.
class DimensionMismatch : public Error {
  public:
    DimensionMismatch(std::string const& what_a, int wa, int ha, std::string const& what_b, int wb, int hb);
};

class DatasetError : public Error {
  public:
    using Error::Error;
};

/// Transport failure, protocol violation, or an ERROR reply from a model server.
class BackendError : public Error {
  public:
    using Error::Error;
};

} // namespace promptseg
