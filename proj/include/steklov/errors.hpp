#pragma once

#include <stdexcept>
#include <string>

namespace steklov {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Degenerate element or edge (zero area, zero length).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Mesh topology or nesting violated (non-conforming mesh, unknown ids, non-nested prolongation).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// The uniform generator only handles axis-aligned rectilinear polygons.
class UnsupportedDomainError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class NotSpdError : public Error {
public:
  using Error::Error;
};

/// K - sigma*M stayed singular after the perturbation retries.
class ShiftSingularError : public Error {
public:
  using Error::Error;
};

/// The right-hand side M*start vanishes, so the iterate has zero energy norm.
class DegenerateStartError : public Error {
public:
  using Error::Error;
};

/// u^T M u = 0: the Rayleigh quotient is undefined.
class BoundaryNullError : public Error {
public:
  using Error::Error;
};

class StagnationError : public Error {
public:
  using Error::Error;
};

} // namespace steklov
