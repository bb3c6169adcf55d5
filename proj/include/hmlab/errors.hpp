#pragma once

#include <stdexcept>
#include <string>

namespace hmlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad call arguments (non-positive radius, point off the boundary, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Weight evaluated on the boundary itself.
class SingularPointError : public Error {
public:
    using Error::Error;
};

// Boundary sampling too coarse for the requested scale.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Harnack chain search exhausted its budget.
class GeometryResolutionError : public Error {
public:
    using Error::Error;
};

// Query point outside the lattice footprint.
class DomainError : public Error {
public:
    using Error::Error;
};

// eta / K too coarse for the corkscrew to land in a W_Q^0 box.
class ParameterError : public Error {
public:
    using Error::Error;
};

class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

// Operator field fails symmetry or ellipticity.
class ValidationError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

}  // namespace hmlab
