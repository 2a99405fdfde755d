#pragma once

#include <stdexcept>
#include <string>

namespace qfn {

// Base of every failure raised by the library. Each subclass corresponds to
// one named failure mode of an operation, so callers (and the CLI exit-code
// mapping) can dispatch on type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteEntry : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

// (sI - A) is singular at the requested Laplace point.
class SingularAtS : public Error {
public:
    using Error::Error;
};

class NotCommuting : public Error {
public:
    using Error::Error;
};

class ZeroModeAmbiguity : public Error {
public:
    using Error::Error;
};

// (eta - S_ii) is singular: the instantaneous feedback cannot be eliminated.
class AlgebraicLoop : public Error {
public:
    using Error::Error;
};

class BadPartition : public Error {
public:
    using Error::Error;
};

// Argument lies outside the domain of the Moebius transform.
class OutsideDomain : public Error {
public:
    using Error::Error;
};

// -1 is an eigenvalue of S, so no finite Stratonovich generator exists.
class CayleySingular : public Error {
public:
    using Error::Error;
};

}  // namespace qfn
