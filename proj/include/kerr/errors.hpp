// errors.hpp - exception hierarchy for the Kerr soliton library.
//
// Every failure raised by the library derives from kerr::Error so that the
// command-line front end can map it to an exit code in one place.

#pragma once

#include <stdexcept>
#include <string>

namespace kerr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside the admissible branch (e.g. X below the minimal value).
class DomainError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature did not reach its tolerance.
class SubdivisionLimit : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class GridTooSmall : public Error {
public:
    using Error::Error;
};

// No real normalization constant exists for the requested action quantum.
class Infeasible : public Error {
public:
    Infeasible(const std::string& what, double minimal_hbar)
        : Error(what), minimal_hbar_(minimal_hbar) {}
    double minimal_hbar() const noexcept { return minimal_hbar_; }

private:
    double minimal_hbar_;
};

class IntervalTooNarrow : public Error {
public:
    using Error::Error;
};

// Requested tensor storage exceeds the configured memory cap.
class CapacityExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace kerr
