#pragma once

#include <stdexcept>
#include <string>

namespace fnls {

// Precondition / wrong-usage failures (wrong field space, unsorted traces, ...).
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& msg) : std::logic_error(msg) {}
};

// Invalid parameter values (negative operator order, s outside (0,1), ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values produced or encountered during computation.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg, double when = 0.0)
        : std::runtime_error(msg), t(when) {}
    double t;  // simulation time at failure, when applicable
};

// Iterative solver did not converge.
class iteration_error : public std::runtime_error {
public:
    iteration_error(const std::string& msg, double last_residual_, int iters_)
        : std::runtime_error(msg), last_residual(last_residual_), iterations(iters_) {}
    double last_residual;
    int iterations;
};

// A required cached object (e.g. ground state) is missing.
class missing_prerequisite_error : public std::runtime_error {
public:
    explicit missing_prerequisite_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested construction cannot be represented on the given grid.
class resolution_error : public std::runtime_error {
public:
    explicit resolution_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Construction parameter sits exactly on a singularity (e.g. t0 = 0 profile).
class singularity_error : public std::invalid_argument {
public:
    explicit singularity_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Analysis requested on data it does not apply to (e.g. no blow-up in trace).
class not_applicable_error : public std::runtime_error {
public:
    explicit not_applicable_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A fit failed to localize its optimum.
class inconclusive_error : public std::runtime_error {
public:
    explicit inconclusive_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fnls
