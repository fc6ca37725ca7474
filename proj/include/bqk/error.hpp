#pragma once

#include <stdexcept>
#include <string>

namespace bqk {

// Malformed or unusable input (bad file, unknown catalogue name, bad
// parameters). Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A structural invariant does not hold (non-integral flux, connection too
// strong for the mesh, wrong topology for a constructor). Exit code 3.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative eigensolver gave up. Exit code 4.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::string diagnostics_json)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics_json)) {}
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace bqk
