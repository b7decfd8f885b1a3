#pragma once

#include <stdexcept>
#include <string>

namespace mabench {

/// A precondition of an operation was violated by otherwise well-formed input.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Evaluation requested outside the domain where a quantity is defined.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Input data is malformed (non-finite samples, unreadable tables, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The measure charges a pluripolar set and cannot be solved in strict mode.
class PluripolarChargeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace mabench
