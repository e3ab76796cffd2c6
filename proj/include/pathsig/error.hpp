#pragma once

#include <stdexcept>
#include <string>

namespace pathsig {

// Operand shapes disagree (alphabet size, depth, vector lengths).
class incompatible_operands : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input violates a documented precondition of a computation.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A statistic is mathematically undefined for the given data
// (constant vectors, single-class labels, ...).
class undefined_statistic : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or unreadable on-disk data.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pathsig
