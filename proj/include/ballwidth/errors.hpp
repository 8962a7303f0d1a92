#pragma once

#include <stdexcept>
#include <string>

#include "ballwidth/bigint.hpp"

namespace ballwidth {

/// An instance needs more elements than the configured budget allows.
class budget_exceeded : public std::runtime_error {
public:
    budget_exceeded(const std::string& what, BigInt required, BigInt budget)
        : std::runtime_error(what + ": requires " + required.str() + " elements, budget is " + budget.str()),
          required_(std::move(required)),
          budget_(std::move(budget))
    {
    }

    const BigInt& required() const noexcept { return required_; }
    const BigInt& budget() const noexcept { return budget_; }

private:
    BigInt required_;
    BigInt budget_;
};

/// Malformed external input (custom poset documents, certificates).
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A custom poset whose relations contain a cycle.
class malformed_order : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quotient digraph in which some edge does not raise height by exactly one.
class not_graded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A chain profile with a step that is not a cover step of the family.
class profile_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two independently computed quantities disagree. Always a bug.
class consistency_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ballwidth

namespace ballwidth {

/// An output or persistence path cannot be written or read.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ballwidth
