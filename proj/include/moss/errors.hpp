#pragma once

#include <stdexcept>
#include <string>

namespace moss {

/// Raised when a textual input (poset, functor, formula, model, sequent,
/// proof) cannot be parsed.  CLI maps it to exit code 2.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when inputs are well-formed but ill-typed or violate a stated
/// precondition (mismatched carriers, non-monotone tables, unknown names).
/// CLI maps it to exit code 3.
class TypeError : public std::runtime_error {
public:
  explicit TypeError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an enumeration would exceed an explicit capacity bound.
/// Callers that sample (tests, sweeps) may catch it and skip; the CLI maps
/// it to exit code 3 with a diagnostic.
class CapacityError : public std::runtime_error {
public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal invariant violation (e.g. the proof-search measure failed to
/// decrease).  Never expected to fire; not caught anywhere.
class InvariantError : public std::logic_error {
public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

} // namespace moss
