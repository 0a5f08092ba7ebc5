#pragma once

#include <stdexcept>
#include <string>

namespace capkit {

// Failure taxonomy. Each class corresponds to one kind of contract breach so
// callers (and the CLI) can map failures to exit codes without string matching.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// h (or q) outside the supported table range
struct unsupported_field_error : error { using error::error; };
// inverse of zero
struct division_by_zero_error : error { using error::error; };
// geometry larger than the supported desk-scale envelope
struct capacity_error : error { using error::error; };
// line through two equal points
struct degenerate_line_error : error { using error::error; };
// operation needs a different ambient dimension
struct dimension_error : error { using error::error; };
// argument violates an operation precondition (bad set, wrong size, ...)
struct precondition_error : error { using error::error; };
// argument outside the range where the operation is guaranteed to work
struct range_error : error { using error::error; };
// a step that must be forced admitted more than one outcome
struct uniqueness_error : error { using error::error; };
// check invoked on an object that does not satisfy its hypothesis
struct hypothesis_error : error { using error::error; };
// internal cross-check failed; indicates a bug, never user input
struct consistency_error : error { using error::error; };
// value outside the mathematical domain (q not an even prime power, ...)
struct domain_error : error { using error::error; };
// malformed CLI/config input
struct usage_error : error { using error::error; };

}  // namespace capkit
