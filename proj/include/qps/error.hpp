#pragma once

#include <stdexcept>
#include <string>

namespace qps {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unparsable input (bad file, bad number, bad CSV line).
class InputError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that breaks the marginal schema: missing entries,
/// probabilities outside [0,1], inconsistent sizes.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Instance for which the requested quantity does not exist
/// (all-zero lambda, deterministic conditioning variable).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Variable count outside the supported range.
class SizeError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Iterative kernel did not converge within its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace qps
