#pragma once

#include <stdexcept>
#include <string>

namespace ecrg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

struct SingularMatrix : Error {
    using Error::Error;
};

struct IntegrityFailure : Error {
    using Error::Error;
};

struct InsufficientHelpers : Error {
    using Error::Error;
};

struct RegenerationFailure : Error {
    using Error::Error;
};

struct MalformedShard : Error {
    using Error::Error;
};

}  // namespace ecrg
