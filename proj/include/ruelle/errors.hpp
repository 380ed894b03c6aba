#pragma once

#include <stdexcept>
#include <string>

namespace ruelle {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInput : Error {
    using Error::Error;
};
struct UnknownFilter : Error {
    using Error::Error;
};
struct InvalidParam : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct ScaleMismatch : Error {
    using Error::Error;
};
struct WindowTooSmall : Error {
    using Error::Error;
};
struct NegativeWeight : Error {
    using Error::Error;
};
struct OrbitEscape : Error {
    using Error::Error;
};
struct EigenvalueMismatch : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};
struct NotAFixedPoint : Error {
    using Error::Error;
};
struct NotCycleConstant : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct UnknownFunction : Error {
    using Error::Error;
};

}  // namespace ruelle
