#pragma once

#include <stdexcept>
#include <string>

namespace maseg {

// Error taxonomy of the toolkit. Every failure mode a caller may want to
// distinguish gets its own type; all of them derive from std::runtime_error
// so the CLI can catch them uniformly.

struct FileMissingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HeaderParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SizeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ElementTypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompressedUnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValueOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabelRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optimization or PDE iteration produced a non-finite value.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyMaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace maseg
