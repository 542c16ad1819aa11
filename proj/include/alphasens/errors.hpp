#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alphasens {

// Base class for all library errors so callers can catch the whole family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteError : Error {
    explicit NonFiniteError(const std::string& where)
        : Error("non-finite value encountered in " + where) {}
};

struct ConstantColumnError : Error {
    std::size_t column;
    explicit ConstantColumnError(std::size_t j)
        : Error("feature column " + std::to_string(j) + " has zero variance"), column(j) {}
};

struct DegenerateTargetError : Error {
    DegenerateTargetError() : Error("target has max == min, cannot rescale") {}
};

struct EmptyInputError : Error {
    explicit EmptyInputError(const std::string& where) : Error("empty input in " + where) {}
};

struct NegativeValueError : Error {
    explicit NegativeValueError(const std::string& where)
        : Error("negative value in " + where) {}
};

struct IndexOutOfRangeError : Error {
    explicit IndexOutOfRangeError(const std::string& what) : Error("index out of range: " + what) {}
};

struct NonPositiveScaleError : Error {
    NonPositiveScaleError() : Error("scale must be positive") {}
};

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& what)
        : Error("dimension mismatch: " + what) {}
};

struct DivergedTrainingError : Error {
    std::size_t epoch;
    explicit DivergedTrainingError(std::size_t e)
        : Error("training loss became non-finite at epoch " + std::to_string(e)), epoch(e) {}
};

struct SchemaError : Error {
    std::string path;
    explicit SchemaError(const std::string& field_path, const std::string& detail)
        : Error("schema error at '" + field_path + "': " + detail), path(field_path) {}
};

struct SingularPointError : Error {
    std::size_t sample;
    std::size_t variable;
    SingularPointError(std::size_t i, std::size_t j)
        : Error("derivative is singular at sample " + std::to_string(i) + ", variable " +
                std::to_string(j)),
          sample(i), variable(j) {}
};

struct TooLargeError : Error {
    std::size_t n;
    explicit TooLargeError(std::size_t n_, std::size_t limit)
        : Error("instance size " + std::to_string(n_) + " exceeds oracle tractability bound " +
                std::to_string(limit)),
          n(n_) {}
};

struct MissingTargetError : Error {
    MissingTargetError() : Error("dataset has no target column") {}
};

struct GridMismatchError : Error {
    GridMismatchError() : Error("curves do not share a common alpha grid") {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace alphasens
