#ifndef SPHTRANS_ERRORS_HPP
#define SPHTRANS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sphtrans {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input whose values violate a data constraint.
class DataError : public Error {
public:
    using Error::Error;
};

/// A neighborhood holds too few nodes for the requested basis.
class StencilError : public Error {
public:
    StencilError(std::size_t center, std::size_t count, std::size_t required)
        : Error("stencil deficiency at node " + std::to_string(center) + ": " +
                std::to_string(count) + " neighbors, need " + std::to_string(required)),
          center_(center), count_(count), required_(required) {}
    std::size_t center() const { return center_; }
    std::size_t count() const { return count_; }
    std::size_t required() const { return required_; }

private:
    std::size_t center_, count_, required_;
};

/// A local matrix is singular or its condition estimate exceeds the cap.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error(what + " (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

class FactorizationError : public Error {
public:
    FactorizationError(const std::string& what, std::size_t row)
        : Error(what + " at row " + std::to_string(row)), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// Invalid run configuration; `key()` names the offending setting.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config '" + key + "': " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace sphtrans

#endif  // SPHTRANS_ERRORS_HPP
