#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dmri {

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Shapes of two operands disagree, or a shape violates an operator's precondition.
struct DimensionError : Error
{
  using Error::Error;
};

struct ValidationError : Error
{
  using Error::Error;
};

struct InfeasibleRatioError : ValidationError
{
  using ValidationError::ValidationError;
};

struct EmptyInputError : ValidationError
{
  using ValidationError::ValidationError;
};

// Unknown preset / pattern / method name.
struct LookupError : ValidationError
{
  using ValidationError::ValidationError;
};

struct ConfigError : ValidationError
{
  ConfigError(std::string key, std::string const &what)
    : ValidationError(what)
    , key_{std::move(key)}
  {
  }
  std::string const &key() const { return key_; }

private:
  std::string key_;
};

enum struct FormatFault
{
  BadMagic,
  MalformedHeader,
  Truncated,
  TrailingBytes,
  BadValue
};

struct FormatError : Error
{
  FormatError(FormatFault fault, std::string const &what)
    : Error(what)
    , fault_{fault}
  {
  }
  FormatFault fault() const { return fault_; }

private:
  FormatFault fault_;
};

struct IoError : Error
{
  using Error::Error;
};

struct NumericalError : Error
{
  using Error::Error;
};

struct DivergenceError : NumericalError
{
  DivergenceError(std::size_t iteration, std::string const &what)
    : NumericalError(what)
    , iteration_{iteration}
  {
  }
  std::size_t iteration() const { return iteration_; }

private:
  std::size_t iteration_;
};

// An iteration observer threw; wraps the original message.
struct CallbackError : Error
{
  CallbackError(std::size_t iteration, std::string const &what)
    : Error(what)
    , iteration_{iteration}
  {
  }
  std::size_t iteration() const { return iteration_; }

private:
  std::size_t iteration_;
};

} // namespace dmri
