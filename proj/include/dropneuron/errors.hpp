#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dropneuron {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-conformable shapes or a zero dimension where one is not allowed.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside its documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A result that would contain NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A metric that is undefined for its input (e.g. NMSE of an all-zero target).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary input. Carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Training produced a non-finite cost.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t epoch)
      : Error("training diverged: non-finite cost at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Compaction would leave a layer without any neuron.
class DegenerateNetworkError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unreadable experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-system level failure (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dropneuron
