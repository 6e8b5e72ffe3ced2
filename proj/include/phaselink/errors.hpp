#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaselink {

/// Phase estimation received correlators carrying no usable signal
/// (coherence destroyed, wrong configuration, or an active attack).
class NoSignalError : public std::runtime_error {
 public:
  explicit NoSignalError(const std::string& what) : std::runtime_error(what) {}
};

/// Every pair of a measurement batch was discarded (e.g. zero detector
/// efficiency), leaving no samples to form correlators from.
class EmptyBatchError : public std::runtime_error {
 public:
  explicit EmptyBatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid scenario/session configuration. Messages always name the
/// offending field so the CLI can emit a usable diagnostic.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed persisted file. Carries the byte offset and the field being
/// parsed when the error was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset, std::string field)
      : std::runtime_error(what + " (byte " + std::to_string(byte_offset) +
                           ", field '" + field + "')"),
        byte_offset_(byte_offset),
        field_(std::move(field)) {}

  std::size_t byte_offset() const { return byte_offset_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t byte_offset_;
  std::string field_;
};

}  // namespace phaselink
