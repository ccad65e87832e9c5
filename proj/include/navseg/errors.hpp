#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace navseg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (overlapping roots, empty
/// blocks, mismatched element sets, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Input bytes could not be decoded under the selected encoding.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("decode error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A persisted document (model, labels, manifest) does not match its schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& field_path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Corpus content disagrees with the parsed pages.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Classifier training cannot proceed (e.g. only one class present).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace navseg
