#pragma once

#include <stdexcept>
#include <string>

namespace reuse {

// Base class for all library errors so callers can catch reuse::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A corpus record that cannot be parsed (bad JSON, missing id/text/authors/date).
class MalformedRecord : public Error {
 public:
  explicit MalformedRecord(const std::string& msg) : Error(msg) {}
};

// Insert of a document id that is already present (and replace was not requested).
class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate document id: " + id) {}
};

// Lookup of a document id the index does not contain.
class UnknownDoc : public Error {
 public:
  explicit UnknownDoc(const std::string& id) : Error("unknown document id: " + id) {}
};

// Lookup of an author key with no documents in the index.
class UnknownAuthor : public Error {
 public:
  explicit UnknownAuthor(const std::string& key) : Error("unknown author key: " + key) {}
};

// Index file written by an incompatible format version.
class VersionMismatch : public Error {
 public:
  explicit VersionMismatch(const std::string& msg) : Error(msg) {}
};

// Index file that is truncated or otherwise unreadable.
class CorruptFile : public Error {
 public:
  explicit CorruptFile(const std::string& msg) : Error(msg) {}
};

// Fractional reuse asked of a document with no (variant-filtered) hashes.
class EmptyFingerprint : public Error {
 public:
  explicit EmptyFingerprint(const std::string& id) : Error("empty fingerprint for document: " + id) {}
};

// Correlation input where one variable is entirely tied (rank correlation undefined).
class DegenerateInput : public Error {
 public:
  explicit DegenerateInput(const std::string& msg) : Error(msg) {}
};

// Too few points/bins to produce a meaningful statistic.
class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

// Caller violated a documented precondition of an operation.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Bad configuration value or unknown configuration key.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace reuse
