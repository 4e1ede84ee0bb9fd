#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsimnet {

/// Base class for every error thrown by this library.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated value invariant (norms, ranges, schemas).
class ValidationError : public SimError {
 public:
  using SimError::SimError;
};

/// Gate or measurement attempted on a qubit whose lost flag is set.
class QubitLostError : public SimError {
 public:
  using SimError::SimError;
};

/// Operation on an entangled pair that was already measured or reconciled.
class StaleEntanglementError : public SimError {
 public:
  using SimError::SimError;
};

/// Four-amplitude matrix that factors into a product of single-qubit states.
class NotEntangledError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Reconciliation rule broken, e.g. collapse onto an impossible outcome.
class ProtocolViolationError : public SimError {
 public:
  using SimError::SimError;
};

/// Controlled gate with a superposed control: the per-qubit storage model
/// cannot represent the entangling result.
class UnrepresentableOperationError : public SimError {
 public:
  using SimError::SimError;
};

/// Byte-level decode failure. Carries the byte offset of the failure when it
/// comes from the parser, or the offending field name on schema violations.
class DecodeError : public SimError {
 public:
  DecodeError(const std::string& what, std::size_t byte_offset)
      : SimError(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  DecodeError(const std::string& what, std::string field)
      : SimError(what + " (field '" + field + "')"), field_(std::move(field)) {}

  std::size_t byte_offset() const { return byte_offset_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t byte_offset_ = 0;
  std::string field_;
};

/// Frame-level failure: oversized length prefix or truncated stream.
class FramingError : public SimError {
 public:
  using SimError::SimError;
};

/// Socket or stream failure.
class TransportError : public SimError {
 public:
  using SimError::SimError;
};

/// ERROR envelope received from a peer; carries the machine-readable code.
class RemoteError : public SimError {
 public:
  RemoteError(std::string code, const std::string& message)
      : SimError("peer error [" + code + "]: " + message),
        code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace qsimnet
