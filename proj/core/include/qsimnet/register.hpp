#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qsimnet/linalg.hpp"
#include "qsimnet/random.hpp"

namespace qsimnet {

/// One stored qubit. When lost is set (amplitude damping took the decay
/// branch) the state is ignored by all consumers.
struct Qubit {
  AmplitudePair state;
  bool lost = false;
};

/// Ordered collection of independent qubits. All gate and measurement
/// operations are brokered through this class; qubits are never operated on
/// directly. A register is a single-owner mutable entity: no concurrent
/// mutation, transfer it whole between execution contexts.
class QuantumRegister {
 public:
  QuantumRegister() = default;
  explicit QuantumRegister(std::uint64_t id, std::size_t size = 0)
      : id_(id), qubits_(size) {}

  std::uint64_t id() const { return id_; }
  void set_id(std::uint64_t id) { id_ = id; }

  std::size_t size() const { return qubits_.size(); }
  bool empty() const { return qubits_.empty(); }

  const Qubit& at(std::size_t pos) const;
  Qubit& at(std::size_t pos);
  void append(Qubit q) { qubits_.push_back(q); }

  /// Applies g to the qubit at pos. Throws ValidationError on an
  /// out-of-range position and QubitLostError on a lost qubit.
  void apply_gate(const Mat2& g, std::size_t pos);

  /// Conditional single-qubit gate. Supported only while the control is in a
  /// computational basis state within kStateTol (the per-qubit storage model
  /// cannot hold the entangled result of a superposed control); otherwise
  /// throws UnrepresentableOperationError.
  void apply_controlled(const Mat2& g, std::size_t control, std::size_t target);

  /// Measures in the computational basis: returns 0 iff the next rng draw is
  /// below |alpha|^2, and collapses the stored state to (1,0) or (0,1).
  /// Measuring a lost qubit has no defined outcome and throws
  /// QubitLostError; callers decide policy.
  int measure(std::size_t pos, RandomSource& rng);

  /// Measurement in basis theta: rotate by -theta, measure, then store the
  /// collapsed basis eigenstate rotated back into the computational frame so
  /// repeated same-basis measurements stay consistent. theta = 0 reduces
  /// exactly to measure().
  int measure_in_basis(std::size_t pos, double theta, RandomSource& rng);

 private:
  void check_pos(std::size_t pos) const;

  std::uint64_t id_ = 0;
  std::vector<Qubit> qubits_;
};

/// Byte serialization of a register (length-unframed JSON; the schema is the
/// qubits section of the wire-protocol register transfer payload).
/// deserialize_register(serialize(r)) is bit-identical to r, including lost
/// flags. Malformed bytes raise DecodeError carrying the byte offset;
/// schema violations carry the field name.
std::vector<std::uint8_t> serialize(const QuantumRegister& reg);
QuantumRegister deserialize_register(std::span<const std::uint8_t> bytes);

}  // namespace qsimnet
