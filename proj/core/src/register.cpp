#include "qsimnet/register.hpp"

#include <cmath>
#include <string>

#include "json_util.hpp"

namespace qsimnet {

void QuantumRegister::check_pos(std::size_t pos) const {
  if (pos >= qubits_.size()) {
    throw ValidationError("qubit position " + std::to_string(pos) +
                          " out of range (register size " +
                          std::to_string(qubits_.size()) + ")");
  }
}

const Qubit& QuantumRegister::at(std::size_t pos) const {
  check_pos(pos);
  return qubits_[pos];
}

Qubit& QuantumRegister::at(std::size_t pos) {
  check_pos(pos);
  return qubits_[pos];
}

void QuantumRegister::apply_gate(const Mat2& g, std::size_t pos) {
  check_pos(pos);
  Qubit& q = qubits_[pos];
  if (q.lost) {
    throw QubitLostError("gate applied to lost qubit at position " +
                         std::to_string(pos));
  }
  q.state = apply(g, q.state);
}

void QuantumRegister::apply_controlled(const Mat2& g, std::size_t control,
                                       std::size_t target) {
  check_pos(control);
  check_pos(target);
  const Qubit& c = qubits_[control];
  if (c.lost) {
    throw QubitLostError("control qubit is lost");
  }
  const double p1 = std::norm(c.state.beta);
  if (p1 <= kStateTol) {
    return;  // control |0>: no-op
  }
  if (p1 >= 1.0 - kStateTol) {
    apply_gate(g, target);  // control |1>: plain single-qubit gate
    return;
  }
  throw UnrepresentableOperationError(
      "unrepresentable entangling operation: control qubit is in "
      "superposition (P(1) = " +
      std::to_string(p1) + ")");
}

int QuantumRegister::measure(std::size_t pos, RandomSource& rng) {
  check_pos(pos);
  Qubit& q = qubits_[pos];
  if (q.lost) {
    throw QubitLostError("measuring a lost qubit has no defined outcome");
  }
  const int outcome = rng.next_real() < std::norm(q.state.alpha) ? 0 : 1;
  q.state = outcome == 0 ? AmplitudePair{{1.0, 0.0}, {0.0, 0.0}}
                         : AmplitudePair{{0.0, 0.0}, {1.0, 0.0}};
  return outcome;
}

int QuantumRegister::measure_in_basis(std::size_t pos, double theta,
                                      RandomSource& rng) {
  check_pos(pos);
  Qubit& q = qubits_[pos];
  if (q.lost) {
    throw QubitLostError("measuring a lost qubit has no defined outcome");
  }
  q.state = apply(gates::ry(-theta), q.state);
  const int outcome = measure(pos, rng);
  // Store the measured-basis eigenstate in the computational frame.
  q.state = apply(gates::ry(theta), q.state);
  return outcome;
}

std::vector<std::uint8_t> serialize(const QuantumRegister& reg) {
  return detail::dump_bytes(detail::register_to_json(reg));
}

QuantumRegister deserialize_register(std::span<const std::uint8_t> bytes) {
  return detail::register_from_json(detail::parse_bytes(bytes));
}

}  // namespace qsimnet
