#include "qsimnet/entangle.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace qsimnet {

Side other_side(Side s) { return s == Side::A ? Side::B : Side::A; }

const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }

bool is_entangled(const Vec4& m) {
  return std::abs(m.a00 * m.a11 - m.a01 * m.a10) > kStateTol;
}

AmplitudePair conditional_collapse(const Vec4& m, Side measured, int outcome) {
  if (outcome != 0 && outcome != 1) {
    throw ValidationError("measurement outcome must be 0 or 1");
  }
  AmplitudePair cond;
  if (measured == Side::A) {
    cond = outcome == 0 ? AmplitudePair{m.a00, m.a01}
                        : AmplitudePair{m.a10, m.a11};
  } else {
    cond = outcome == 0 ? AmplitudePair{m.a00, m.a10}
                        : AmplitudePair{m.a01, m.a11};
  }
  if (std::sqrt(norm_squared(cond)) <= kStateTol) {
    throw ProtocolViolationError(
        std::string("outcome ") + std::to_string(outcome) + " on side " +
        side_name(measured) + " is impossible under the entangled state");
  }
  return normalized(cond);
}

EprMatrix::EprMatrix(const Vec4& coefficients) : coefficients_(coefficients) {
  if (!is_normalized(coefficients_)) {
    throw ValidationError("EPR matrix is not normalized: squared norm " +
                          std::to_string(norm_squared(coefficients_)));
  }
  if (!qsimnet::is_entangled(coefficients_)) {
    throw NotEntangledError(
        "amplitudes factor into a product state; not entangled");
  }
}

AmplitudePair EprMatrix::marginal(Side side) const {
  const Vec4& m = coefficients_;
  if (side == Side::A) {
    return {Complex{std::sqrt(std::norm(m.a00) + std::norm(m.a01)), 0.0},
            Complex{std::sqrt(std::norm(m.a10) + std::norm(m.a11)), 0.0}};
  }
  return {Complex{std::sqrt(std::norm(m.a00) + std::norm(m.a10)), 0.0},
          Complex{std::sqrt(std::norm(m.a01) + std::norm(m.a11)), 0.0}};
}

// ---------------------------------------------------------------------------
// EntangledRegister

const OpHistory& EntangledRegister::history(std::size_t slot) const {
  if (slot >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  return slots_[slot].history;
}

std::shared_ptr<Entanglement> EntangledRegister::pair(std::size_t slot) const {
  if (slot >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  return slots_[slot].pair;
}

Side EntangledRegister::side(std::size_t slot) const {
  if (slot >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  return slots_[slot].side;
}

std::optional<std::size_t> EntangledRegister::slot_of(
    std::uint64_t pair_id) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].pair && slots_[i].pair->pair_id() == pair_id) return i;
  }
  return std::nullopt;
}

void EntangledRegister::bind(std::size_t slot,
                             std::shared_ptr<Entanglement> pair, Side side) {
  if (slot >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  slots_[slot].pair = std::move(pair);
  slots_[slot].side = side;
  slots_[slot].history.clear();
}

void EntangledRegister::apply_gate(const Mat2& g, std::size_t pos) {
  if (pos >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  SlotInfo& slot = slots_[pos];
  if (slot.pair) {
    if (slot.pair->state_ != PairState::active) {
      throw StaleEntanglementError(
          "gate on a pair that is no longer active (pair " +
          std::to_string(slot.pair->pair_id()) + ")");
    }
    if (!is_unitary(g)) {
      throw ValidationError("recorded gates must be unitary");
    }
    base_.apply_gate(g, pos);
    slot.history.push_back(g);
    return;
  }
  base_.apply_gate(g, pos);
}

std::pair<int, MeasurementNotice> EntangledRegister::measure_entangled(
    std::size_t pos, RandomSource& rng) {
  if (pos >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  SlotInfo& slot = slots_[pos];
  if (!slot.pair) {
    throw ValidationError("slot is not bound to an entangled pair");
  }
  Entanglement& pair = *slot.pair;
  if (pair.state_ != PairState::active) {
    throw StaleEntanglementError("pair " + std::to_string(pair.pair_id()) +
                                 " was already measured");
  }

  // Snapshot supports rollback when a concurrent remote measurement wins.
  pair.premeasure_state_ = base_.at(pos).state;
  const int outcome = base_.measure(pos, rng);
  pair.state_ = PairState::measured;
  pair.measured_locally_ = slot.side;
  pair.local_outcome_ = outcome;

  MeasurementNotice notice{pair.pair_id(), slot.side, outcome, slot.history};

  const PartnerRef& partner = pair.side(other_side(slot.side));
  if (const auto* local = std::get_if<LocalPartner>(&partner)) {
    auto partner_reg = local->reg.lock();
    if (!partner_reg) {
      throw ProtocolViolationError("local partner register no longer exists");
    }
    partner_reg->reconcile(notice);
    pair.state_ = PairState::reconciled;
  } else {
    if (!pair.stub_router) {
      throw ProtocolViolationError(
          "remote partner has no notice router installed");
    }
    pair.stub_router(notice);  // returns once the peer reconciled
    pair.state_ = PairState::reconciled;
  }
  return {outcome, notice};
}

int EntangledRegister::measure_plain(std::size_t pos, RandomSource& rng) {
  if (pos >= slots_.size()) {
    throw ValidationError("slot out of range");
  }
  SlotInfo& slot = slots_[pos];
  if (slot.pair && slot.pair->state_ != PairState::reconciled) {
    throw ValidationError(
        "slot is bound to an unreconciled pair; use measure_entangled");
  }
  return base_.measure(pos, rng);
}

EntangledRegister::SlotInfo& EntangledRegister::slot_for_pair(
    std::uint64_t pair_id) {
  for (auto& slot : slots_) {
    if (slot.pair && slot.pair->pair_id() == pair_id) return slot;
  }
  throw ValidationError("no slot holds pair " + std::to_string(pair_id));
}

void EntangledRegister::run_reconcile_steps(SlotInfo& slot, std::size_t pos,
                                            const MeasurementNotice& notice) {
  // (1) rewind own history, newest first
  for (auto it = slot.history.rbegin(); it != slot.history.rend(); ++it) {
    base_.apply_gate(inverse(*it), pos);
  }
  // (2) conditional collapse from the original entangled state
  base_.at(pos).state =
      slot.pair->epr().conditional_collapse(notice.measured_side, notice.outcome);
  // (3) replay the measurer's history, oldest first
  for (const Mat2& g : notice.history) {
    base_.apply_gate(g, pos);
  }
  // (4) replay own history, oldest first
  for (const Mat2& g : slot.history) {
    base_.apply_gate(g, pos);
  }
}

void EntangledRegister::reconcile(const MeasurementNotice& notice,
                                  RandomSource* remeasure_rng) {
  SlotInfo& slot = slot_for_pair(notice.pair_id);
  Entanglement& pair = *slot.pair;
  const std::size_t pos =
      static_cast<std::size_t>(&slot - slots_.data());

  if (pair.state_ == PairState::reconciled) {
    throw StaleEntanglementError("pair " + std::to_string(notice.pair_id) +
                                 " already reconciled");
  }
  if (notice.measured_side == slot.side) {
    throw StaleEntanglementError(
        "notice claims this register's own side measured");
  }

  if (pair.state_ == PairState::measured &&
      pair.measured_locally_ == slot.side) {
    // Both sides measured before either notice arrived. Side A's notice
    // wins: a side-B register rolls back its local measurement and
    // recomputes it from the reconciled state. A side-A register keeps its
    // measurement and the incoming notice is stale.
    if (slot.side != Side::B || notice.measured_side != Side::A) {
      throw StaleEntanglementError(
          "pair " + std::to_string(notice.pair_id) +
          " was measured locally; concurrent notice rejected");
    }
    if (remeasure_rng == nullptr) {
      throw ProtocolViolationError(
          "rollback of a concurrent measurement needs a random source");
    }
    base_.at(pos).state = *pair.premeasure_state_;
    run_reconcile_steps(slot, pos, notice);
    pair.state_ = PairState::reconciled;
    pair.local_outcome_ = base_.measure(pos, *remeasure_rng);
    return;
  }

  // Normal path: the partner measured (pair.state_ is measured when this
  // register shares the coordinator with the measuring half, active when
  // the notice crossed a transport).
  run_reconcile_steps(slot, pos, notice);
  pair.state_ = PairState::reconciled;  // history retained, now frozen
}

// ---------------------------------------------------------------------------

EntangledPair create_entangled_pair(const EprMatrix& m, std::uint64_t pair_id,
                                    std::uint64_t reg_a_id,
                                    std::uint64_t reg_b_id) {
  auto pair = std::make_shared<Entanglement>(pair_id, m);

  QuantumRegister base_a(reg_a_id, 1);
  base_a.at(0).state = m.marginal(Side::A);
  auto reg_a = std::make_shared<EntangledRegister>(std::move(base_a));
  reg_a->bind(0, pair, Side::A);

  QuantumRegister base_b(reg_b_id, 1);
  base_b.at(0).state = m.marginal(Side::B);
  auto reg_b = std::make_shared<EntangledRegister>(std::move(base_b));
  reg_b->bind(0, pair, Side::B);

  pair->side(Side::A) = LocalPartner{reg_a, 0};
  pair->side(Side::B) = LocalPartner{reg_b, 0};

  return {std::move(reg_a), std::move(reg_b), std::move(pair)};
}

EntangledPair create_entangled_pair(const EprMatrix& m) {
  static std::atomic<std::uint64_t> next_id{1};
  const std::uint64_t base = next_id.fetch_add(3);
  return create_entangled_pair(m, base, base + 1, base + 2);
}

namespace bell {

Vec4 phi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{h, 0}, {0, 0}, {0, 0}, {h, 0}};
}

Vec4 phi_minus() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{h, 0}, {0, 0}, {0, 0}, {-h, 0}};
}

Vec4 psi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{0, 0}, {h, 0}, {h, 0}, {0, 0}};
}

Vec4 psi_minus() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{0, 0}, {h, 0}, {-h, 0}, {0, 0}};
}

}  // namespace bell

}  // namespace qsimnet
