#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "qsimnet/linalg.hpp"
#include "qsimnet/register.hpp"

namespace qsimnet {

enum class Side : std::uint8_t { A, B };
Side other_side(Side s);
const char* side_name(Side s);

/// True iff the four amplitudes cannot be factored into a product of
/// single-qubit states: |a00*a11 - a01*a10| > kStateTol.
bool is_entangled(const Vec4& m);

/// Conditional single-qubit state after the partner measured `outcome` on
/// `measured`: the matching row (side A) or column (side B) of the
/// amplitude matrix, normalized. Throws ProtocolViolationError when the
/// conditional has zero norm (the outcome is impossible under m).
AmplitudePair conditional_collapse(const Vec4& m, Side measured, int outcome);

/// Immutable record of the pair's amplitudes at entanglement creation,
/// validated: normalized within kStateTol and entangled.
class EprMatrix {
 public:
  explicit EprMatrix(const Vec4& coefficients);

  const Vec4& coefficients() const { return coefficients_; }

  /// Local amplitudes each side starts with: the probability marginals of
  /// the joint state. Side A: (sqrt(|a00|^2+|a01|^2), sqrt(|a10|^2+|a11|^2));
  /// side B sums over the first index instead.
  AmplitudePair marginal(Side side) const;

  AmplitudePair conditional_collapse(Side measured, int outcome) const {
    return qsimnet::conditional_collapse(coefficients_, measured, outcome);
  }

 private:
  Vec4 coefficients_;
};

/// Ordered list of gate matrices applied to one half of a pair since
/// entanglement, oldest first.
using OpHistory = std::vector<Mat2>;

/// Wire message carrying a measurement outcome plus the measurer's history.
struct MeasurementNotice {
  std::uint64_t pair_id = 0;
  Side measured_side = Side::A;
  int outcome = 0;
  OpHistory history;
};

class EntangledRegister;

/// Stateless reference to the partner half living on a remote node. A stub
/// only forwards; it never stores quantum state.
struct RemoteStub {
  std::array<std::uint64_t, 2> session_id{};
  std::uint64_t pair_id = 0;
};

struct LocalPartner {
  std::weak_ptr<EntangledRegister> reg;
  std::size_t slot = 0;
};

using PartnerRef = std::variant<LocalPartner, RemoteStub>;

enum class PairState : std::uint8_t { active, measured, reconciled };

/// Coordinator for one entangled pair. Stores only the original entangled
/// state; it never tracks changes to the joint system. Exactly one
/// measurement notice is accepted per pair.
class Entanglement {
 public:
  Entanglement(std::uint64_t pair_id, EprMatrix epr)
      : pair_id_(pair_id), epr_(std::move(epr)) {}

  std::uint64_t pair_id() const { return pair_id_; }
  const EprMatrix& epr() const { return epr_; }
  PairState state() const { return state_; }

  PartnerRef& side(Side s) { return s == Side::A ? side_a_ : side_b_; }
  const PartnerRef& side(Side s) const { return s == Side::A ? side_a_ : side_b_; }

  /// Installed by the node layer when a side becomes a RemoteStub; forwards
  /// the notice across the wire and returns once the peer has reconciled.
  std::function<void(const MeasurementNotice&)> stub_router;

  /// Outcome of the side that measured locally (corrected if a concurrent
  /// remote measurement won the race).
  std::optional<int> local_outcome() const { return local_outcome_; }

 private:
  friend class EntangledRegister;

  std::uint64_t pair_id_;
  EprMatrix epr_;
  PairState state_ = PairState::active;
  PartnerRef side_a_;
  PartnerRef side_b_;
  std::optional<Side> measured_locally_;
  std::optional<int> local_outcome_;
  std::optional<AmplitudePair> premeasure_state_;
};

/// A register whose slots may each hold one half of an entangled pair,
/// together with the per-slot operation history the reconciliation protocol
/// needs. Gates and measurements are caught here: a gate on an active slot
/// is applied locally and appended to the slot's history; a measurement
/// triggers the notify / rewind / collapse / replay exchange.
class EntangledRegister
    : public std::enable_shared_from_this<EntangledRegister> {
 public:
  explicit EntangledRegister(QuantumRegister base) : base_(std::move(base)) {
    slots_.resize(base_.size());
  }

  std::uint64_t id() const { return base_.id(); }
  std::size_t size() const { return base_.size(); }
  const QuantumRegister& base() const { return base_; }

  const OpHistory& history(std::size_t slot) const;
  std::shared_ptr<Entanglement> pair(std::size_t slot) const;
  Side side(std::size_t slot) const;
  /// Which slot a pair occupies, if any.
  std::optional<std::size_t> slot_of(std::uint64_t pair_id) const;

  /// Binds slot `slot` to `pair` as `side`. The pair's side ref is not
  /// touched; callers wire both directions (see create_entangled_pair).
  void bind(std::size_t slot, std::shared_ptr<Entanglement> pair, Side side);

  /// Applies g. On an active slot the matrix is also appended to the slot's
  /// history; the pair must not have been measured or reconciled
  /// (StaleEntanglementError otherwise). Unbound slots behave like plain
  /// register qubits.
  void apply_gate(const Mat2& g, std::size_t pos);

  /// Measures an active slot, transitions the pair to measured, and routes
  /// the notice (outcome + this side's full history) to the partner: a local
  /// partner is reconciled inline, a remote one through the stub router.
  std::pair<int, MeasurementNotice> measure_entangled(std::size_t pos,
                                                      RandomSource& rng);

  /// Measurement of an unbound or already-reconciled slot.
  int measure_plain(std::size_t pos, RandomSource& rng);

  /// Handles the partner's measurement notice for the matching slot:
  /// (1) rewind own history, newest first, by applying inverses;
  /// (2) collapse to the conditional state from the EPR matrix;
  /// (3) replay the measurer's history, oldest first;
  /// (4) replay own history, oldest first.
  /// Histories are retained for audit but frozen afterwards.
  ///
  /// When this side measured concurrently (both measured before either
  /// notice arrived), side A's notice wins: a side-B register rolls its own
  /// measurement back, reconciles against the notice and re-measures from
  /// the reconciled state, which needs `remeasure_rng`. The losing notice is
  /// rejected with StaleEntanglementError on the other node.
  void reconcile(const MeasurementNotice& notice,
                 RandomSource* remeasure_rng = nullptr);

 private:
  struct SlotInfo {
    std::shared_ptr<Entanglement> pair;
    Side side = Side::A;
    OpHistory history;
  };

  SlotInfo& slot_for_pair(std::uint64_t pair_id);
  void run_reconcile_steps(SlotInfo& slot, std::size_t pos,
                           const MeasurementNotice& notice);

  QuantumRegister base_;
  std::vector<SlotInfo> slots_;
};

struct EntangledPair {
  std::shared_ptr<EntangledRegister> side_a;
  std::shared_ptr<EntangledRegister> side_b;
  std::shared_ptr<Entanglement> pair;
};

/// Creates a pair of one-qubit registers associated to the two halves of a
/// fresh Entanglement. Local amplitudes start at the marginals of m; both
/// histories start empty; the coordinator starts active.
EntangledPair create_entangled_pair(const EprMatrix& m, std::uint64_t pair_id,
                                    std::uint64_t reg_a_id,
                                    std::uint64_t reg_b_id);

/// Same, with ids drawn from a process-wide counter.
EntangledPair create_entangled_pair(const EprMatrix& m);

namespace bell {
Vec4 phi_plus();
Vec4 phi_minus();
Vec4 psi_plus();
Vec4 psi_minus();
}  // namespace bell

}  // namespace qsimnet
