#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qsimnet/entangle.hpp"
#include "qsimnet/random.hpp"
#include "qsimnet/wire.hpp"

namespace qsimnet {

class SimNode;

/// One established connection between two nodes. A session owns a service
/// thread that decodes incoming frames: requests are funneled into the
/// owning node's serial dispatch queue and answered; ACK/ERROR frames
/// resolve the pending outbound request. Senders block awaiting the reply,
/// so an ACK means the remote effect (e.g. reconciliation) has completed.
/// Destroy sessions before the node that created them; the destructor joins
/// the service thread.
class Session {
 public:
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  SessionId id() const { return id_; }
  const std::string& peer_name() const { return peer_name_; }
  bool closed() const;

  /// Sends a request and blocks until the matching ACK or ERROR arrives.
  /// Throws TransportError when the session closes first. One request is
  /// outstanding at a time per session.
  Envelope request(const Envelope& env);

  /// Like request() but converts an ERROR reply into a RemoteError.
  Envelope request_ok(const Envelope& env);

  void close();

 private:
  friend class SimNode;

  Session(SimNode* node, std::shared_ptr<ByteStream> stream, SessionId id,
          std::string peer_name);
  void start();
  void service_loop();
  void send_envelope(const Envelope& env);

  SimNode* node_;
  std::shared_ptr<ByteStream> stream_;
  SessionId id_;
  std::string peer_name_;

  std::mutex write_mu_;
  std::mutex request_mu_;
  mutable std::mutex reply_mu_;
  std::condition_variable reply_cv_;
  std::optional<Envelope> pending_reply_;
  bool closed_ = false;

  std::thread service_;
};

struct TransferReceipt {
  std::uint64_t register_id = 0;
  std::vector<std::uint64_t> stubbed_pairs;
};

/// A simulator node: the registration point for quantum registers and
/// entanglement coordinators, and the endpoint of wire sessions. All decoded
/// messages funnel into one serial dispatch queue (a node-wide lock); the
/// entanglement coordinators process events from that same queue.
class SimNode {
 public:
  SimNode(std::string name, std::uint64_t seed);
  ~SimNode();
  SimNode(const SimNode&) = delete;
  SimNode& operator=(const SimNode&) = delete;

  const std::string& name() const { return name_; }
  /// Node-local random source (session ids, race re-measurements).
  RandomSource& rng() { return rng_; }

  // --- registry -----------------------------------------------------------

  std::uint64_t allocate_id();
  /// Registers an existing entangled register under its own id.
  void adopt(std::shared_ptr<EntangledRegister> reg);
  /// Wraps and registers a plain register.
  std::shared_ptr<EntangledRegister> adopt_plain(QuantumRegister reg);
  std::shared_ptr<EntangledRegister> reg(std::uint64_t id) const;
  bool has_register(std::uint64_t id) const;
  /// Blocks until a register with this id is installed (e.g. by an incoming
  /// transfer). Returns nullptr on timeout.
  std::shared_ptr<EntangledRegister> wait_for_register(
      std::uint64_t id, std::chrono::milliseconds timeout);
  /// Removes a register from the registry and returns it.
  std::shared_ptr<EntangledRegister> release(std::uint64_t id);
  std::shared_ptr<Entanglement> pair(std::uint64_t pair_id) const;

  /// Creates a fresh entangled pair with node-allocated ids; both halves are
  /// registered on this node.
  EntangledPair create_pair(const EprMatrix& m);

  // --- sessions ------------------------------------------------------------

  /// Initiator handshake: sends HELLO, expects HELLO back.
  std::shared_ptr<Session> connect(std::shared_ptr<ByteStream> stream);
  /// Responder handshake: expects HELLO; replies HELLO, or ERROR
  /// (unsupported_version) and closes when the peer's version is unknown.
  std::shared_ptr<Session> accept(std::shared_ptr<ByteStream> stream);

  // --- operations ----------------------------------------------------------

  /// Transfers a register to the peer. On ACK the local entanglement refs
  /// for the transferred slots become remote stubs and the local register is
  /// released; on ERROR nothing changes and RemoteError is thrown. Slots
  /// with an active pair must have empty histories: the transfer schema
  /// carries amplitudes and EPR matrices only.
  TransferReceipt send_register(Session& session, std::uint64_t register_id);

  /// Serial handler for one decoded envelope; returns the reply envelope.
  /// Exposed so tests can drive the dispatch path directly.
  Envelope dispatch(const Envelope& env, Session* session);

  /// Fires after a measurement notice has been reconciled, with the id of
  /// the register that was updated. Runs on the dispatching thread: hand
  /// blocking work (such as shipping the register back) to another thread.
  std::function<void(std::uint64_t register_id, Session& session)>
      on_reconciled;

 private:
  Envelope handle_transfer(const RegisterTransferPayload& p, Session* session);
  Envelope handle_notice(const MeasurementNoticePayload& p, Session* session);
  void install_stub_router(const std::shared_ptr<Entanglement>& pair,
                           const std::shared_ptr<Session>& session);
  Envelope reply_ack(SessionId sid) const;
  Envelope reply_error(SessionId sid, const char* code,
                       const std::string& message) const;

  std::string name_;
  RandomSource rng_;

  mutable std::mutex mu_;
  std::condition_variable registry_cv_;
  std::map<std::uint64_t, std::shared_ptr<EntangledRegister>> registers_;
  std::map<std::uint64_t, std::shared_ptr<Entanglement>> pairs_;
  std::uint64_t next_id_ = 1;
  std::vector<std::weak_ptr<Session>> sessions_;
};

}  // namespace qsimnet
