#include "qsimnet/node.hpp"

#include <algorithm>

namespace qsimnet {

namespace {

Envelope make_envelope(SessionId sid, MessageKind kind, Payload payload) {
  Envelope env;
  env.session_id = sid;
  env.kind = kind;
  env.payload = std::move(payload);
  return env;
}

}  // namespace

// ---------------------------------------------------------------------------
// Session

Session::Session(SimNode* node, std::shared_ptr<ByteStream> stream,
                 SessionId id, std::string peer_name)
    : node_(node),
      stream_(std::move(stream)),
      id_(id),
      peer_name_(std::move(peer_name)) {}

Session::~Session() {
  close();
  if (service_.joinable()) service_.join();
}

bool Session::closed() const {
  std::lock_guard lock(reply_mu_);
  return closed_;
}

void Session::start() {
  service_ = std::thread([this] { service_loop(); });
}

void Session::send_envelope(const Envelope& env) {
  std::lock_guard lock(write_mu_);
  write_frame(*stream_, encode(env));
}

Envelope Session::request(const Envelope& env) {
  std::lock_guard outstanding(request_mu_);
  send_envelope(env);
  std::unique_lock lock(reply_mu_);
  reply_cv_.wait(lock, [&] { return pending_reply_.has_value() || closed_; });
  if (!pending_reply_) {
    throw TransportError("session closed while awaiting a reply");
  }
  Envelope reply = std::move(*pending_reply_);
  pending_reply_.reset();
  return reply;
}

Envelope Session::request_ok(const Envelope& env) {
  Envelope reply = request(env);
  if (reply.kind == MessageKind::error) {
    const auto& err = std::get<ErrorPayload>(reply.payload);
    throw RemoteError(err.code, err.message);
  }
  return reply;
}

void Session::service_loop() {
  try {
    while (true) {
      auto frame = read_frame(*stream_);
      if (!frame) break;
      Envelope env;
      try {
        env = decode(*frame);
      } catch (const DecodeError& e) {
        send_envelope(make_envelope(
            id_, MessageKind::error,
            ErrorPayload{error_code::bad_request, e.what()}));
        continue;
      }
      if (env.kind == MessageKind::ack || env.kind == MessageKind::error) {
        {
          std::lock_guard lock(reply_mu_);
          pending_reply_ = std::move(env);
        }
        reply_cv_.notify_all();
        continue;
      }
      send_envelope(node_->dispatch(env, this));
    }
  } catch (const SimError&) {
    // Framing or transport failure: fall through and mark the session closed.
  }
  {
    std::lock_guard lock(reply_mu_);
    closed_ = true;
  }
  reply_cv_.notify_all();
}

void Session::close() {
  {
    std::lock_guard lock(reply_mu_);
    if (closed_) {
      stream_->close();
      return;
    }
    closed_ = true;
  }
  stream_->close();
  reply_cv_.notify_all();
}

// ---------------------------------------------------------------------------
// SimNode

SimNode::SimNode(std::string name, std::uint64_t seed)
    : name_(std::move(name)), rng_(seed) {}

SimNode::~SimNode() {
  std::vector<std::shared_ptr<Session>> open;
  {
    std::lock_guard lock(mu_);
    for (auto& weak : sessions_) {
      if (auto s = weak.lock()) open.push_back(std::move(s));
    }
  }
  for (auto& s : open) s->close();
}

std::uint64_t SimNode::allocate_id() {
  std::lock_guard lock(mu_);
  return next_id_++;
}

void SimNode::adopt(std::shared_ptr<EntangledRegister> reg) {
  std::lock_guard lock(mu_);
  const std::uint64_t id = reg->id();
  if (!registers_.emplace(id, std::move(reg)).second) {
    throw ValidationError("register id " + std::to_string(id) +
                          " already registered");
  }
  registry_cv_.notify_all();
}

std::shared_ptr<EntangledRegister> SimNode::adopt_plain(QuantumRegister reg) {
  auto wrapped = std::make_shared<EntangledRegister>(std::move(reg));
  adopt(wrapped);
  return wrapped;
}

std::shared_ptr<EntangledRegister> SimNode::reg(std::uint64_t id) const {
  std::lock_guard lock(mu_);
  auto it = registers_.find(id);
  if (it == registers_.end()) {
    throw ValidationError("no register with id " + std::to_string(id));
  }
  return it->second;
}

bool SimNode::has_register(std::uint64_t id) const {
  std::lock_guard lock(mu_);
  return registers_.count(id) != 0;
}

std::shared_ptr<EntangledRegister> SimNode::wait_for_register(
    std::uint64_t id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  std::shared_ptr<EntangledRegister> found;
  registry_cv_.wait_for(lock, timeout, [&] {
    auto it = registers_.find(id);
    if (it == registers_.end()) return false;
    found = it->second;
    return true;
  });
  return found;
}

std::shared_ptr<EntangledRegister> SimNode::release(std::uint64_t id) {
  std::lock_guard lock(mu_);
  auto it = registers_.find(id);
  if (it == registers_.end()) {
    throw ValidationError("no register with id " + std::to_string(id));
  }
  auto reg = std::move(it->second);
  registers_.erase(it);
  return reg;
}

std::shared_ptr<Entanglement> SimNode::pair(std::uint64_t pair_id) const {
  std::lock_guard lock(mu_);
  auto it = pairs_.find(pair_id);
  return it == pairs_.end() ? nullptr : it->second;
}

EntangledPair SimNode::create_pair(const EprMatrix& m) {
  std::lock_guard lock(mu_);
  const std::uint64_t pair_id = next_id_++;
  const std::uint64_t reg_a = next_id_++;
  const std::uint64_t reg_b = next_id_++;
  EntangledPair created = create_entangled_pair(m, pair_id, reg_a, reg_b);
  registers_[reg_a] = created.side_a;
  registers_[reg_b] = created.side_b;
  pairs_[pair_id] = created.pair;
  registry_cv_.notify_all();
  return created;
}

// ---------------------------------------------------------------------------
// Handshake

std::shared_ptr<Session> SimNode::connect(std::shared_ptr<ByteStream> stream) {
  SessionId sid{{rng_.next_u64(), rng_.next_u64()}};
  write_frame(*stream,
              encode(make_envelope(sid, MessageKind::hello, HelloPayload{name_})));
  auto frame = read_frame(*stream);
  if (!frame) {
    throw TransportError("peer closed during handshake");
  }
  const Envelope reply = decode(*frame);
  if (reply.kind == MessageKind::error) {
    const auto& err = std::get<ErrorPayload>(reply.payload);
    stream->close();
    throw RemoteError(err.code, err.message);
  }
  if (reply.kind != MessageKind::hello) {
    stream->close();
    throw TransportError("handshake expected HELLO, got " +
                         std::string(kind_name(reply.kind)));
  }
  const std::string peer = std::get<HelloPayload>(reply.payload).node;
  auto session =
      std::shared_ptr<Session>(new Session(this, std::move(stream), sid, peer));
  session->start();
  {
    std::lock_guard lock(mu_);
    sessions_.push_back(session);
  }
  return session;
}

std::shared_ptr<Session> SimNode::accept(std::shared_ptr<ByteStream> stream) {
  auto frame = read_frame(*stream);
  if (!frame) {
    throw TransportError("peer closed during handshake");
  }
  const Envelope hello = decode(*frame);
  if (hello.kind != MessageKind::hello) {
    stream->close();
    throw TransportError("handshake expected HELLO, got " +
                         std::string(kind_name(hello.kind)));
  }
  if (hello.version != kProtocolVersion) {
    write_frame(*stream,
                encode(make_envelope(
                    hello.session_id, MessageKind::error,
                    ErrorPayload{error_code::unsupported_version,
                                 "protocol version " +
                                     std::to_string(hello.version) +
                                     " is not supported"})));
    stream->close();
    throw TransportError("rejected session with unsupported version " +
                         std::to_string(hello.version));
  }
  const std::string peer = std::get<HelloPayload>(hello.payload).node;
  write_frame(*stream, encode(make_envelope(hello.session_id,
                                            MessageKind::hello,
                                            HelloPayload{name_})));
  auto session = std::shared_ptr<Session>(
      new Session(this, std::move(stream), hello.session_id, peer));
  session->start();
  {
    std::lock_guard lock(mu_);
    sessions_.push_back(session);
  }
  return session;
}

// ---------------------------------------------------------------------------
// Operations

void SimNode::install_stub_router(const std::shared_ptr<Entanglement>& pair,
                                  const std::shared_ptr<Session>& session) {
  std::weak_ptr<Session> weak = session;
  pair->stub_router = [weak](const MeasurementNotice& notice) {
    auto s = weak.lock();
    if (!s) {
      throw TransportError("session for remote partner no longer exists");
    }
    MeasurementNoticePayload payload{notice};
    s->request_ok(make_envelope(s->id(), MessageKind::measurement_notice,
                                std::move(payload)));
  };
}

TransferReceipt SimNode::send_register(Session& session,
                                       std::uint64_t register_id) {
  RegisterTransferPayload payload;
  std::shared_ptr<EntangledRegister> reg;
  std::vector<std::pair<std::uint64_t, Side>> active_pairs;
  {
    std::lock_guard lock(mu_);
    auto it = registers_.find(register_id);
    if (it == registers_.end()) {
      throw ValidationError("no register with id " +
                            std::to_string(register_id));
    }
    reg = it->second;
    payload.register_id = register_id;
    for (std::size_t i = 0; i < reg->size(); ++i) {
      payload.qubits.push_back(reg->base().at(i));
      auto pair = reg->pair(i);
      if (!pair || pair->state() == PairState::reconciled) {
        continue;  // reconciled pairs travel as plain qubits
      }
      if (pair->state() != PairState::active) {
        throw ValidationError("cannot transfer a pair mid-measurement");
      }
      if (!reg->history(i).empty()) {
        throw ValidationError(
            "cannot transfer slot " + std::to_string(i) +
            ": the transfer schema does not carry operation histories");
      }
      payload.entanglements.push_back(EntanglementEntry{
          pair->pair_id(), static_cast<std::uint32_t>(i), reg->side(i),
          pair->epr().coefficients()});
      active_pairs.emplace_back(pair->pair_id(), reg->side(i));
    }
  }

  // Blocking round trip happens outside the node lock.
  session.request_ok(make_envelope(session.id(), MessageKind::register_transfer,
                                   std::move(payload)));

  TransferReceipt receipt;
  receipt.register_id = register_id;
  std::shared_ptr<Session> session_ptr;
  {
    std::lock_guard lock(mu_);
    for (auto& weak : sessions_) {
      auto s = weak.lock();
      if (s.get() == &session) {
        session_ptr = std::move(s);
        break;
      }
    }
    for (const auto& [pair_id, sent_side] : active_pairs) {
      auto pit = pairs_.find(pair_id);
      if (pit == pairs_.end()) continue;
      auto& pair = pit->second;
      pair->side(sent_side) = RemoteStub{session.id().words, pair_id};
      // Keep the coordinator only while the partner half stays on this node.
      const auto* local =
          std::get_if<LocalPartner>(&pair->side(other_side(sent_side)));
      bool partner_here = false;
      if (local != nullptr) {
        if (auto partner_reg = local->reg.lock()) {
          partner_here = registers_.count(partner_reg->id()) != 0;
        }
      }
      if (partner_here && session_ptr) {
        install_stub_router(pair, session_ptr);
      } else {
        pairs_.erase(pit);
      }
      receipt.stubbed_pairs.push_back(pair_id);
    }
    registers_.erase(register_id);  // ownership released
  }
  return receipt;
}

Envelope SimNode::reply_ack(SessionId sid) const {
  return make_envelope(sid, MessageKind::ack, AckPayload{});
}

Envelope SimNode::reply_error(SessionId sid, const char* code,
                              const std::string& message) const {
  return make_envelope(sid, MessageKind::error, ErrorPayload{code, message});
}

Envelope SimNode::dispatch(const Envelope& env, Session* session) {
  const SessionId sid = env.session_id;
  if (session != nullptr && !(sid == session->id())) {
    return reply_error(sid, error_code::bad_request,
                       "envelope session id does not match the session");
  }
  switch (env.kind) {
    case MessageKind::register_transfer:
      return handle_transfer(std::get<RegisterTransferPayload>(env.payload),
                             session);
    case MessageKind::measurement_notice:
      return handle_notice(std::get<MeasurementNoticePayload>(env.payload),
                           session);
    case MessageKind::hello:
      return reply_error(sid, error_code::bad_request,
                         "HELLO after session establishment");
    case MessageKind::ack:
    case MessageKind::error:
      return reply_error(sid, error_code::bad_request,
                         "reply kind outside a request context");
  }
  return reply_error(sid, error_code::bad_request, "unhandled kind");
}

Envelope SimNode::handle_transfer(const RegisterTransferPayload& p,
                                  Session* session) {
  const SessionId sid = session ? session->id() : SessionId{};
  std::shared_ptr<Session> session_ptr;
  std::lock_guard lock(mu_);
  for (auto& weak : sessions_) {
    auto s = weak.lock();
    if (s.get() == session) {
      session_ptr = std::move(s);
      break;
    }
  }

  if (registers_.count(p.register_id) != 0) {
    return reply_error(sid, error_code::duplicate_register,
                       "register id " + std::to_string(p.register_id) +
                           " already exists on node " + name_);
  }
  for (std::size_t i = 0; i < p.qubits.size(); ++i) {
    const Qubit& q = p.qubits[i];
    if (!q.lost && !is_normalized(q.state)) {
      return reply_error(sid, error_code::invariant_violation,
                         "qubit " + std::to_string(i) + " is not normalized");
    }
  }

  QuantumRegister base(p.register_id, 0);
  for (const Qubit& q : p.qubits) base.append(q);
  auto reg = std::make_shared<EntangledRegister>(std::move(base));

  // Validate every entry before touching node state.
  for (const EntanglementEntry& e : p.entanglements) {
    if (e.slot_index >= p.qubits.size()) {
      return reply_error(sid, error_code::invariant_violation,
                         "slotIndex " + std::to_string(e.slot_index) +
                             " out of range");
    }
    try {
      EprMatrix probe(e.epr_matrix);  // validates norm + entangledness
    } catch (const ValidationError& err) {
      return reply_error(sid, error_code::invariant_violation, err.what());
    }
    auto existing = pairs_.find(e.pair_id);
    if (existing != pairs_.end()) {
      const Vec4& ours = existing->second->epr().coefficients();
      if (!equal_up_to_phase(ours, e.epr_matrix, kAlgebraTol) ||
          existing->second->state() != PairState::active) {
        return reply_error(sid, error_code::invariant_violation,
                           "pair " + std::to_string(e.pair_id) +
                               " conflicts with local coordinator state");
      }
    }
  }

  for (const EntanglementEntry& e : p.entanglements) {
    auto existing = pairs_.find(e.pair_id);
    if (existing != pairs_.end()) {
      // The partner half lives here: relink both halves locally.
      existing->second->side(e.side) = LocalPartner{reg, e.slot_index};
      existing->second->stub_router = nullptr;
      reg->bind(e.slot_index, existing->second, e.side);
      continue;
    }
    auto pair =
        std::make_shared<Entanglement>(e.pair_id, EprMatrix(e.epr_matrix));
    pair->side(e.side) = LocalPartner{reg, e.slot_index};
    pair->side(other_side(e.side)) = RemoteStub{sid.words, e.pair_id};
    if (session_ptr) install_stub_router(pair, session_ptr);
    pairs_[e.pair_id] = pair;
    reg->bind(e.slot_index, pair, e.side);
  }

  registers_[p.register_id] = std::move(reg);
  registry_cv_.notify_all();
  return reply_ack(sid);
}

Envelope SimNode::handle_notice(const MeasurementNoticePayload& p,
                                Session* session) {
  const SessionId sid = session ? session->id() : SessionId{};
  const MeasurementNotice& notice = p.notice;

  for (const Mat2& g : notice.history) {
    if (!is_unitary(g)) {
      return reply_error(sid, error_code::invariant_violation,
                         "notice history entry is not unitary");
    }
  }

  std::uint64_t reconciled_register = 0;
  {
    std::lock_guard lock(mu_);
    auto it = pairs_.find(notice.pair_id);
    if (it == pairs_.end()) {
      return reply_error(sid, error_code::unknown_pair,
                         "no pair with id " + std::to_string(notice.pair_id));
    }
    auto pair = it->second;
    const auto* local =
        std::get_if<LocalPartner>(&pair->side(other_side(notice.measured_side)));
    if (local == nullptr) {
      return reply_error(sid, error_code::bad_request,
                         "notice for a side this node does not hold");
    }
    auto reg = local->reg.lock();
    if (!reg) {
      return reply_error(sid, error_code::invariant_violation,
                         "partner register no longer exists");
    }
    try {
      reg->reconcile(notice, &rng_);
    } catch (const StaleEntanglementError& e) {
      return reply_error(sid, error_code::stale_entanglement, e.what());
    } catch (const SimError& e) {
      return reply_error(sid, error_code::invariant_violation, e.what());
    }
    reconciled_register = reg->id();
  }

  // ACK is written by the caller after this returns, completing the
  // ack-after-reconcile contract. The hook runs outside the node lock.
  if (on_reconciled && session != nullptr) {
    on_reconciled(reconciled_register, *session);
  }
  return reply_ack(sid);
}

}  // namespace qsimnet
