#include "qsimnet/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "json_util.hpp"

namespace qsimnet {

using detail::Json;

const char* kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::hello: return "HELLO";
    case MessageKind::register_transfer: return "REGISTER_TRANSFER";
    case MessageKind::measurement_notice: return "MEASUREMENT_NOTICE";
    case MessageKind::ack: return "ACK";
    case MessageKind::error: return "ERROR";
  }
  return "?";
}

namespace {

MessageKind kind_from_name(const std::string& name) {
  if (name == "HELLO") return MessageKind::hello;
  if (name == "REGISTER_TRANSFER") return MessageKind::register_transfer;
  if (name == "MEASUREMENT_NOTICE") return MessageKind::measurement_notice;
  if (name == "ACK") return MessageKind::ack;
  if (name == "ERROR") return MessageKind::error;
  throw DecodeError("unknown message kind '" + name + "'", std::string("kind"));
}

Side side_from_name(const std::string& name) {
  if (name == "A") return Side::A;
  if (name == "B") return Side::B;
  throw DecodeError("side must be 'A' or 'B'", std::string("side"));
}

}  // namespace

// ---------------------------------------------------------------------------
// SessionId

std::string SessionId::to_hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(words[0]),
                static_cast<unsigned long long>(words[1]));
  return buf;
}

SessionId SessionId::from_hex(const std::string& hex) {
  if (hex.size() != 32) {
    throw DecodeError("session id must be 32 hex digits",
                      std::string("sessionId"));
  }
  SessionId id;
  for (int w = 0; w < 2; ++w) {
    const char* first = hex.data() + w * 16;
    auto [ptr, ec] = std::from_chars(first, first + 16, id.words[w], 16);
    if (ec != std::errc{} || ptr != first + 16) {
      throw DecodeError("session id must be 32 hex digits",
                        std::string("sessionId"));
    }
  }
  return id;
}

// ---------------------------------------------------------------------------
// Structural equality (doubles compare exactly; the codec is bit-faithful)

namespace {

bool complex_eq(const Complex& a, const Complex& b) {
  return a.real() == b.real() && a.imag() == b.imag();
}

bool qubit_eq(const Qubit& a, const Qubit& b) {
  return complex_eq(a.state.alpha, b.state.alpha) &&
         complex_eq(a.state.beta, b.state.beta) && a.lost == b.lost;
}

bool mat2_eq(const Mat2& a, const Mat2& b) {
  return complex_eq(a.m00, b.m00) && complex_eq(a.m01, b.m01) &&
         complex_eq(a.m10, b.m10) && complex_eq(a.m11, b.m11);
}

bool vec4_eq(const Vec4& a, const Vec4& b) {
  return complex_eq(a.a00, b.a00) && complex_eq(a.a01, b.a01) &&
         complex_eq(a.a10, b.a10) && complex_eq(a.a11, b.a11);
}

}  // namespace

bool EntanglementEntry::operator==(const EntanglementEntry& o) const {
  return pair_id == o.pair_id && slot_index == o.slot_index && side == o.side &&
         vec4_eq(epr_matrix, o.epr_matrix);
}

bool RegisterTransferPayload::operator==(const RegisterTransferPayload& o) const {
  if (register_id != o.register_id || qubits.size() != o.qubits.size() ||
      entanglements != o.entanglements) {
    return false;
  }
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (!qubit_eq(qubits[i], o.qubits[i])) return false;
  }
  return true;
}

bool MeasurementNoticePayload::operator==(const MeasurementNoticePayload& o) const {
  if (notice.pair_id != o.notice.pair_id ||
      notice.measured_side != o.notice.measured_side ||
      notice.outcome != o.notice.outcome ||
      notice.history.size() != o.notice.history.size()) {
    return false;
  }
  for (std::size_t i = 0; i < notice.history.size(); ++i) {
    if (!mat2_eq(notice.history[i], o.notice.history[i])) return false;
  }
  return true;
}

bool Envelope::operator==(const Envelope& o) const {
  return version == o.version && session_id == o.session_id && kind == o.kind &&
         payload == o.payload;
}

// ---------------------------------------------------------------------------
// Codec

namespace {

Json payload_to_json(const Envelope& env) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HelloPayload>) {
          return Json{{"node", p.node}};
        } else if constexpr (std::is_same_v<T, RegisterTransferPayload>) {
          Json qubits = Json::array();
          for (const Qubit& q : p.qubits) qubits.push_back(detail::qubit_to_json(q));
          Json ents = Json::array();
          for (const EntanglementEntry& e : p.entanglements) {
            ents.push_back(Json{{"pairId", e.pair_id},
                                {"slotIndex", e.slot_index},
                                {"side", side_name(e.side)},
                                {"eprMatrix", detail::vec4_to_json(e.epr_matrix)}});
          }
          return Json{{"registerId", p.register_id},
                      {"qubits", std::move(qubits)},
                      {"entanglements", std::move(ents)}};
        } else if constexpr (std::is_same_v<T, MeasurementNoticePayload>) {
          Json history = Json::array();
          for (const Mat2& g : p.notice.history) {
            history.push_back(detail::mat2_to_json(g));
          }
          return Json{{"pairId", p.notice.pair_id},
                      {"measuredSide", side_name(p.notice.measured_side)},
                      {"outcome", p.notice.outcome},
                      {"history", std::move(history)}};
        } else if constexpr (std::is_same_v<T, AckPayload>) {
          return Json::object();
        } else {
          return Json{{"code", p.code}, {"message", p.message}};
        }
      },
      env.payload);
}

Payload payload_from_json(MessageKind kind, const Json& j) {
  switch (kind) {
    case MessageKind::hello:
      return HelloPayload{detail::require_string(j, "node")};
    case MessageKind::register_transfer: {
      RegisterTransferPayload p;
      p.register_id = detail::require_u64(j, "registerId");
      for (const Json& q : detail::require_array(j, "qubits")) {
        p.qubits.push_back(detail::qubit_from_json(q));
      }
      for (const Json& e : detail::require_array(j, "entanglements")) {
        EntanglementEntry entry;
        entry.pair_id = detail::require_u64(e, "pairId");
        entry.slot_index =
            static_cast<std::uint32_t>(detail::require_u64(e, "slotIndex"));
        entry.side = side_from_name(detail::require_string(e, "side"));
        entry.epr_matrix = detail::vec4_from_json(
            detail::require_field(e, "eprMatrix"), "eprMatrix");
        p.entanglements.push_back(entry);
      }
      return p;
    }
    case MessageKind::measurement_notice: {
      MeasurementNoticePayload p;
      p.notice.pair_id = detail::require_u64(j, "pairId");
      p.notice.measured_side =
          side_from_name(detail::require_string(j, "measuredSide"));
      const std::uint64_t outcome = detail::require_u64(j, "outcome");
      if (outcome > 1) {
        throw DecodeError("outcome must be 0 or 1", std::string("outcome"));
      }
      p.notice.outcome = static_cast<int>(outcome);
      for (const Json& g : detail::require_array(j, "history")) {
        p.notice.history.push_back(detail::mat2_from_json(g, "history"));
      }
      return p;
    }
    case MessageKind::ack:
      if (!j.is_object()) {
        throw DecodeError("expected object", std::string("payload"));
      }
      return AckPayload{};
    case MessageKind::error:
      return ErrorPayload{detail::require_string(j, "code"),
                          detail::require_string(j, "message")};
  }
  throw DecodeError("unknown message kind", std::string("kind"));
}

}  // namespace

std::vector<std::uint8_t> encode(const Envelope& env) {
  Json j{{"version", env.version},
         {"sessionId", env.session_id.to_hex()},
         {"kind", kind_name(env.kind)},
         {"payload", payload_to_json(env)}};
  return detail::dump_bytes(j);
}

Envelope decode(std::span<const std::uint8_t> bytes) {
  const Json j = detail::parse_bytes(bytes);
  Envelope env;
  const Json& version = detail::require_field(j, "version");
  if (!version.is_number_integer()) {
    throw DecodeError("expected integer", std::string("version"));
  }
  env.version = version.get<int>();
  env.session_id = SessionId::from_hex(detail::require_string(j, "sessionId"));
  env.kind = kind_from_name(detail::require_string(j, "kind"));
  if (env.version < 1 ||
      (env.kind != MessageKind::hello && env.version != kProtocolVersion)) {
    throw DecodeError("unsupported protocol version " +
                          std::to_string(env.version),
                      std::string("version"));
  }
  env.payload = payload_from_json(env.kind, detail::require_field(j, "payload"));
  return env;
}

// ---------------------------------------------------------------------------
// Framing

void write_frame(ByteStream& stream, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxFrameBytes) {
    throw FramingError("frame payload of " + std::to_string(payload.size()) +
                       " bytes exceeds the 16 MiB cap");
  }
  const auto len = static_cast<std::uint32_t>(payload.size());
  std::uint8_t header[4] = {static_cast<std::uint8_t>(len >> 24),
                            static_cast<std::uint8_t>(len >> 16),
                            static_cast<std::uint8_t>(len >> 8),
                            static_cast<std::uint8_t>(len)};
  std::vector<std::uint8_t> frame;
  frame.reserve(4 + payload.size());
  frame.insert(frame.end(), header, header + 4);
  frame.insert(frame.end(), payload.begin(), payload.end());
  stream.write(frame);
}

namespace {

// Reads exactly out.size() bytes. Returns false on EOF before the first
// byte; throws FramingError on EOF mid-way.
bool read_exact(ByteStream& stream, std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const std::size_t n = stream.read_some(out.subspan(got));
    if (n == 0) {
      if (got == 0) return false;
      throw FramingError("stream truncated: got " + std::to_string(got) +
                         " of " + std::to_string(out.size()) + " bytes");
    }
    got += n;
  }
  return true;
}

}  // namespace

std::optional<std::vector<std::uint8_t>> read_frame(ByteStream& stream) {
  std::uint8_t header[4];
  if (!read_exact(stream, header)) {
    return std::nullopt;  // clean end of stream at a frame boundary
  }
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) |
                            (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) |
                            std::uint32_t{header[3]};
  if (len > kMaxFrameBytes) {
    throw FramingError("frame length prefix " + std::to_string(len) +
                       " exceeds the 16 MiB cap");
  }
  std::vector<std::uint8_t> payload(len);
  if (len > 0 && !read_exact(stream, payload)) {
    throw FramingError("stream truncated inside a frame");
  }
  return payload;
}

// ---------------------------------------------------------------------------
// Loopback transport

namespace {

// One direction of the loopback pipe: a byte queue with blocking reads.
struct LoopbackPipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool closed = false;

  void write(std::span<const std::uint8_t> data) {
    {
      std::lock_guard lock(mu);
      if (closed) throw TransportError("loopback pipe is closed");
      bytes.insert(bytes.end(), data.begin(), data.end());
    }
    cv.notify_all();
  }

  std::size_t read_some(std::span<std::uint8_t> out) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !bytes.empty() || closed; });
    if (bytes.empty()) return 0;  // closed and drained
    const std::size_t n = std::min(out.size(), bytes.size());
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = bytes.front();
      bytes.pop_front();
    }
    return n;
  }

  void close() {
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class LoopbackStream : public ByteStream {
 public:
  LoopbackStream(std::shared_ptr<LoopbackPipe> out,
                 std::shared_ptr<LoopbackPipe> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  ~LoopbackStream() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    out_->write(bytes);
  }

  std::size_t read_some(std::span<std::uint8_t> out) override {
    return in_->read_some(out);
  }

  void close() override {
    out_->close();
    in_->close();
  }

 private:
  std::shared_ptr<LoopbackPipe> out_;
  std::shared_ptr<LoopbackPipe> in_;
};

}  // namespace

std::pair<std::shared_ptr<ByteStream>, std::shared_ptr<ByteStream>>
loopback_transport() {
  auto a_to_b = std::make_shared<LoopbackPipe>();
  auto b_to_a = std::make_shared<LoopbackPipe>();
  return {std::make_shared<LoopbackStream>(a_to_b, b_to_a),
          std::make_shared<LoopbackStream>(b_to_a, a_to_b)};
}

// ---------------------------------------------------------------------------
// TCP transport

namespace {

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "localhost") {
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  } else if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw TransportError("cannot parse IPv4 address '" + host + "'");
  }
  return addr;
}

class TcpStream : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int flag = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof flag);
  }

  ~TcpStream() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n =
          ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send failed: ") +
                             std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::size_t read_some(std::span<std::uint8_t> out) override {
    while (true) {
      const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET || errno == EBADF) return 0;
      throw TransportError(std::string("recv failed: ") + std::strerror(errno));
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

}  // namespace

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) {
    throw TransportError(std::string("socket failed: ") + std::strerror(errno));
  }
  int flag = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &flag, sizeof flag);
  sockaddr_in addr = make_addr(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw TransportError("bind failed: " + err);
  }
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::listen(fd_, 8) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw TransportError("listen failed: " + err);
  }
}

TcpListener::~TcpListener() { close(); }

std::shared_ptr<ByteStream> TcpListener::accept() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) {
    throw TransportError(std::string("accept failed: ") + std::strerror(errno));
  }
  return std::make_shared<TcpStream>(fd);
}

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::shared_ptr<ByteStream> tcp_connect(const std::string& host,
                                        std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) {
    throw TransportError(std::string("socket failed: ") + std::strerror(errno));
  }
  sockaddr_in addr = make_addr(host, port);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw TransportError("connect failed: " + err);
  }
  return std::make_shared<TcpStream>(fd);
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& spec) {
  const std::size_t colon = spec.rfind(':');
  if (colon == std::string::npos || colon + 1 >= spec.size()) {
    throw ValidationError("expected HOST:PORT, got '" + spec + "'");
  }
  const std::string host = spec.substr(0, colon);
  const std::string port_str = spec.substr(colon + 1);
  std::uint16_t port = 0;
  auto [ptr, ec] =
      std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
  if (ec != std::errc{} || ptr != port_str.data() + port_str.size()) {
    throw ValidationError("cannot parse port '" + port_str + "'");
  }
  return {host, port};
}

}  // namespace qsimnet
