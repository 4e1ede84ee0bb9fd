#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qsimnet/entangle.hpp"
#include "qsimnet/register.hpp"

namespace qsimnet {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 16 * 1024 * 1024;

enum class MessageKind : std::uint8_t {
  hello,
  register_transfer,
  measurement_notice,
  ack,
  error,
};

const char* kind_name(MessageKind kind);

/// 128-bit session identifier, rendered on the wire as 32 hex digits.
struct SessionId {
  std::array<std::uint64_t, 2> words{};

  std::string to_hex() const;
  static SessionId from_hex(const std::string& hex);  // DecodeError on misuse
  bool operator==(const SessionId&) const = default;
};

struct HelloPayload {
  std::string node;
  bool operator==(const HelloPayload&) const = default;
};

struct EntanglementEntry {
  std::uint64_t pair_id = 0;
  std::uint32_t slot_index = 0;
  Side side = Side::A;
  Vec4 epr_matrix;
  bool operator==(const EntanglementEntry&) const;
};

struct RegisterTransferPayload {
  std::uint64_t register_id = 0;
  std::vector<Qubit> qubits;
  std::vector<EntanglementEntry> entanglements;
  bool operator==(const RegisterTransferPayload&) const;
};

struct MeasurementNoticePayload {
  MeasurementNotice notice;
  bool operator==(const MeasurementNoticePayload&) const;
};

struct AckPayload {
  bool operator==(const AckPayload&) const = default;
};

struct ErrorPayload {
  std::string code;
  std::string message;
  bool operator==(const ErrorPayload&) const = default;
};

// Machine-readable error codes used on the wire.
namespace error_code {
inline constexpr const char* unsupported_version = "unsupported_version";
inline constexpr const char* unknown_pair = "unknown_pair";
inline constexpr const char* stale_entanglement = "stale_entanglement";
inline constexpr const char* duplicate_register = "duplicate_register";
inline constexpr const char* invariant_violation = "invariant_violation";
inline constexpr const char* bad_request = "bad_request";
}  // namespace error_code

using Payload = std::variant<HelloPayload, RegisterTransferPayload,
                             MeasurementNoticePayload, AckPayload, ErrorPayload>;

struct Envelope {
  int version = kProtocolVersion;
  SessionId session_id;
  MessageKind kind = MessageKind::ack;
  Payload payload = AckPayload{};

  bool operator==(const Envelope&) const;
};

/// UTF-8 JSON encoding of the envelope with full round-trip number
/// precision; decode(encode(e)) is structurally equal to e. Unknown kinds or
/// versions are decode errors, never silently accepted -- except that a
/// HELLO decodes at any positive version so the handshake can inspect and
/// reject the peer's claimed version.
std::vector<std::uint8_t> encode(const Envelope& env);
Envelope decode(std::span<const std::uint8_t> bytes);

/// Byte stream the framing layer runs over. write() sends the whole buffer;
/// read_some() returns 0 only at end of stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
  virtual void close() = 0;
};

/// Frame = 4-byte big-endian unsigned payload length, then the payload.
/// Throws FramingError when the payload exceeds kMaxFrameBytes.
void write_frame(ByteStream& stream, std::span<const std::uint8_t> payload);

/// Reads one frame. Returns nullopt on a clean end of stream at a frame
/// boundary; throws FramingError on truncation or an oversized prefix.
std::optional<std::vector<std::uint8_t>> read_frame(ByteStream& stream);

/// Two in-process endpoints delivering bytes in FIFO order with no loss;
/// byte-identical to the socket path at the framing layer.
std::pair<std::shared_ptr<ByteStream>, std::shared_ptr<ByteStream>>
loopback_transport();

/// Listening TCP socket bound to host:port (port 0 picks an ephemeral port).
class TcpListener {
 public:
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::shared_ptr<ByteStream> accept();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::shared_ptr<ByteStream> tcp_connect(const std::string& host,
                                        std::uint16_t port);

/// "host:port" -> (host, port); ValidationError on misuse.
std::pair<std::string, std::uint16_t> parse_host_port(const std::string& spec);

}  // namespace qsimnet
