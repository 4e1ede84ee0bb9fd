#include <doctest.h>

#include <string>
#include <thread>

#include "qsimnet/wire.hpp"
#include "test_support.hpp"

using namespace qsimnet;

namespace {

SessionId test_sid() { return SessionId{{0x1234, 0xabcd}}; }

Envelope random_envelope(RandomSource& rng) {
  Envelope env;
  env.session_id = SessionId{{rng.next_u64(), rng.next_u64()}};
  switch (rng.next_index(5)) {
    case 0:
      env.kind = MessageKind::hello;
      env.payload = HelloPayload{"node-" + std::to_string(rng.next_index(100))};
      break;
    case 1: {
      env.kind = MessageKind::register_transfer;
      RegisterTransferPayload p;
      p.register_id = rng.next_u64();
      const std::size_t n = 1 + rng.next_index(4);
      for (std::size_t i = 0; i < n; ++i) {
        p.qubits.push_back(
            Qubit{qsimnet::testing::random_state(rng), rng.next_bit() == 1});
      }
      if (rng.next_bit()) {
        p.entanglements.push_back(EntanglementEntry{
            rng.next_u64(), static_cast<std::uint32_t>(rng.next_index(n)),
            rng.next_bit() ? Side::B : Side::A, bell::phi_plus()});
      }
      env.payload = std::move(p);
      break;
    }
    case 2: {
      env.kind = MessageKind::measurement_notice;
      MeasurementNoticePayload p;
      p.notice.pair_id = rng.next_u64();
      p.notice.measured_side = rng.next_bit() ? Side::B : Side::A;
      p.notice.outcome = rng.next_bit();
      const std::size_t n = rng.next_index(4);
      for (std::size_t i = 0; i < n; ++i) {
        p.notice.history.push_back(qsimnet::testing::random_gate(rng));
      }
      env.payload = std::move(p);
      break;
    }
    case 3:
      env.kind = MessageKind::ack;
      env.payload = AckPayload{};
      break;
    default:
      env.kind = MessageKind::error;
      env.payload = ErrorPayload{"stale_entanglement", "duplicate notice"};
      break;
  }
  return env;
}

}  // namespace

TEST_CASE("ACK envelope round trips") {
  Envelope env;
  env.session_id = test_sid();
  env.kind = MessageKind::ack;
  const Envelope back = decode(encode(env));
  CHECK(back == env);
}

TEST_CASE("measurement notice serializes sigma-x history canonically") {
  Envelope env;
  env.session_id = test_sid();
  env.kind = MessageKind::measurement_notice;
  MeasurementNoticePayload p;
  p.notice.pair_id = 9;
  p.notice.measured_side = Side::A;
  p.notice.outcome = 1;
  p.notice.history = {gates::sigma_x()};
  env.payload = p;

  const std::vector<std::uint8_t> bytes = encode(env);
  const std::string text(bytes.begin(), bytes.end());
  // Row-major [re, im] pairs: sigma-x is [[0,1],[1,0]].
  CHECK(text.find("\"history\":[[[0.0,0.0],[1.0,0.0],[1.0,0.0],[0.0,0.0]]]")
            != std::string::npos);

  const Envelope back = decode(bytes);
  CHECK(back == env);
}

TEST_CASE("codec totality: random envelopes round trip (10^4 cases)") {
  RandomSource rng(61);
  for (int i = 0; i < 10000; ++i) {
    const Envelope env = random_envelope(rng);
    const Envelope back = decode(encode(env));
    CHECK(back == env);
  }
}

TEST_CASE("decode rejects unknown kinds and versions") {
  const auto bytes_of = [](const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
  };
  const std::string sid(32, '0');

  CHECK_THROWS_AS(
      decode(bytes_of(R"({"version":1,"sessionId":")" + sid +
                      R"(","kind":"NONSENSE","payload":{}})")),
      DecodeError);
  // Unknown version on a non-HELLO kind is rejected at decode.
  CHECK_THROWS_AS(
      decode(bytes_of(R"({"version":9,"sessionId":")" + sid +
                      R"(","kind":"ACK","payload":{}})")),
      DecodeError);
  // HELLO decodes at any positive version so the handshake can reject it.
  const Envelope hello =
      decode(bytes_of(R"({"version":99,"sessionId":")" + sid +
                      R"(","kind":"HELLO","payload":{"node":"x"}})"));
  CHECK(hello.version == 99);
  // Missing fields name the field.
  try {
    (void)decode(bytes_of(R"({"version":1,"sessionId":")" + sid +
                          R"(","kind":"ERROR","payload":{"code":"x"}})"));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.field() == "message");
  }
}

TEST_CASE("framing: length prefix and payload round trip") {
  auto [a, b] = loopback_transport();
  const std::string text = "paired-qubit frame";
  write_frame(*a, std::vector<std::uint8_t>(text.begin(), text.end()));
  const auto frame = read_frame(*b);
  REQUIRE(frame.has_value());
  CHECK(std::string(frame->begin(), frame->end()) == text);
}

TEST_CASE("framing: truncated frame raises a framing error") {
  auto [a, b] = loopback_transport();
  // Length prefix of 100 with only 50 payload bytes available.
  const std::uint8_t header[4] = {0, 0, 0, 100};
  a->write(header);
  a->write(std::vector<std::uint8_t>(50, 0x7f));
  a->close();
  CHECK_THROWS_AS(read_frame(*b), FramingError);
}

TEST_CASE("framing: oversized length prefix is rejected") {
  auto [a, b] = loopback_transport();
  const std::uint8_t header[4] = {0x7f, 0xff, 0xff, 0xff};
  a->write(header);
  CHECK_THROWS_AS(read_frame(*b), FramingError);

  std::vector<std::uint8_t> oversized(kMaxFrameBytes + 1);
  CHECK_THROWS_AS(write_frame(*a, oversized), FramingError);
}

TEST_CASE("loopback: frames arrive intact, in order, bidirectionally") {
  auto [a, b] = loopback_transport();
  for (int i = 0; i < 32; ++i) {
    const std::string right = "a->b " + std::to_string(i);
    const std::string left = "b->a " + std::to_string(i);
    write_frame(*a, std::vector<std::uint8_t>(right.begin(), right.end()));
    write_frame(*b, std::vector<std::uint8_t>(left.begin(), left.end()));
  }
  for (int i = 0; i < 32; ++i) {
    const auto from_a = read_frame(*b);
    const auto from_b = read_frame(*a);
    REQUIRE(from_a.has_value());
    REQUIRE(from_b.has_value());
    CHECK(std::string(from_a->begin(), from_a->end()) ==
          "a->b " + std::to_string(i));
    CHECK(std::string(from_b->begin(), from_b->end()) ==
          "b->a " + std::to_string(i));
  }
}

TEST_CASE("loopback: 10^4 frames round trip with zero loss") {
  auto [a, b] = loopback_transport();
  const int count = 10000;
  std::thread producer([&] {
    for (int i = 0; i < count; ++i) {
      const std::string payload = std::to_string(i);
      write_frame(*a, std::vector<std::uint8_t>(payload.begin(), payload.end()));
    }
  });
  int received = 0;
  for (int i = 0; i < count; ++i) {
    const auto frame = read_frame(*b);
    REQUIRE(frame.has_value());
    CHECK(std::string(frame->begin(), frame->end()) == std::to_string(i));
    ++received;
  }
  producer.join();
  CHECK(received == count);
}

TEST_CASE("clean close yields end-of-stream, not an error") {
  auto [a, b] = loopback_transport();
  const std::vector<std::uint8_t> payload{1, 2, 3};
  write_frame(*a, payload);
  a->close();
  CHECK(read_frame(*b).has_value());
  CHECK_FALSE(read_frame(*b).has_value());
}

TEST_CASE("tcp transport carries frames like the loopback") {
  TcpListener listener("127.0.0.1", 0);
  std::shared_ptr<ByteStream> server;
  std::thread acceptor([&] { server = listener.accept(); });
  auto client = tcp_connect("127.0.0.1", listener.port());
  acceptor.join();

  const std::string text = "socket frame";
  write_frame(*client, std::vector<std::uint8_t>(text.begin(), text.end()));
  const auto frame = read_frame(*server);
  REQUIRE(frame.has_value());
  CHECK(std::string(frame->begin(), frame->end()) == text);

  write_frame(*server, *frame);
  const auto echo = read_frame(*client);
  REQUIRE(echo.has_value());
  CHECK(std::string(echo->begin(), echo->end()) == text);
}

TEST_CASE("parse_host_port") {
  const auto [host, port] = parse_host_port("127.0.0.1:4040");
  CHECK(host == "127.0.0.1");
  CHECK(port == 4040);
  CHECK_THROWS_AS(parse_host_port("nonsense"), ValidationError);
  CHECK_THROWS_AS(parse_host_port("host:"), ValidationError);
}

TEST_CASE("session ids render as 32 hex digits") {
  const SessionId id{{0xdeadbeef, 0x1}};
  CHECK(id.to_hex() == "00000000deadbeef0000000000000001");
  CHECK(SessionId::from_hex(id.to_hex()) == id);
  CHECK_THROWS_AS(SessionId::from_hex("xyz"), DecodeError);
}
