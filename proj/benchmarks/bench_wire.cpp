#include <benchmark/benchmark.h>

#include "qsimnet/wire.hpp"

using namespace qsimnet;

namespace {

Envelope notice_envelope() {
  Envelope env;
  env.session_id = SessionId{{1, 2}};
  env.kind = MessageKind::measurement_notice;
  MeasurementNoticePayload p;
  p.notice.pair_id = 7;
  p.notice.measured_side = Side::A;
  p.notice.outcome = 1;
  p.notice.history = {gates::sigma_x(), gates::ry(0.5)};
  env.payload = p;
  return env;
}

}  // namespace

static void BM_Encode(benchmark::State& state) {
  const Envelope env = notice_envelope();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(env));
  }
}
BENCHMARK(BM_Encode);

static void BM_Decode(benchmark::State& state) {
  const auto bytes = encode(notice_envelope());
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(bytes));
  }
}
BENCHMARK(BM_Decode);

static void BM_LoopbackFrame(benchmark::State& state) {
  auto [a, b] = loopback_transport();
  const std::vector<std::uint8_t> payload(256, 0x42);
  for (auto _ : state) {
    write_frame(*a, payload);
    benchmark::DoNotOptimize(read_frame(*b));
  }
}
BENCHMARK(BM_LoopbackFrame);
