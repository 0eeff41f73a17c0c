#include <benchmark/benchmark.h>

#include <random>

#include "fpshield/farble.h"
#include "fpshield/fpd.h"
#include "fpshield/keyrand.h"
#include "fpshield/nbs.h"
#include "fpshield/origin_context.h"
#include "fpshield/sensorsim.h"
#include "fpshield/timeshield.h"

using namespace fpshield;

namespace {

OriginContext context() {
  return OriginContext(keyrand::SessionKey(std::array<uint8_t, 32>{}),
                       Origin::parse("https://a.example"));
}

void BM_FarbleBitmap(benchmark::State& state) {
  auto side = static_cast<uint32_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<uint8_t> data(std::size_t{side} * side * 4);
  for (auto& b : data) b = static_cast<uint8_t>(rng());
  farble::BitmapBuffer in(side, side, std::move(data));
  auto seed = context().seed(keyrand::tags::kCanvas);
  for (auto _ : state) benchmark::DoNotOptimize(farble::farble_bitmap(seed, in));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(in.data.size()));
}
BENCHMARK(BM_FarbleBitmap)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_FarbleAudio(benchmark::State& state) {
  farble::AudioSamples in;
  in.sample_rate = 44100;
  in.channels.assign(1, std::vector<double>(static_cast<std::size_t>(state.range(0))));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& s : in.channels[0]) s = u(rng);
  auto seed = context().seed(keyrand::tags::kAudio);
  for (auto _ : state) benchmark::DoNotOptimize(farble::farble_audio(seed, in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FarbleAudio)->Arg(1024)->Arg(44100);

void BM_ShieldTimestamp(benchmark::State& state) {
  auto seed = context().seed(keyrand::tags::kTime);
  double t = 0;
  for (auto _ : state) {
    t += 0.37;
    benchmark::DoNotOptimize(timeshield::shield_timestamp(seed, t, {10, true}));
  }
}
BENCHMARK(BM_ShieldTimestamp);

void BM_SensorSample(benchmark::State& state) {
  auto s = context().device_state();
  double t = 0;
  for (auto _ : state) {
    t += 100;
    benchmark::DoNotOptimize(
        sensors::sample(s, sensors::SensorKind::kMagnetometer, t));
  }
}
BENCHMARK(BM_SensorSample);

void BM_FpdEvaluate(benchmark::State& state) {
  fpd::Trace trace;
  const auto& cfg = fpd::FpdConfig::shipped();
  for (const char* ep : {"HTMLCanvasElement.prototype.toDataURL",
                         "CanvasRenderingContext2D.prototype.fillText",
                         "navigator.userAgent", "navigator.platform",
                         "BaseAudioContext.prototype.createOscillator",
                         "AudioBuffer.prototype.getChannelData"})
    trace.events.push_back({0, ep, 3});
  auto st = fpd::replay(trace);
  for (auto _ : state) benchmark::DoNotOptimize(fpd::evaluate(st, cfg));
}
BENCHMARK(BM_FpdEvaluate);

void BM_NbsDecide(benchmark::State& state) {
  nbs::LearnCache cache;
  auto ip = nbs::IpAddress::parse("192.168.1.20");
  for (auto _ : state)
    benchmark::DoNotOptimize(nbs::decide(nbs::Mode::kPreResolve,
                                         nbs::AddressClass::kPublic,
                                         "printer.local", ip, cache));
}
BENCHMARK(BM_NbsDecide);

}  // namespace
BENCHMARK_MAIN();
