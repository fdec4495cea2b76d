#include <benchmark/benchmark.h>

#include "aclrisk/ahp.hpp"
#include "aclrisk/assessment.hpp"
#include "aclrisk/ingest.hpp"
#include "aclrisk/kinematics.hpp"
#include "aclrisk/motion_synth.hpp"
#include "aclrisk/preprocess.hpp"

namespace {

aclrisk::SyntheticTrial trial(std::size_t frames) {
  aclrisk::MotionScript s;
  s.n_frames = frames;
  s.touchdown_frame = frames / 5;
  s.peak_knee_flexion_deg = 70.0;
  s.peak_hip_flexion_deg = 55.0;
  s.peak_lateral_lean_deg = 15.0;
  s.noise_sigma_px = 1.0;
  return aclrisk::generate(s);
}

void BM_ExtractSagittal(benchmark::State& state) {
  const auto t = trial(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aclrisk::extract_sagittal(t.sagittal));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractSagittal)->Arg(300)->Arg(3000);

void BM_ExtractFrontal(benchmark::State& state) {
  const auto t = trial(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aclrisk::extract_frontal(t.frontal));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractFrontal)->Arg(300)->Arg(3000);

void BM_Preprocess(benchmark::State& state) {
  auto t = trial(300);
  for (std::size_t i = 10; i < 300; i += 7) {
    t.frontal.frames[i].missing[aclrisk::body25::kLeftKnee] = true;
  }
  for (auto _ : state) benchmark::DoNotOptimize(aclrisk::preprocess(t.frontal));
}
BENCHMARK(BM_Preprocess);

void BM_AhpIndexMatrix(benchmark::State& state) {
  const auto m = aclrisk::presets::index_matrix();
  for (auto _ : state) {
    const auto w = aclrisk::weights_sum_method(m);
    benchmark::DoNotOptimize(aclrisk::consistency(m, w));
  }
}
BENCHMARK(BM_AhpIndexMatrix);

void BM_AssessSeries(benchmark::State& state) {
  const auto t = trial(300);
  const aclrisk::RunConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(aclrisk::assess_series(t.sagittal, t.frontal, config));
}
BENCHMARK(BM_AssessSeries);

void BM_ParseSeriesCsv(benchmark::State& state) {
  const auto text = aclrisk::format_series_csv(trial(300).sagittal);
  for (auto _ : state) benchmark::DoNotOptimize(aclrisk::parse_series_csv(text, aclrisk::View::Sagittal));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseSeriesCsv);

}  // namespace

BENCHMARK_MAIN();
