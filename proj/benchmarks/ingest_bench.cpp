// Copyright 2026 The Placescope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <string>

#include "placescope/ingest.hpp"

using namespace placescope;

namespace {

// Streams `original` posts of which `noise` fall outside the box.
void stream(benchmark::State& state, std::uint64_t original, std::uint64_t noise) {
  const LonLatBox box{-117.6, 32.5, -116.8, 33.3};
  for (auto _ : state) {
    ingest::NoiseFilter filter(box, {});
    ingest::GeoPost p;
    p.lat = 32.8;
    for (std::uint64_t i = 0; i < original; ++i) {
      p.id = std::to_string(600000000000000000ULL + i);
      p.lon = i < noise ? -118.0 : -117.1;
      filter.admit(p);
    }
    const auto report = filter.report();
    if (report.final_count != original - noise) state.SkipWithError("wrong final count");
    state.counters["noise_pct"] = report.noise_percentage;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(original));
}

void BM_NoiseFilterTwitterVolume(benchmark::State& state) {
  stream(state, 7'619'307, 864'477);
}
BENCHMARK(BM_NoiseFilterTwitterVolume)->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_NoiseFilterWeiboVolume(benchmark::State& state) {
  stream(state, 11'951'385, 0);
}
BENCHMARK(BM_NoiseFilterWeiboVolume)->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_ParsePost(benchmark::State& state) {
  const std::string line =
      R"({"id":"1","created_at":"2015-06-01T12:00:00Z","lon":-117.07,"lat":32.77,)"
      R"("text":"go aztecs at sdsu","source":"web"})";
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_post(line));
}
BENCHMARK(BM_ParsePost);

}  // namespace

BENCHMARK_MAIN();
