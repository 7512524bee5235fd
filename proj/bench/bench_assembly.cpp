// Serial reference vs OpenMP element kernels on annulus meshes.
// Argument: n_circum (n_radial = n_circum / 4).

#include <benchmark/benchmark.h>

#include <cstring>
#include <map>

#include "robin/assembly_kernels.hpp"

using namespace robin;
using Elements = std::vector<kernels::ElementMatrix>;
using Kernel = Elements (*)(const TriMesh&);

namespace {

const TriMesh& mesh_for(int n) {
  static std::map<int, TriMesh> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_annulus_mesh(1.0, 2.0, n, n / 4)).first;
  return it->second;
}

void run(benchmark::State& state, Kernel kernel, Kernel reference) {
  const TriMesh& mesh = mesh_for(static_cast<int>(state.range(0)));
  const Elements ref = reference(mesh);
  const Elements out = kernel(mesh);
  if (std::memcmp(ref.data(), out.data(), ref.size() * sizeof(ref[0])) != 0) {
    state.SkipWithError("kernel output differs from the serial reference");
    return;
  }
  for (auto _ : state) {
    Elements e = kernel(mesh);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.num_triangles()));
  state.counters["triangles"] = static_cast<double>(mesh.num_triangles());
}

void BM_StiffnessSerial(benchmark::State& s) {
  run(s, kernels::stiffness_elements_serial, kernels::stiffness_elements_serial);
}
void BM_StiffnessOmp(benchmark::State& s) { run(s, kernels::stiffness_elements_omp, kernels::stiffness_elements_serial); }
void BM_MassSerial(benchmark::State& s) { run(s, kernels::mass_elements_serial, kernels::mass_elements_serial); }
void BM_MassOmp(benchmark::State& s) { run(s, kernels::mass_elements_omp, kernels::mass_elements_serial); }

}  // namespace

BENCHMARK(BM_StiffnessSerial)->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_StiffnessOmp)->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_MassSerial)->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_MassOmp)->RangeMultiplier(2)->Range(64, 512);

BENCHMARK_MAIN();
