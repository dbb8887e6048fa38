// Throughput of the parallel kernels against their serial references.
// Every pair is checked for identical output before timings are reported.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "oee/complexity.hpp"
#include "oee/eca.hpp"
#include "oee/ensemble.hpp"
#include "oee/rng.hpp"

namespace {

using namespace oee;

double seconds(const std::function<void()>& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-34s serial %9.3f s   parallel %9.3f s   speedup %5.2fx   %s\n", name, serial, parallel, serial / parallel,
              same ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial versus OpenMP kernels"};
  int threads = omp_get_max_threads();
  std::uint64_t samples = 20'000;
  app.add_option("--threads", threads, "Workers for the parallel runs")->capture_default_str();
  app.add_option("--samples", samples, "Executions per ensemble")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  std::printf("workers: %d (hardware reports %d processors)\n", threads, omp_get_num_procs());
  bool ok = true;

  for (Variant v : {Variant::CaseI, Variant::CaseII, Variant::CaseIII}) {
    SamplePlan plan;
    plan.variant = v;
    plan.w_o = 5;
    if (v == Variant::CaseI) plan.w_e = 5;
    plan.samples = samples;
    plan.complexity = true;
    plan.norm.samples = 200;
    plan.norm.steps = 4096;
    NormCache cache;
    cache.get(plan_norm_params(plan), threads);  // keep the normaliser out of the ensemble timing
    std::vector<ExecutionRecord> a, b;
    run_ensemble_serial(plan, &cache);  // untimed warm-up (allocator, page faults)
    const double ts = seconds([&] { a = run_ensemble_serial(plan, &cache); });
    const double tp = seconds([&] { b = run_ensemble(plan, threads, &cache); });
    ok = ok && a == b;
    row(("ensemble " + std::string(to_string(v)) + " w_o=5").c_str(), ts, tp, a == b);
  }

  {
    NormParams p{12, 400, 16'384, 1};
    std::uint64_t a = 0, b = 0;
    const double ts = seconds([&] { a = normalization_constant_serial(p); });
    const double tp = seconds([&] { b = normalization_constant(p, threads); });
    ok = ok && a == b;
    row("normalisation w=12", ts, tp, a == b);
  }

  {
    // Packed word stepping against the per-cell table lookup.
    constexpr int kSteps = 2'000'000;
    const RuleTable r = rule_from_number(110);
    BitState packed(0x5DEECE66Dull & BitState::mask_for(48), 48);
    WideState wide = to_wide(packed);
    const double tw = seconds([&] {
      for (int i = 0; i < kSteps; ++i) wide = step_reference(r, wide);
    });
    const double tb = seconds([&] {
      for (int i = 0; i < kSteps; ++i) packed = step(r, packed);
    });
    const bool same = to_wide(packed) == wide;
    ok = ok && same;
    std::printf("%-34s reference %6.3f s   packed %9.3f s   speedup %5.2fx   %s\n", "step rule 110 w=48 x2e6", tw, tb, tw / tb,
                same ? "outputs identical" : "OUTPUTS DIFFER");
  }
  return ok ? 0 : 1;
}
