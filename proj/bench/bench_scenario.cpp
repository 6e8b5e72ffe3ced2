// Compares the serial reference trial loop against the OpenMP kernel on
// one scenario per attack kind: wall time, speedup, and a record-level
// equality check between the two implementations.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phaselink/config.hpp"
#include "phaselink/harness.hpp"

using namespace phaselink;

namespace {

double time_once(const std::function<std::vector<TrialRecord>()>& fn,
                 std::vector<TrialRecord>* out) {
  const auto t0 = std::chrono::steady_clock::now();
  *out = fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool records_equal(const std::vector<TrialRecord>& a,
                   const std::vector<TrialRecord>& b) {
  if (a.size() != b.size()) return false;
  auto same = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i].phi_est, b[i].phi_est) ||
        !same(a[i].visibility, b[i].visibility) ||
        !same(a[i].state_fidelity, b[i].state_fidelity)) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  long trials = argc > 1 ? std::atol(argv[1]) : 2000;
  int max_workers = 4;
#ifdef _OPENMP
  max_workers = omp_get_max_threads();
#endif

  std::printf("trials per scenario: %ld, hardware workers: %d\n\n", trials,
              max_workers);
  std::printf("%-18s %10s %10s %8s %8s\n", "scenario", "serial[s]", "openmp[s]",
              "speedup", "equal");

  const std::pair<const char*, AttackKind> scenarios[] = {
      {"none", AttackKind::None},
      {"passive-tap", AttackKind::PassiveTap},
      {"intercept-resend", AttackKind::InterceptResend},
      {"universal-clone", AttackKind::UniversalClone},
  };

  for (const auto& [name, kind] : scenarios) {
    ScenarioConfig cfg = preset_config("default-5.1");
    cfg.attack.kind = kind;
    cfg.trials = trials;
    cfg.master_seed = 42;
    cfg.session.pairs_per_symbol = 2000;

    std::vector<TrialRecord> serial, parallel;
    const double t_serial = time_once([&] { return run_trials_serial(cfg); }, &serial);
    const double t_parallel =
        time_once([&] { return run_trials_parallel(cfg, max_workers); }, &parallel);
    std::printf("%-18s %10.3f %10.3f %7.2fx %8s\n", name, t_serial, t_parallel,
                t_serial / t_parallel, records_equal(serial, parallel) ? "yes" : "NO");
  }
  return 0;
}
