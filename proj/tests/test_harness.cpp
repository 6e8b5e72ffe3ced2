#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "phaselink/config.hpp"
#include "phaselink/errors.hpp"
#include "phaselink/harness.hpp"

using namespace phaselink;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

ScenarioConfig small_scenario(AttackKind kind, long trials, int pairs) {
  ScenarioConfig cfg = preset_config("default-5.1");
  cfg.attack.kind = kind;
  cfg.trials = trials;
  cfg.session.pairs_per_symbol = pairs;
  cfg.master_seed = 42;
  return cfg;
}

std::string temp_path(const char* name) {
  return std::string("/tmp/phaselink_test_") + name;
}

}  // namespace

TEST_CASE("windowed_sigma") {
  SUBCASE("constant records have zero sigma") {
    std::vector<double> values(100, 0.7);
    const auto [mean, sigma] = windowed_sigma(values, 50);
    CHECK(mean == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(sigma < 1e-12);
  }
  SUBCASE("100 records over 50 windows make blocks of 2") {
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) values.push_back(i < 50 ? 0.0 : 1.0);
    const auto [mean, sigma] = windowed_sigma(values, 50);
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-15));
    // 25 block means at 0 and 25 at 1: sd = sqrt(50/49 * 0.25).
    CHECK(sigma == doctest::Approx(std::sqrt(50.0 / 49.0 * 0.25)).epsilon(1e-12));
  }
  SUBCASE("remainder goes to the last block") {
    std::vector<double> values(103, 1.0);
    values[102] = 0.0;  // lands in the enlarged last block
    const auto [mean, sigma] = windowed_sigma(values, 50);
    CHECK(mean == doctest::Approx(102.0 / 103.0).epsilon(1e-12));
    CHECK(sigma > 0.0);
  }
  SUBCASE("coin-flip block sigma follows sqrt(p(1-p)/block)") {
    Rng rng(863);
    const double p = 0.3;
    std::vector<double> values;
    for (int i = 0; i < 10000; ++i) values.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
    const auto [mean, sigma] = windowed_sigma(values, 50);
    const double expected = std::sqrt(p * (1 - p) / 200.0);
    CHECK(std::abs(mean - p) < 3 * std::sqrt(p * (1 - p) / 10000.0));
    CHECK(sigma < 3 * expected);
    CHECK(sigma > expected / 3);
  }
  SUBCASE("fewer records than windows is an error") {
    std::vector<double> values(10, 1.0);
    CHECK_THROWS_AS(windowed_sigma(values, 50), std::invalid_argument);
  }
  SUBCASE("single window has undefined sigma") {
    std::vector<double> values(5, 2.0);
    const auto [mean, sigma] = windowed_sigma(values, 1);
    CHECK(mean == doctest::Approx(2.0));
    CHECK(std::isnan(sigma));
  }
}

TEST_CASE("scenario determinism across worker counts") {
  for (AttackKind kind : {AttackKind::None, AttackKind::InterceptResend}) {
    ScenarioConfig cfg = small_scenario(kind, 60, 400);

    cfg.workers = 1;
    const std::string serial_a = serialize_report(run_scenario(cfg));
    const std::string serial_b = serialize_report(run_scenario(cfg));
    CHECK(serial_a == serial_b);

    for (int workers : {4, 16}) {
      cfg.workers = workers;
      CHECK(serialize_report(run_scenario(cfg)) == serial_a);
    }

    // The OpenMP kernel and the plain serial loop agree record by record.
    cfg.workers = 0;
    const auto ser = run_trials_serial(cfg);
    const auto par = run_trials_parallel(cfg, 4);
    REQUIRE(ser.size() == par.size());
    auto same = [](double a, double b) {
      return a == b || (std::isnan(a) && std::isnan(b));
    };
    for (std::size_t i = 0; i < ser.size(); ++i) {
      CHECK(same(ser[i].phi_est, par[i].phi_est));
      CHECK(same(ser[i].visibility, par[i].visibility));
      CHECK(same(ser[i].state_fidelity, par[i].state_fidelity));
    }
  }
}

TEST_CASE("degenerate single-trial report") {
  ScenarioConfig cfg = small_scenario(AttackKind::None, 1, 400);
  cfg.workers = 1;
  const CampaignReport rep = run_scenario(cfg);
  REQUIRE(rep.trial_records.size() == 1);
  REQUIRE(rep.roles.size() == 1);
  CHECK(rep.roles[0].fidelity.mean ==
        doctest::Approx(rep.trial_records[0].state_fidelity).epsilon(1e-15));
  CHECK(std::isnan(rep.roles[0].fidelity.sigma));
  CHECK(std::isnan(rep.roles[0].accuracy[0].sigma));
}

TEST_CASE("blind-guesser accuracy calibrates to delta/pi") {
  // Synthetic role: uniform random estimates against uniform symbols.
  Rng rng(877);
  const PhaseAlphabet alpha(4);
  std::vector<TrialRecord> records;
  const long trials = 20000;
  for (long t = 0; t < trials; ++t) {
    TrialRecord r;
    r.trial_index = t;
    r.role = Role::Bob;
    r.phi_true = alpha.phase(static_cast<int>(rng.below(4)));
    r.phi_est = rng.uniform_angle();
    r.circular_error = circular_distance(r.phi_est, r.phi_true);
    records.push_back(r);
  }
  for (double delta : {0.012 * kPi, kPi / 16, kPi / 4}) {
    const double p = delta / kPi;
    const double acc = records_accuracy_at(records, Role::Bob, delta);
    CHECK(std::abs(acc - p) < 3 * std::sqrt(p * (1 - p) / trials));
  }
}

TEST_CASE("reported sigma shrinks like 1/sqrt(trials)") {
  ScenarioConfig small = small_scenario(AttackKind::None, 1000, 400);
  ScenarioConfig large = small_scenario(AttackKind::None, 10000, 400);
  const double sigma_small = run_scenario(small).roles[0].visibility.sigma;
  const double sigma_large = run_scenario(large).roles[0].visibility.sigma;
  // Block count is fixed at 50, so block means average 20 vs 200 trials:
  // sigma ratio should be near sqrt(10), within a factor of two.
  const double ratio = sigma_small / sigma_large;
  CHECK(ratio > std::sqrt(10.0) / 2);
  CHECK(ratio < std::sqrt(10.0) * 2);
}

TEST_CASE("report negativity equals the analytic channel-chain value") {
  ScenarioConfig cfg = small_scenario(AttackKind::None, 5, 400);
  cfg.session.noise.shield_dephasing_q = 0.1;
  const CampaignReport rep = run_scenario(cfg);
  const double direct = negativity(transmit(0.0, cfg.session));
  CHECK(std::abs(rep.negativity - direct) < 1e-9);
  // Independent closed form for this chain: (1-p)(1-2q) - p/2.
  const double p = cfg.session.noise.depolarizing_p;
  const double q = cfg.session.noise.shield_dephasing_q;
  CHECK(rep.negativity == doctest::Approx((1 - p) * (1 - 2 * q) - p / 2).epsilon(1e-9));
}

TEST_CASE("report round trip") {
  ScenarioConfig cfg = small_scenario(AttackKind::PassiveTap, 40, 400);
  const CampaignReport rep = run_scenario(cfg);
  const std::string text = serialize_report(rep);

  SUBCASE("save and load reproduce the bytes") {
    const std::string path = temp_path("roundtrip.report");
    persist_report(rep, path);
    const CampaignReport loaded = load_report(path);
    CHECK(serialize_report(loaded) == text);
    std::remove(path.c_str());
  }
  SUBCASE("truncated file fails with offset and field") {
    const std::string cut = text.substr(0, text.size() / 3);
    try {
      parse_report(cut);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(!e.field().empty());
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
  SUBCASE("unknown version is rejected") {
    std::string bad = text;
    bad.replace(bad.find("format_version = 1"), 18, "format_version = 99");
    try {
      parse_report(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
    }
  }
  SUBCASE("unknown header key is rejected") {
    std::string bad = text;
    bad.insert(bad.find("negativity"), "mystery_key = 3\n");
    CHECK_THROWS_AS(parse_report(bad), ParseError);
  }
  SUBCASE("trial dump columns") {
    const std::string dump = format_trial_dump(rep);
    CHECK(dump.rfind("trial\trole\tphi_true\tphi_est\tcirc_err\tfidelity\tflags\n",
                     0) == 0);
    // one line per record plus header
    const long lines = std::count(dump.begin(), dump.end(), '\n');
    CHECK(lines == static_cast<long>(rep.trial_records.size()) + 1);
  }
}

TEST_CASE("fringe visibility") {
  SUBCASE("noiseless fringe reaches full visibility") {
    ScenarioConfig cfg = preset_config("noiseless");
    Rng rng(881);
    const double vis = visibility_from_fringes(cfg, 4000, rng);
    CHECK(std::abs(vis - 1.0) < 2.0 / std::sqrt(4000.0));
  }
  SUBCASE("standard noise lands near (1-d)^2 (1-p)") {
    ScenarioConfig cfg = preset_config("default-5.1");
    Rng rng(883);
    const double vis = visibility_from_fringes(cfg, 40000, rng);
    const double expected = 0.9409 * 0.99;
    CHECK(std::abs(vis - expected) < 0.01);
  }
  SUBCASE("fixed-Z interception flattens the fringe") {
    ScenarioConfig cfg = preset_config("noiseless");
    cfg.attack.kind = AttackKind::InterceptResend;
    cfg.attack.basis_policy = BasisPolicy::FixedZ;
    Rng rng(887);
    CHECK(visibility_from_fringes(cfg, 20000, rng) <= 0.05);
  }
  SUBCASE("dead detectors raise no-signal") {
    ScenarioConfig cfg = preset_config("default-5.1");
    cfg.session.detector.efficiency = 0.0;
    Rng rng(907);
    CHECK_THROWS_AS(visibility_from_fringes(cfg, 500, rng), NoSignalError);
  }
}

TEST_CASE("scenario config validation happens before any trial") {
  ScenarioConfig cfg = small_scenario(AttackKind::None, 10, 400);
  cfg.window_deltas = {4.0};  // outside (0, pi]
  CHECK_THROWS_AS(run_scenario(cfg), std::invalid_argument);
  cfg = small_scenario(AttackKind::None, 0, 400);
  CHECK_THROWS_AS(run_scenario(cfg), std::invalid_argument);
}

TEST_CASE("eve roles are recorded for attack scenarios") {
  ScenarioConfig cfg = small_scenario(AttackKind::UniversalClone, 30, 400);
  const CampaignReport rep = run_scenario(cfg);
  REQUIRE(rep.roles.size() == 2);
  CHECK(role_name(rep.roles[0].role) == "Bob");
  CHECK(role_name(rep.roles[1].role) == "EveQuantum");
  CHECK(rep.trial_records.size() == 60);
  CHECK(rep.holevo_bits < 1e-9);
}
