#include "cpv/aeb.hpp"
#include "cpv/eval.hpp"
#include "cpv/parser.hpp"
#include "cpv/printer.hpp"

#include <doctest.h>

using namespace cpv;
using namespace cpv::aeb;

TEST_CASE("p_buffer_dist: pinned values from the declared formula") {
  CHECK(p_buffer_dist(Rat(0)) == Rat(28, 5));  // 5.6
  // speed 1.0: 5.1 + 1.5 + 0.6 = 7.2
  CHECK(p_buffer_dist(Rat(1)) == Rat(36, 5));
  // speed 5.4: 5.1 + 5.9 + (5.0 + 4.1 + 3.2 + 2.3 + 1.4 + 0.5) = 27.5
  CHECK(p_buffer_dist(Rat(27, 5)) == Rat(55, 2));
}

TEST_CASE("throttle safety filter thresholds") {
  CHECK(throttle_safety_filter(Rat(20), Rat(0), Rat(3, 4)) == Rat(3, 4));
  CHECK(throttle_safety_filter(Rat(101, 20), Rat(0), Rat(3, 4)) == Rat(-1));  // 5.05 <= 5.7
  CHECK(throttle_safety_filter(Rat(57, 10), Rat(0), Rat(1)) == Rat(-1));      // boundary
  CHECK(throttle_safety_filter(Rat(571, 100), Rat(0), Rat(1)) == Rat(1));     // just above
}

TEST_CASE("actuator dynamics") {
  CHECK(actuator_next_speed(Rat(-1), Rat(1, 2)) == Rat(0));
  CHECK(actuator_next_speed(Rat(-1), Rat(3)) == Rat(21, 10));
  CHECK(actuator_next_speed(Rat(1), Rat(27, 5)) == Rat(27, 5));
  CHECK(actuator_next_speed(Rat(1), Rat(0)) == Rat(1, 2));
  CHECK(actuator_next_speed(Rat(-1, 2), Rat(1)) == Rat(3, 4));
}

TEST_CASE("radar sensor: in-band region and failure rate at width 1.3") {
  // Width at or above 1.8 is always in-band, including the boundary.
  CounterRng rng(404, 0);
  for (int i = 0; i < 2000; ++i) {
    Rat fail = rng.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat off = rng.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat band = rng.uniform_rat(Rat(-1), Rat(1), 2000000);
    Rat r20 = radar_reading(Rat(30), Rat(2), fail, off, band);
    CHECK(rat_abs(r20 - Rat(30)) <= Rat(1, 10));
    Rat r18 = radar_reading(Rat(30), Rat(9, 5), fail, off, band);
    CHECK(rat_abs(r18 - Rat(30)) <= Rat(1, 10));
  }

  // Declared failure curve: f(1.3) = 0.6 * 0.5 = 0.30.
  CHECK(radar_failure_probability(Rat(13, 10)) == Rat(3, 10));
  std::uint64_t failures = 0;
  const std::uint64_t draws = 100000;
  CounterRng rng2(405, 1);
  for (std::uint64_t i = 0; i < draws; ++i) {
    Rat fail = rng2.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat off = rng2.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat band = rng2.uniform_rat(Rat(-1), Rat(1), 2000000);
    Rat reading = radar_reading(Rat(30), Rat(13, 10), fail, off, band);
    if (rat_abs(reading - Rat(30)) > Rat(1, 10)) {
      ++failures;
      CHECK(reading >= Rat(31));  // too-high offset in [1, 10]
      CHECK(reading <= Rat(40));
    }
  }
  double rate = static_cast<double>(failures) / static_cast<double>(draws);
  CHECK(rate == doctest::Approx(0.30).epsilon(0.034));
}

TEST_CASE("laser sensor: weather regions, failure rates, zero clamp") {
  CounterRng rng(406, 0);
  std::uint64_t snow_failures = 0;
  const std::uint64_t draws = 100000;
  for (std::uint64_t i = 0; i < draws; ++i) {
    Rat fail = rng.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat off = rng.uniform_rat(Rat(0), Rat(1), 1000000);
    Rat band = rng.uniform_rat(Rat(-1), Rat(1), 2000000);
    CHECK(rat_abs(laser_reading(Rat(30), Rat(0), fail, off, band) - Rat(30)) <= Rat(1, 10));
    CHECK(rat_abs(laser_reading(Rat(30), Rat(1), fail, off, band) - Rat(30)) <= Rat(1, 10));
    Rat snow = laser_reading(Rat(30), Rat(3), fail, off, band);
    if (rat_abs(snow - Rat(30)) > Rat(1, 10)) {
      ++snow_failures;
      CHECK(snow >= Rat(0));
      CHECK(snow <= Rat(29));  // too-small band [0, true-1]
    }
  }
  double rate = static_cast<double>(snow_failures) / static_cast<double>(draws);
  CHECK(rate == doctest::Approx(0.40).epsilon(0.025));

  // Failure clamp at zero distance.
  CHECK(laser_reading(Rat(0), Rat(3), Rat(0), Rat(1, 2), Rat(0)) == Rat(0));
}

TEST_CASE("camera sensor: unbiased with sigma 0.04, clamped at zero") {
  CounterRng rng(407, 0);
  double sum = 0.0, sumsq = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    Rat noise = rng.gaussian_rat(0.04);
    double n = rat_to_double(noise);
    sum += n;
    sumsq += n * n;
  }
  double mean = sum / draws;
  double sigma = std::sqrt(sumsq / draws - mean * mean);
  CHECK(std::abs(mean) < 0.001);
  CHECK(sigma == doctest::Approx(0.04).epsilon(0.025));
  CHECK(camera_reading(Rat(0), Rat(-5)) == Rat(0));
}

TEST_CASE("contract catalog parses and re-renders identically") {
  auto catalog = build_contract_catalog();
  CHECK(catalog.size() >= 11);
  for (const auto& [name, contract] : catalog) {
    CAPTURE(name);
    std::string a = render_formula(*contract.assumptions);
    std::string g = render_formula(*contract.guarantees);
    CHECK(render_formula(*parse_formula(a)) == a);
    CHECK(render_formula(*parse_formula(g)) == g);
    for (const auto& v : formula_vars(*contract.assumptions)) {
      CHECK(contract.signature.count(v) == 1);
    }
  }
  CHECK(render_formula(*catalog.at("Accurate Speed").guarantees) ==
        "always ((speed) == (self.speed))");
  CHECK(render_formula(*catalog.at("Keeps Distance").guarantees) ==
        "always ((lead_dist) > (5))");
}

TEST_CASE("known and unknown assumptions partition the scene envelope") {
  auto catalog = build_contract_catalog();
  const Contract& known = catalog.at("Accurate Distance Known");
  const Contract& unknown = catalog.at("Accurate Distance Unknown");
  for (int weather = 0; weather < 4; ++weather) {
    for (int w10 = 12; w10 <= 32; ++w10) {
      Trace probe = trace_from_env_steps(
          {{{"params['weather']", Rat(weather)}, {"params['lead_car_width']", Rat(w10, 10)}}});
      bool in_known = trace_satisfies(*known.assumptions, probe);
      bool in_unknown = trace_satisfies(*unknown.assumptions, probe);
      CAPTURE(weather);
      CAPTURE(w10);
      CHECK(in_known != in_unknown);
    }
  }
}

TEST_CASE("scene sampling: rejection of close starts, determinism") {
  Scenario sc = make_scenario();
  std::uint64_t rejected = 0, accepted = 0;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    CounterRng rng(12, i);
    auto scene = sample_scene(sc, rng);
    if (!scene) {
      ++rejected;
      continue;
    }
    ++accepted;
    CHECK(scene->vars.at("lead_dist") > Rat(10));
    CHECK(scene->vars.at("self.speed") == Rat(0));
    Rat w = scene->vars.at("params['weather']");
    CHECK(w >= Rat(0));
    CHECK(w <= Rat(3));
  }
  CHECK(rejected > 50);  // about 7% of draws start at or below the buffer
  CHECK(accepted > 2500);

  CounterRng a(99, 5), b(99, 5);
  auto s1 = sample_scene(sc, a);
  auto s2 = sample_scene(sc, b);
  REQUIRE(s1.has_value() == s2.has_value());
  if (s1) CHECK(s1->vars == s2->vars);
}

TEST_CASE("traces respect every envelope assumption of the catalog") {
  Scenario sc = make_scenario();
  Component car = make_car();
  auto catalog = build_contract_catalog();
  const Contract& keeps = catalog.at("Keeps Distance");

  std::uint64_t checked = 0;
  for (std::uint64_t i = 0; i < 1000 && checked < 600; ++i) {
    CounterRng rng(2024, i);
    auto scene = sample_scene(sc, rng);
    if (!scene) continue;
    Trace tau = run_trace(*scene, sc, car, rng);
    ++checked;
    CAPTURE(i);
    CHECK(trace_satisfies(*keeps.assumptions, tau));

    // Scene variables stay constant along the trace.
    for (const auto& step : tau.steps) {
      CHECK(step.env.vars.at("params['weather']") == tau.steps[0].env.vars.at("params['weather']"));
      CHECK(step.env.vars.at("params['lead_car_width']") ==
            tau.steps[0].env.vars.at("params['lead_car_width']"));
    }
    // Only the final state may be terminal.
    for (std::size_t t = 0; t + 1 < tau.length(); ++t) {
      CHECK(!tau.steps[t].env.terminal);
    }
  }
  CHECK(checked >= 600);
}

TEST_CASE("fixed seed reproduces the trace bit-for-bit") {
  Scenario sc = make_scenario();
  Component car = make_car();
  CounterRng r1(31415, 9), r2(31415, 9);
  auto s1 = sample_scene(sc, r1);
  auto s2 = sample_scene(sc, r2);
  REQUIRE(s1);
  Trace t1 = run_trace(*s1, sc, car, r1);
  Trace t2 = run_trace(*s2, sc, car, r2);
  REQUIRE(t1.length() == t2.length());
  for (std::size_t i = 0; i < t1.length(); ++i) {
    CHECK(t1.steps[i].env.vars == t2.steps[i].env.vars);
    CHECK(t1.steps[i].value.ports == t2.steps[i].value.ports);
  }
}

TEST_CASE("median rescue on logged traces: two in-band sensors keep perception in-band") {
  Scenario sc = make_scenario();
  Component car = make_car();
  std::uint64_t checked_steps = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(5050, i);
    auto scene = sample_scene(sc, rng);
    if (!scene) continue;
    Trace tau = run_trace(*scene, sc, car, rng);
    for (const auto& step : tau.steps) {
      const Rat& truth = step.env.vars.at("lead_dist");
      int in_band = 0;
      for (const char* port : {"dist1", "dist2", "dist3"}) {
        if (rat_abs(step.value.ports.at(port) - truth) <= Rat(1, 10)) ++in_band;
      }
      if (in_band >= 2) {
        ++checked_steps;
        CHECK(rat_abs(step.value.ports.at("dist") - truth) <= Rat(1, 10));
      }
    }
  }
  CHECK(checked_steps > 5000);
}

TEST_CASE("certificates: median, rescue lemma, filter, known region all check") {
  ExhaustiveGridChecker checker;
  for (auto factory : {median_certificate, median_rescue_certificate, filter_certificate}) {
    OwnedCertificate cert = factory();
    CheckResult res = checker.check(cert.certificate, cert.target);
    CAPTURE(cert.certificate.id);
    CAPTURE(res.diagnostic);
    CHECK(res.accepted);
  }
  OwnedCertificate known = known_region_certificate();
  CheckResult res = checker.check(known.certificate, known.target);
  CAPTURE(res.diagnostic);
  CHECK(res.accepted);
  CHECK(res.scope.find("traces") != std::string::npos);
}

TEST_CASE("reachability model check: no reachable state violates the floor") {
  ReachabilityResult res = run_safety_reachability();
  CHECK(res.safe);
  CHECK(res.states_explored > 100000);
}

TEST_CASE("static pass fraction sits at 0.35") {
  double fraction = static_pass_fraction(10000, 424242);
  CHECK(fraction == doctest::Approx(0.35).epsilon(0.06));
}

TEST_CASE("in-band episodes never violate the safety floor (quick slice)") {
  CHECK(count_safety_violations(3000, 777, 2) == 0);
}
