#include "cpv/aeb.hpp"

#include "cpv/eval.hpp"
#include "cpv/parser.hpp"
#include "cpv/printer.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <sstream>
#include <thread>

namespace cpv::aeb {

namespace {

// Variable paths used throughout the scenario.
constexpr const char* kSpeed = "self.speed";
constexpr const char* kLeadSpeed = "lead_car.speed";
constexpr const char* kLeadDist = "lead_dist";
constexpr const char* kTrs = "true_relative_speed";
constexpr const char* kWeather = "params['weather']";
constexpr const char* kWidth = "params['lead_car_width']";
constexpr const char* kBufferDist = "buffer_dist";
constexpr const char* kRadarFail = "nz_radar_fail";
constexpr const char* kRadarOff = "nz_radar_off";
constexpr const char* kRadarBand = "nz_radar_band";
constexpr const char* kLaserFail = "nz_laser_fail";
constexpr const char* kLaserOff = "nz_laser_off";
constexpr const char* kLaserBand = "nz_laser_band";
constexpr const char* kCameraNoise = "nz_camera";

const Rat kSpeedCap(27, 5);     // 5.4
const Rat kBrakeStep(9, 10);    // 0.9
const Rat kAccelStep(1, 2);     // 0.5
const Rat kSensorBand(1, 10);   // 0.1
const Rat kSafetyFloor(5);
const Rat kBufferDistValue(10);

void draw_noise(EnvState& env, CounterRng& rng) {
  env.vars[kRadarFail] = rng.uniform_rat(Rat(0), Rat(1), 1000000);
  env.vars[kRadarOff] = rng.uniform_rat(Rat(0), Rat(1), 1000000);
  env.vars[kRadarBand] = rng.uniform_rat(Rat(-1), Rat(1), 2000000);
  env.vars[kLaserFail] = rng.uniform_rat(Rat(0), Rat(1), 1000000);
  env.vars[kLaserOff] = rng.uniform_rat(Rat(0), Rat(1), 1000000);
  env.vars[kLaserBand] = rng.uniform_rat(Rat(-1), Rat(1), 2000000);
  env.vars[kCameraNoise] = rng.gaussian_rat(0.04);
}

}  // namespace

Rat p_buffer_dist(const Rat& speed) {
  Rat u = speed + kAccelStep;
  Rat total = Rat(51, 10) + u;
  Rat term = u - kBrakeStep;
  while (term > 0) {
    total += term;
    term -= kBrakeStep;
  }
  return total;
}

Rat actuator_next_speed(const Rat& throttle, const Rat& speed) {
  if (throttle == -1) {
    Rat next = speed - kBrakeStep;
    return next < 0 ? Rat(0) : next;
  }
  return rat_clamp(speed + kAccelStep * throttle, Rat(0), kSpeedCap);
}

Rat throttle_safety_filter(const Rat& dist, const Rat& speed, const Rat& desired_throttle) {
  if (dist <= p_buffer_dist(speed) + kSensorBand) return Rat(-1);
  return desired_throttle;
}

Rat radar_failure_probability(const Rat& width) {
  Rat f = Rat(3, 5) * (Rat(9, 5) - width);
  if (f < 0) return Rat(0);
  return f > 1 ? Rat(1) : f;
}

Rat radar_reading(const Rat& true_dist, const Rat& width, const Rat& fail_u, const Rat& off_u,
                  const Rat& band_u) {
  if (width >= Rat(9, 5)) return true_dist + kSensorBand * band_u;
  if (fail_u < radar_failure_probability(width)) {
    return true_dist + Rat(1) + Rat(9) * off_u;  // too high, offset in [1, 10]
  }
  return true_dist + kSensorBand * band_u;
}

Rat laser_reading(const Rat& true_dist, const Rat& weather, const Rat& fail_u, const Rat& off_u,
                  const Rat& band_u) {
  if (weather == 0 || weather == 1) return true_dist + kSensorBand * band_u;
  Rat rate = weather == 2 ? Rat(1, 4) : Rat(2, 5);
  if (fail_u < rate) {
    Rat top = true_dist - 1;
    if (top <= 0) return Rat(0);
    return off_u * top;  // too small, in [0, true - 1]
  }
  return true_dist + kSensorBand * band_u;
}

Rat camera_reading(const Rat& true_dist, const Rat& noise) {
  Rat r = true_dist + noise;
  return r < 0 ? Rat(0) : r;
}

Scenario make_scenario(const AebOptions& opts) {
  Scenario sc;
  sc.name = "aeb-highway";
  sc.version = opts.in_band_sensors_only ? "1-inband" : "1";
  sc.scene_vars = {kWeather, kWidth, kBufferDist};
  sc.max_trace_len = opts.max_steps;

  sc.sample = [](CounterRng& rng) -> std::optional<EnvState> {
    EnvState env;
    env.vars[kWeather] = Rat(rng.next_below(4));
    env.vars[kWidth] = rng.uniform_rat(Rat(6, 5), Rat(16, 5), 20000);
    Rat lead_dist = rng.uniform_rat(Rat(6), Rat(60), 540000);
    Rat lead_speed = rng.uniform_rat(Rat(0), kSpeedCap, 54000);
    env.vars[kBufferDist] = kBufferDistValue;
    env.vars[kSpeed] = Rat(0);
    env.vars[kLeadSpeed] = lead_speed;
    env.vars[kLeadDist] = lead_dist;
    env.vars[kTrs] = Rat(0) - lead_speed;
    draw_noise(env, rng);
    if (!(lead_dist > kBufferDistValue)) return std::nullopt;  // rejection sampling
    return env;
  };

  sc.sim_step = [](const EnvState& env, const ComponentValue& value, SimulatorState& sim,
                   CounterRng& rng) -> EnvState {
    const Rat& speed = env.vars.at(kSpeed);
    const Rat& lead_speed = env.vars.at(kLeadSpeed);
    const Rat& lead_dist = env.vars.at(kLeadDist);
    const Rat& throttle = value.ports.at("throttle");

    Rat next_speed = actuator_next_speed(throttle, speed);

    // Lead policy: occasional sustained hard-brake phases of 3..6 steps,
    // otherwise a per-step delta drawn uniformly from {-0.9, 0, +0.5}.
    Rat delta;
    Rat brake_left = sim.count("brake_left") ? sim.at("brake_left") : Rat(0);
    if (brake_left > 0) {
      delta = -kBrakeStep;
      sim["brake_left"] = brake_left - 1;
    } else if (rng.next_below(10) == 0) {
      delta = -kBrakeStep;
      sim["brake_left"] = Rat(2 + rng.next_below(4));  // 3..6 steps including this one
    } else {
      switch (rng.next_below(3)) {
        case 0: delta = -kBrakeStep; break;
        case 1: delta = Rat(0); break;
        default: delta = kAccelStep; break;
      }
    }
    Rat next_lead_speed = rat_clamp(lead_speed + delta, Rat(0), kSpeedCap);

    // Post-actuation movement: the distance consumed between this step and
    // the next is the relative speed recorded at the next step.
    Rat trs = next_speed - next_lead_speed;
    Rat next_dist = lead_dist - trs;

    EnvState out;
    out.vars[kWeather] = env.vars.at(kWeather);
    out.vars[kWidth] = env.vars.at(kWidth);
    out.vars[kBufferDist] = env.vars.at(kBufferDist);
    out.vars[kSpeed] = next_speed;
    out.vars[kLeadSpeed] = next_lead_speed;
    out.vars[kLeadDist] = next_dist;
    out.vars[kTrs] = trs;
    draw_noise(out, rng);
    out.terminal = next_dist <= kSafetyFloor;
    return out;
  };
  return sc;
}

namespace {

Component make_radar(bool in_band_only) {
  ComponentInterface iface;
  iface.sensors = {kLeadDist, kWidth, kRadarFail, kRadarOff, kRadarBand};
  iface.outputs = {"dist1"};
  return Component::leaf("RadarDistanceSystem", iface,
                         [in_band_only](const EnvState& env, const ComponentValue*,
                                        const std::map<std::string, Rat>&) {
                           ComponentValue v;
                           const Rat& d = env.vars.at(kLeadDist);
                           v.ports["dist1"] =
                               in_band_only
                                   ? d + kSensorBand * env.vars.at(kRadarBand)
                                   : radar_reading(d, env.vars.at(kWidth),
                                                   env.vars.at(kRadarFail),
                                                   env.vars.at(kRadarOff),
                                                   env.vars.at(kRadarBand));
                           return v;
                         });
}

Component make_laser(bool in_band_only) {
  ComponentInterface iface;
  iface.sensors = {kLeadDist, kWeather, kLaserFail, kLaserOff, kLaserBand};
  iface.outputs = {"dist2"};
  return Component::leaf("LaserDistanceSystem", iface,
                         [in_band_only](const EnvState& env, const ComponentValue*,
                                        const std::map<std::string, Rat>&) {
                           ComponentValue v;
                           const Rat& d = env.vars.at(kLeadDist);
                           v.ports["dist2"] =
                               in_band_only
                                   ? d + kSensorBand * env.vars.at(kLaserBand)
                                   : laser_reading(d, env.vars.at(kWeather),
                                                   env.vars.at(kLaserFail),
                                                   env.vars.at(kLaserOff),
                                                   env.vars.at(kLaserBand));
                           return v;
                         });
}

Component make_camera(bool in_band_only) {
  ComponentInterface iface;
  iface.sensors = {kLeadDist, kCameraNoise};
  iface.outputs = {"dist3"};
  return Component::leaf("CameraDistanceSystem", iface,
                         [in_band_only](const EnvState& env, const ComponentValue*,
                                        const std::map<std::string, Rat>&) {
                           ComponentValue v;
                           const Rat& d = env.vars.at(kLeadDist);
                           if (in_band_only) {
                             Rat clamped = rat_clamp(env.vars.at(kCameraNoise), Rat(-1, 10),
                                                     Rat(1, 10));
                             v.ports["dist3"] = camera_reading(d, clamped);
                           } else {
                             v.ports["dist3"] = camera_reading(d, env.vars.at(kCameraNoise));
                           }
                           return v;
                         });
}

Component make_median() {
  ComponentInterface iface;
  iface.inputs = {"dist1", "dist2", "dist3"};
  iface.outputs = {"out_dist"};
  return Component::leaf("MedianDistanceFilter", iface,
                         [](const EnvState&, const ComponentValue*,
                            const std::map<std::string, Rat>& in) {
                           ComponentValue v;
                           v.ports["out_dist"] =
                               rat_median3(in.at("dist1"), in.at("dist2"), in.at("dist3"));
                           return v;
                         });
}

Component make_speedometer() {
  ComponentInterface iface;
  iface.sensors = {kSpeed};
  iface.outputs = {"speed"};
  return Component::leaf("Speedometer", iface,
                         [](const EnvState& env, const ComponentValue*,
                            const std::map<std::string, Rat>&) {
                           ComponentValue v;
                           v.ports["speed"] = env.vars.at(kSpeed);
                           return v;
                         });
}

Component make_cruise_controller() {
  ComponentInterface iface;
  iface.inputs = {"speed"};
  iface.outputs = {"desired_throttle"};
  // Proportional cruise law toward the speed cap; carries no guarantees.
  return Component::leaf("CruiseController", iface,
                         [](const EnvState&, const ComponentValue*,
                            const std::map<std::string, Rat>& in) {
                           ComponentValue v;
                           Rat raw = Rat(1, 2) * (kSpeedCap - in.at("speed"));
                           v.ports["desired_throttle"] = rat_clamp(raw, Rat(-1), Rat(1));
                           return v;
                         });
}

Component make_filter() {
  ComponentInterface iface;
  iface.inputs = {"dist", "speed", "desired_throttle"};
  iface.outputs = {"modulated_throttle", "p_buffer_dist"};
  return Component::leaf("ThrottleSafetyFilter", iface,
                         [](const EnvState&, const ComponentValue*,
                            const std::map<std::string, Rat>& in) {
                           ComponentValue v;
                           v.ports["p_buffer_dist"] = p_buffer_dist(in.at("speed"));
                           v.ports["modulated_throttle"] = throttle_safety_filter(
                               in.at("dist"), in.at("speed"), in.at("desired_throttle"));
                           return v;
                         });
}

Component make_perception_impl(bool in_band_only) {
  return compose("PerceptionSystem",
                 {make_radar(in_band_only), make_laser(in_band_only), make_camera(in_band_only),
                  make_median()},
                 {
                     {"RadarDistanceSystem", "dist1", "MedianDistanceFilter", "dist1"},
                     {"LaserDistanceSystem", "dist2", "MedianDistanceFilter", "dist2"},
                     {"CameraDistanceSystem", "dist3", "MedianDistanceFilter", "dist3"},
                 },
                 {{"MedianDistanceFilter", "out_dist", "dist"}});
}

Component make_control() {
  return compose("ControlSystem", {make_cruise_controller(), make_filter()},
                 {{"CruiseController", "desired_throttle", "ThrottleSafetyFilter",
                   "desired_throttle"}},
                 {{"ThrottleSafetyFilter", "modulated_throttle", "throttle"}});
}

}  // namespace

Component make_perception() { return make_perception_impl(false); }

Component make_car(const AebOptions& opts) {
  return compose("Car",
                 {make_perception_impl(opts.in_band_sensors_only), make_speedometer(),
                  make_control()},
                 {
                     {"PerceptionSystem", "dist", "ControlSystem", "dist"},
                     {"Speedometer", "speed", "ControlSystem", "speed"},
                 });
}

std::map<std::string, Contract> build_contract_catalog() {
  auto contract = [](const std::string& name, const std::string& subject, const std::string& a,
                     const std::string& g) {
    return Contract::make(name, subject, parse_formula(a), parse_formula(g));
  };
  auto in_band = [](const std::string& var) {
    return "always ((((lead_dist) - (0.1)) <= (" + var + ")) and ((" + var +
           ") <= ((lead_dist) + (0.1))))";
  };

  std::map<std::string, Contract> catalog;
  catalog.emplace("Radar Accurate Distance",
                  contract("Radar Accurate Distance", "RadarDistanceSystem",
                           "(params['lead_car_width']) >= (1.8)", in_band("dist1")));
  catalog.emplace("Laser Accurate Distance",
                  contract("Laser Accurate Distance", "LaserDistanceSystem",
                           "((params['weather']) == (0)) or ((params['weather']) == (1))",
                           in_band("dist2")));
  catalog.emplace(
      "Median Distance Filter",
      contract("Median Distance Filter", "MedianDistanceFilter", "true",
               "always ((out_dist) == (max((min((dist1), (dist2))), (min((max((dist1), "
               "(dist2))), (dist3))))))"));
  catalog.emplace("Accurate Speed",
                  contract("Accurate Speed", "Speedometer", "true",
                           "always ((speed) == (self.speed))"));
  catalog.emplace("Safe Throttle Filter",
                  contract("Safe Throttle Filter", "ThrottleSafetyFilter", "true",
                           "always (((dist) <= ((p_buffer_dist) + (0.1))) implies "
                           "((modulated_throttle) == (-(1))))"));
  catalog.emplace("Control System Safety",
                  contract("Control System Safety", "ControlSystem", "true",
                           "always (((dist) <= ((p_buffer_dist) + (0.1))) implies "
                           "((throttle) == (-(1))))"));
  catalog.emplace("Vacuous Cruise Controller",
                  contract("Vacuous Cruise Controller", "CruiseController", "true", "true"));
  catalog.emplace(
      "Brakes Decelerate",
      contract("Brakes Decelerate", "CarActionControls", "true",
               "always (((throttle) == (-(1))) implies (((next (self.speed)) == (0)) or "
               "((next (self.speed)) == ((self.speed) - (0.9)))))"));
  catalog.emplace("Accurate Distance",
                  contract("Accurate Distance", "PerceptionSystem", "true", in_band("dist")));
  const std::string known_region =
      "(((params['weather']) == (0)) or ((params['weather']) == (1))) and "
      "((params['lead_car_width']) >= (1.8))";
  catalog.emplace("Accurate Distance Known",
                  contract("Accurate Distance Known", "PerceptionSystem", known_region,
                           in_band("dist")));
  catalog.emplace("Accurate Distance Unknown",
                  contract("Accurate Distance Unknown", "PerceptionSystem",
                           "not (" + known_region + ")", in_band("dist")));
  catalog.emplace(
      "Keeps Distance",
      contract(
          "Keeps Distance", "Car",
          "(always (((0) <= (self.speed)) and ((self.speed) <= (5.4)))) and "
          "(always (((0) <= (lead_car.speed)) and ((lead_car.speed) <= (5.4)))) and "
          "(always (((-(0.9)) <= ((next (self.speed)) - (self.speed))) and "
          "(((next (self.speed)) - (self.speed)) <= (0.5)))) and "
          "(always (((-(0.9)) <= ((next (lead_car.speed)) - (lead_car.speed))) and "
          "(((next (lead_car.speed)) - (lead_car.speed)) <= (0.5)))) and "
          "(((lead_dist) > (buffer_dist)) and ((self.speed) == (0))) and "
          "(always ((next (lead_dist)) == ((lead_dist) - (next (true_relative_speed)))))",
          "always ((lead_dist) > (5))"));
  return catalog;
}

// ---- Certificates ----

namespace {

std::vector<Rat> rat_range(const Rat& lo, const Rat& hi, const Rat& step) {
  std::vector<Rat> out;
  for (Rat v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

ProofCertificate certificate_for(const std::string& id, const Contract& target, DomainSpec domain) {
  ProofCertificate cert;
  cert.id = id;
  cert.target_contract_hash = contract_hash(target);
  cert.domain = std::move(domain);
  return cert;
}

}  // namespace

OwnedCertificate median_certificate() {
  OwnedCertificate owned;
  owned.component = std::make_shared<Component>(make_median());
  DomainSpec domain;
  domain.description = "dist1, dist2, dist3 on a 0.05 grid over [0, 3]";
  auto grid = rat_range(Rat(0), Rat(3), Rat(1, 20));
  domain.grids = {{"dist1", grid, false}, {"dist2", grid, false}, {"dist3", grid, false}};
  domain.trace_len = 1;
  domain.component = owned.component.get();
  owned.target = build_contract_catalog().at("Median Distance Filter");
  owned.certificate = certificate_for("median-filter-grid", owned.target, std::move(domain));
  return owned;
}

OwnedCertificate median_rescue_certificate() {
  // Formula-level lemma: whenever two of the three readings are within the
  // band around the true distance, so is their median. Offsets keep the
  // enumeration within the in-band slice of the full product grid.
  OwnedCertificate owned;
  Contract lemma = Contract::make(
      "Median Rescue Lemma", "MedianDistanceFilter", parse_formula("true"),
      parse_formula(
          "always (((((lead_dist) - (0.1)) <= (max((min(((lead_dist) + (off1)), ((lead_dist) + "
          "(off2)))), (min((max(((lead_dist) + (off1)), ((lead_dist) + (off2)))), (dist3)))))) "
          "and ((max((min(((lead_dist) + (off1)), ((lead_dist) + (off2)))), (min((max(((lead_dist) "
          "+ (off1)), ((lead_dist) + (off2)))), (dist3))))) <= ((lead_dist) + (0.1)))))"));
  DomainSpec domain;
  domain.description =
      "true distance on a 0.05 grid over [0, 3], two in-band offsets on {-0.1..0.1}, third "
      "reading free on [0, 3]";
  domain.grids = {
      {"lead_dist", rat_range(Rat(0), Rat(3), Rat(1, 20)), false},
      {"off1", rat_range(Rat(-1, 10), Rat(1, 10), Rat(1, 20)), false},
      {"off2", rat_range(Rat(-1, 10), Rat(1, 10), Rat(1, 20)), false},
      {"dist3", rat_range(Rat(0), Rat(3), Rat(1, 20)), false},
  };
  domain.trace_len = 1;
  owned.target = lemma;
  owned.certificate = certificate_for("median-rescue-grid", lemma, std::move(domain));
  return owned;
}

OwnedCertificate filter_certificate() {
  OwnedCertificate owned;
  owned.component = std::make_shared<Component>(make_filter());
  DomainSpec domain;
  domain.description =
      "readings over [0, 60] including the braking thresholds, speeds over [0, 5.4], desired "
      "throttle over [-1, 1]";
  std::vector<Rat> dists = {Rat(0),      Rat(2),      Rat(49, 10), Rat(101, 20), Rat(28, 5),
                            Rat(57, 10), Rat(6),      Rat(10),     Rat(20),      Rat(55, 2),
                            Rat(138, 5), Rat(28),     Rat(40),     Rat(60)};
  std::vector<Rat> speeds = rat_range(Rat(0), Rat(5), Rat(1, 2));
  speeds.push_back(kSpeedCap);
  std::vector<Rat> desired = {Rat(-1), Rat(-1, 2), Rat(0), Rat(1, 2), Rat(1)};
  domain.grids = {{"dist", dists, false}, {"speed", speeds, false},
                  {"desired_throttle", desired, false}};
  domain.trace_len = 1;
  domain.component = owned.component.get();
  owned.target = build_contract_catalog().at("Safe Throttle Filter");
  owned.certificate = certificate_for("throttle-filter-grid", owned.target, std::move(domain));
  return owned;
}

OwnedCertificate control_refinement_domain() {
  OwnedCertificate owned;
  owned.component = std::make_shared<Component>(make_control());
  DomainSpec domain;
  domain.description = "control system on reading/speed grids (throttle alias made concrete)";
  std::vector<Rat> dists = {Rat(0),      Rat(2),  Rat(49, 10), Rat(101, 20), Rat(28, 5),
                            Rat(57, 10), Rat(6),  Rat(10),     Rat(20),      Rat(55, 2),
                            Rat(28),     Rat(40), Rat(60)};
  std::vector<Rat> speeds = rat_range(Rat(0), Rat(5), Rat(1, 2));
  speeds.push_back(kSpeedCap);
  domain.grids = {{"dist", dists, false}, {"speed", speeds, false}};
  domain.trace_len = 1;
  domain.component = owned.component.get();
  owned.certificate.id = "control-refinement-grid";
  owned.certificate.domain = std::move(domain);
  return owned;
}

OwnedCertificate known_region_certificate(const AebOptions& opts) {
  OwnedCertificate owned;
  owned.component = std::make_shared<Component>(make_perception_impl(opts.in_band_sensors_only));
  DomainSpec domain;
  domain.description =
      "perception system under known-region scenes (clear/cloudy weather, width >= 1.8) with "
      "adversarial noise draws and an out-of-band camera";
  domain.grids = {
      {kWeather, {Rat(0), Rat(1)}, true},
      {kWidth, {Rat(9, 5), Rat(2), Rat(5, 2), Rat(16, 5)}, true},
      {kLeadDist, {Rat(6), Rat(10), Rat(20), Rat(40), Rat(60)}, false},
      {kRadarFail, {Rat(0), Rat(999999, 1000000)}, false},
      {kRadarOff, {Rat(0), Rat(1)}, false},
      {kRadarBand, {Rat(-1), Rat(-1, 2), Rat(0), Rat(1, 2), Rat(1)}, false},
      {kLaserFail, {Rat(0), Rat(999999, 1000000)}, false},
      {kLaserOff, {Rat(0), Rat(1)}, false},
      {kLaserBand, {Rat(-1), Rat(-1, 2), Rat(0), Rat(1, 2), Rat(1)}, false},
      {kCameraNoise, {Rat(-5), Rat(-1, 5), Rat(0), Rat(1, 5), Rat(5)}, false},
  };
  domain.trace_len = 1;
  domain.node_budget = 8000000;
  domain.component = owned.component.get();
  owned.target = build_contract_catalog().at("Accurate Distance Known");
  owned.certificate = certificate_for("known-region-grid", owned.target, std::move(domain));
  return owned;
}

// ---- Reachability model check ----
//
// Why p_buffer_dist(s) = 5.1 + L(s + 0.5) with L(u) = u + sum_{m>=1}
// max(0, u - 0.9m) suffices, against an instantly stopped lead car:
//
//   * A brake decided at step i takes effect on the movement interval
//     (i, i+1), so a filter that misses at step i allows at most one more
//     interval at speed <= s + 0.5 before deceleration bites; braking from
//     u then travels L(u) in total.
//   * No-brake at step i needs a reading above p_buffer(s_i) + 0.1, and
//     readings overshoot by at most 0.1, so D_i > p_buffer(s_i)
//     = 5.1 + L(s_i + 0.5). The remaining travel is at most L(s_i + 0.5),
//     leaving D_final > 5.1.
//   * Braking states preserve D - 5 - L(s) exactly (L(s) = s + L(s - 0.9)),
//     so the 0.1 headroom survives the whole chain.
//
// The grid check below verifies the same claim mechanically on 0.1-grids
// with adversarial lead behavior, throttle, and sensor error.

namespace {

// Everything in deci-units: speeds 0..54, distances 0..601 (601 = beyond
// sensor range, absorbing), threshold p_buffer in deci-meters.
int pb_deci(int s) {
  int u = s + 5;
  int total = 51 + u;
  for (int term = u - 9; term > 0; term -= 9) total += term;
  return total;
}

}  // namespace

ReachabilityResult run_safety_reachability() {
  constexpr int kSpeeds = 55;   // 0..5.4
  constexpr int kDists = 602;   // 0..60.0 plus the far bucket
  constexpr int kFar = 601;
  auto index = [&](int s, int ls, int d) { return (s * kSpeeds + ls) * kDists + d; };

  std::vector<bool> visited(static_cast<std::size_t>(kSpeeds) * kSpeeds * kDists, false);
  std::deque<std::array<int, 3>> queue;
  ReachabilityResult result;

  auto push = [&](int s, int ls, int d) {
    if (d > kFar) d = kFar;
    std::size_t idx = static_cast<std::size_t>(index(s, ls, d));
    if (!visited[idx]) {
      visited[idx] = true;
      queue.push_back({s, ls, d});
    }
  };

  // Scene constraint: ego stopped, distance above the buffer.
  for (int ls = 0; ls < kSpeeds; ++ls) {
    for (int d = 101; d <= kFar; ++d) push(0, ls, d);
  }

  while (!queue.empty()) {
    auto [s, ls, d] = queue.front();
    queue.pop_front();
    ++result.states_explored;

    const int threshold = pb_deci(s) + 1;
    for (int reading : {d - 1, d + 1}) {
      const bool forced = reading <= threshold;
      // Ego branches: full brake is always possible (the cruise law may
      // demand it); acceleration only when the filter passes it through.
      int brake_speed = s >= 9 ? s - 9 : 0;
      int accel_speed = s + 5 <= 54 ? s + 5 : 54;
      std::array<int, 2> ego = {brake_speed, forced ? brake_speed : accel_speed};
      for (int s2 : ego) {
        for (int lead_delta : {-9, +5}) {
          int ls2 = ls + lead_delta;
          if (ls2 < 0) ls2 = 0;
          if (ls2 > 54) ls2 = 54;
          int d2 = d - (s2 - ls2);
          if (d2 > kFar) d2 = kFar;
          if (d2 <= 50) {
            std::ostringstream os;
            os << "violation from state (speed=" << s / 10.0 << ", lead_speed=" << ls / 10.0
               << ", dist=" << d / 10.0 << ") via reading " << reading / 10.0 << " to dist "
               << d2 / 10.0;
            result.safe = false;
            result.violation = os.str();
            return result;
          }
          push(s2, ls2, d2);
        }
      }
    }
  }
  result.safe = true;
  return result;
}

RefinementWitness keeps_distance_witness(const Contract& from, const Contract& to) {
  static std::once_flag once;
  static ReachabilityResult cached;
  std::call_once(once, []() { cached = run_safety_reachability(); });
  if (!cached.safe) {
    throw CampaignError("keeps-distance refinement: reachability check failed: " +
                        cached.violation);
  }
  RefinementWitness w;
  w.method = RefinementWitness::Method::ExhaustiveFiniteDomain;
  std::ostringstream scope;
  scope << "closed-loop reachability over 0.1-grids (" << cached.states_explored
        << " states; adversarial lead {-0.9,+0.5}, adversarial throttle, sensor error +-0.1)";
  w.scope = scope.str();
  w.from = from;
  w.to = to;
  return w;
}

// ---- Campaigns ----

namespace {

struct PipelineParts {
  std::map<std::string, Contract> catalog;
  Scenario scenario;
  Component car;
};

EvidencePtr finish_pipeline(const PipelineParts& parts, const EvidencePtr& perception_evidence) {
  const auto& catalog = parts.catalog;
  ExhaustiveGridChecker grid_checker;

  EvidencePtr speed_ev = verify_assumption(catalog.at("Accurate Speed"), 1.0, 1.0,
                                           "accurate speedometer assumed");
  EvidencePtr pid_ev = verify_assumption(catalog.at("Vacuous Cruise Controller"), 1.0, 1.0,
                                         "implicit vacuous contract for the cruise controller");

  OwnedCertificate filter_cert = filter_certificate();
  EvidencePtr filter_ev =
      verify_proof(filter_cert.certificate, grid_checker, catalog.at("Safe Throttle Filter"));
  if (filter_ev->bound.p < 1.0) {
    throw CampaignError("throttle filter certificate unexpectedly rejected: " +
                        filter_ev->diagnostic.value_or(""));
  }

  EvidencePtr control_raw = combine_union(filter_ev, pid_ev, UnionOp::Compose);
  OwnedCertificate control_domain = control_refinement_domain();
  auto control_check = check_refinement(control_raw->contract, catalog.at("Control System Safety"),
                                        RefinementWitness::Method::ExhaustiveFiniteDomain,
                                        &*control_domain.certificate.domain);
  if (auto* cex = std::get_if<RefinementCounterexample>(&control_check)) {
    throw CampaignError("control refinement failed: " + cex->summary);
  }
  EvidencePtr control_ev = refine(control_raw, std::get<RefinementWitness>(control_check),
                                  catalog.at("Control System Safety"));

  EvidencePtr actuator_ev =
      verify_assumption(catalog.at("Brakes Decelerate"), 0.99, 0.999,
                        "manufacturer braking guarantee, established by outside testing");

  EvidencePtr system = combine_union(perception_evidence, speed_ev, UnionOp::Compose);
  system = combine_union(system, control_ev, UnionOp::Compose);
  system = combine_union(system, actuator_ev, UnionOp::Compose);

  RefinementWitness kd =
      keeps_distance_witness(system->contract, catalog.at("Keeps Distance"));
  return refine(system, kd, catalog.at("Keeps Distance"));
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  if (config.samples < 50) {
    throw CampaignError("campaign budget must be at least 50 samples");
  }
  const auto t0 = std::chrono::steady_clock::now();
  PipelineParts parts{build_contract_catalog(), make_scenario(), make_car()};

  TestBinding binding;
  binding.scenario = &parts.scenario;
  binding.component = &parts.car;

  TestRunConfig run;
  run.samples = config.samples;
  run.confidence = config.confidence;
  run.seed = config.seed;
  run.workers = config.workers;
  run.record_timing = config.record_timing;
  run.trace_log = config.trace_log;

  EvidencePtr perception;
  if (config.mode == CampaignMode::Naive) {
    perception = verify_testing(parts.catalog.at("Accurate Distance"), binding, run);
  } else {
    ExhaustiveGridChecker grid_checker;
    OwnedCertificate known = known_region_certificate();
    EvidencePtr merged = weak_merge_tested(known.certificate, grid_checker,
                                           parts.catalog.at("Accurate Distance Known"),
                                           parts.catalog.at("Accurate Distance Unknown"),
                                           binding, run);
    // The weak-merged assumptions cover the whole scene envelope, so the
    // merged contract refines the unconditional Accurate Distance form.
    DomainSpec domain;
    domain.description = "scene envelope grid plus on/off-band reading samples";
    domain.grids = {
        {kWeather, {Rat(0), Rat(1), Rat(2), Rat(3)}, true},
        {kWidth, {Rat(6, 5), Rat(179, 100), Rat(9, 5), Rat(16, 5)}, true},
        {kLeadDist, {Rat(10), Rat(20)}, false},
        {"dist", {Rat(197, 20), Rat(199, 20), Rat(201, 20), Rat(203, 20), Rat(399, 20), Rat(25)},
         false},
    };
    domain.trace_len = 2;
    auto check = check_refinement(merged->contract, parts.catalog.at("Accurate Distance"),
                                  RefinementWitness::Method::ExhaustiveFiniteDomain, &domain);
    if (auto* cex = std::get_if<RefinementCounterexample>(&check)) {
      throw CampaignError("weak-merge refinement failed: " + cex->summary);
    }
    perception = refine(merged, std::get<RefinementWitness>(check),
                        parts.catalog.at("Accurate Distance"));
  }

  CampaignResult result;
  result.perception = perception;
  result.top = finish_pipeline(parts, perception);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

double static_pass_fraction(std::uint64_t n, std::uint64_t seed) {
  Scenario sc = make_scenario();
  std::map<std::string, Contract> catalog = build_contract_catalog();
  const Contract& known = catalog.at("Accurate Distance Known");
  std::uint64_t effective = 0;
  std::uint64_t passed = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    auto scene = sc.sample(rng);
    if (!scene) continue;
    ++effective;
    Trace probe;
    probe.steps.push_back(TraceStep{*scene, {}});
    if (trace_satisfies(*known.assumptions, probe)) ++passed;
  }
  return effective == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(effective);
}

std::uint64_t count_safety_violations(std::uint64_t episodes, std::uint64_t seed,
                                      unsigned workers) {
  AebOptions opts;
  opts.in_band_sensors_only = true;
  Scenario sc = make_scenario(opts);
  Component car = make_car(opts);

  std::atomic<std::uint64_t> violations{0};
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= episodes) return;
      CounterRng rng(seed, i);
      auto scene = sc.sample(rng);
      if (!scene) continue;
      Trace tau = run_trace(*scene, sc, car, rng);
      for (const auto& step : tau.steps) {
        if (step.env.vars.at(kLeadDist) <= kSafetyFloor) {
          violations.fetch_add(1);
          break;
        }
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return violations.load();
}

}  // namespace cpv::aeb
