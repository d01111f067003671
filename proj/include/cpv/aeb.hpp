#pragma once

#include "cpv/algebra.hpp"
#include "cpv/checkers.hpp"
#include "cpv/evidence.hpp"

#include <map>
#include <memory>
#include <string>

namespace cpv::aeb {

// Automatic emergency braking case study: a lead car and an ego car on a
// discrete-step road. Speeds live in [0, 5.4] m/step, per-step speed change
// in [-0.9, +0.5], full braking removes 0.9 per step, the safety threshold
// is 5 m, sensors are accurate to +-0.1 m, and episodes run at most 100
// steps. Movement uses the post-actuation speeds: the distance consumed
// between steps i and i+1 is the relative speed recorded at step i+1.

// ---- Dynamics -----------------------------------------------------------

// Lower bound on the distance needed to keep 5 m of separation if the
// filter reacts one step late: safety margin + sensor error + one
// worst-case reaction step + stopping distance at 0.9/step against an
// instantly stopped lead car.
Rat p_buffer_dist(const Rat& speed);

// Throttle -1 brakes fully (speed drops 0.9, floored at 0); anything else
// accelerates by 0.5*throttle, clamped into [0, 5.4].
Rat actuator_next_speed(const Rat& throttle, const Rat& speed);

// Brake-or-pass shield: full brake when the distance reading is at most
// p_buffer_dist(speed) + 0.1.
Rat throttle_safety_filter(const Rat& dist, const Rat& speed, const Rat& desired_throttle);

// ---- Sensor surrogates --------------------------------------------------
//
// Pure functions of the true distance and environment-supplied noise draws;
// the components wrap these so determinism is preserved.

// In-band within +-0.1 whenever the lead car is at least 1.8 m wide;
// otherwise fails high (offset in [1, 10]) with probability
// min(1, 0.6*(1.8 - width)).
Rat radar_reading(const Rat& true_dist, const Rat& width, const Rat& fail_u, const Rat& off_u,
                  const Rat& band_u);
Rat radar_failure_probability(const Rat& width);

// In-band in clear/cloudy weather; fails low (reading in [0, true-1]) with
// probability 0.25 in rain and 0.40 in snow.
Rat laser_reading(const Rat& true_dist, const Rat& weather, const Rat& fail_u, const Rat& off_u,
                  const Rat& band_u);

// True distance plus Gaussian noise (sigma 0.04), clamped at 0.
Rat camera_reading(const Rat& true_dist, const Rat& noise);

// ---- Scenario and system ------------------------------------------------

struct AebOptions {
  bool in_band_sensors_only = false;  // forces every sensor into +-0.1
  std::size_t max_steps = 100;
};

// Scene distribution: weather uniform over {0:clear, 1:cloudy, 2:rain,
// 3:snow}; lead_car_width uniform on [1.2, 3.2] so P(width >= 1.8) = 0.7
// and the proved region covers 0.35 of the space; initial lead_dist uniform
// on [6, 60] with draws at or below buffer_dist = 10 rejected; initial ego
// speed 0; initial lead speed uniform on [0, 5.4].
Scenario make_scenario(const AebOptions& opts = {});

Component make_perception();
Component make_car(const AebOptions& opts = {});

// ---- Contract catalog ---------------------------------------------------

// The named contracts of the case study, keyed by name; formulas are built
// through the concrete-syntax parser.
std::map<std::string, Contract> build_contract_catalog();

// ---- Certificates and witnesses ----------------------------------------

// These own the components their domains run, so they outlive the check.
struct OwnedCertificate {
  ProofCertificate certificate;
  Contract target;
  std::shared_ptr<Component> component;  // kept alive for certificate.domain
};

OwnedCertificate median_certificate();
OwnedCertificate median_rescue_certificate();
OwnedCertificate filter_certificate();
OwnedCertificate control_refinement_domain();  // domain only, via certificate.domain
OwnedCertificate known_region_certificate(const AebOptions& opts = {});

// Discretized closed-loop model check standing in for a deductive proof of
// Keeps Distance: exhaustive reachability over 0.1-grids of (ego speed,
// lead speed, distance) with adversarial lead behavior {-0.9, +0.5},
// adversarial passed-through throttle and sensor error {-0.1, +0.1}.
struct ReachabilityResult {
  bool safe = false;
  std::uint64_t states_explored = 0;
  std::string violation;  // description of the first violating transition
};

ReachabilityResult run_safety_reachability();

// Witness for refining the composed system contract into Keeps Distance;
// runs (and caches) the reachability check and throws CampaignError if it
// fails.
RefinementWitness keeps_distance_witness(const Contract& from, const Contract& to);

// ---- Campaigns ----------------------------------------------------------

enum class CampaignMode { Naive, Optimized };

struct CampaignConfig {
  CampaignMode mode = CampaignMode::Naive;
  std::uint64_t samples = 1000;
  double confidence = 0.999;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool record_timing = false;
  std::ostream* trace_log = nullptr;
};

struct CampaignResult {
  EvidencePtr top;         // Keeps Distance evidence
  EvidencePtr perception;  // the Accurate Distance evidence feeding it
  double wall_seconds = 0.0;
};

// Runs the full pipeline: perception evidence (tested naive, or
// proof-plus-tested weak merge), composed with the assumed speedometer and
// actuator contracts and the proved control chain, refined to Keeps
// Distance. Both modes consume the identical seeded scene stream.
CampaignResult run_campaign(const CampaignConfig& config);

// Fraction of non-rejected scenes whose initial state satisfies the known
// region (weather in {0,1} and width >= 1.8).
double static_pass_fraction(std::uint64_t n, std::uint64_t seed);

// Episodes (with in-band sensors forced) whose minimum lead distance drops
// to 5 m or below; the safety argument says this must be zero.
std::uint64_t count_safety_violations(std::uint64_t episodes, std::uint64_t seed,
                                      unsigned workers = 1);

}  // namespace cpv::aeb
