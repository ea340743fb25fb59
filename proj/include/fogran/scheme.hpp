// scheme.hpp - serial delivery policies, block-Markov pipelining and its inverse
//
// A policy is described per user, in units of one file (L bits): which
// fraction of the requested file travels through which delivery mode. The
// modes are degrees-of-freedom accounting rules, not codebooks:
//
//   mode                     source of the bits            edge   fronthaul/link  D2D/direction
//   cache_zf                 cached at both ENs            1      0               0
//   cloud_zf                 uncached, sent over fronthaul 1      1               0
//   alignment                cached at one EN (X-channel)  3/2    0               0
//   fronthaul_assisted_zf    cached at one EN              1      1/2             0
//   d2d_cooperation          cached at one EN              1      0               1/2
//
// cloud_zf and fronthaul_assisted_zf ship quantized precoded signals, so each
// link carries one unit per unit of edge time. d2d_cooperation serves one
// user at a time with both ENs while the other user forwards its observation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fogran/analysis.hpp"
#include "fogran/lp.hpp"
#include "fogran/model.hpp"

namespace fogran {

enum class DeliveryMode { CacheZf, CloudZf, Alignment, FronthaulAssistedZf, D2dCooperation };

inline constexpr std::array<DeliveryMode, 5> kAllModes = {
    DeliveryMode::CacheZf, DeliveryMode::CloudZf, DeliveryMode::Alignment, DeliveryMode::FronthaulAssistedZf,
    DeliveryMode::D2dCooperation};

inline std::string to_string(DeliveryMode m) {
  switch (m) {
    case DeliveryMode::CacheZf: return "cache_zf";
    case DeliveryMode::CloudZf: return "cloud_zf";
    case DeliveryMode::Alignment: return "alignment";
    case DeliveryMode::FronthaulAssistedZf: return "fronthaul_assisted_zf";
    case DeliveryMode::D2dCooperation: return "d2d_cooperation";
  }
  return "?";
}

inline bool uses_exclusive_bits(DeliveryMode m) {
  return m == DeliveryMode::Alignment || m == DeliveryMode::FronthaulAssistedZf || m == DeliveryMode::D2dCooperation;
}

// Normalized resource usage: fronthaul and D2D in file units per link or
// direction, edge in normalized time.
struct ResourceUse {
  double fronthaul = 0.0;
  double edge = 0.0;
  double d2d = 0.0;

  ResourceUse& operator+=(const ResourceUse& o) {
    fronthaul += o.fronthaul;
    edge += o.edge;
    d2d += o.d2d;
    return *this;
  }
};

// Cost of delivering one file unit to each user through a mode (distinct demands).
inline ResourceUse mode_cost(DeliveryMode m) {
  switch (m) {
    case DeliveryMode::CacheZf: return {0.0, 1.0, 0.0};
    case DeliveryMode::CloudZf: return {1.0, 1.0, 0.0};
    case DeliveryMode::Alignment: return {0.0, 1.5, 0.0};
    case DeliveryMode::FronthaulAssistedZf: return {0.5, 1.0, 0.0};
    case DeliveryMode::D2dCooperation: return {0.0, 1.0, 0.5};
  }
  return {};
}

// Uncoded per-file placement, identical for every file. Bits are laid out as
// [joint | exclusive at EN1 | exclusive at EN2 | uncached].
struct CachePlacement {
  double joint = 0.0;
  double exclusive_1 = 0.0;
  double exclusive_2 = 0.0;

  double uncached() const { return 1.0 - joint - exclusive_1 - exclusive_2; }
  double stored_at(int en) const { return joint + (en == 0 ? exclusive_1 : exclusive_2); }

  static CachePlacement symmetric(double mu, double joint) { return {joint, mu - joint, mu - joint}; }
};

struct PhaseEntry {
  DeliveryMode mode = DeliveryMode::CacheZf;
  double fraction = 0.0;  // of each requested file
  ResourceUse use;        // fraction * mode_cost(mode)
};

struct SerialPolicy {
  CachePlacement placement;
  std::vector<PhaseEntry> plan;
  NdtTriple ndt;

  double fraction(DeliveryMode m) const {
    double f = 0.0;
    for (const auto& e : plan)
      if (e.mode == m) f += e.fraction;
    return f;
  }

  // Loads recomputed from the plan fractions, never from the stored `use`.
  ResourceUse load() const {
    ResourceUse total;
    for (const auto& e : plan) {
      const auto c = mode_cost(e.mode);
      total += {c.fronthaul * e.fraction, c.edge * e.fraction, c.d2d * e.fraction};
    }
    return total;
  }
};

enum class Objective {
  Pipelined,  // minimize max{delta_f, delta_e, delta_d}
  Serial,     // minimize delta_f + delta_e + delta_d
};

// The catalog could not reach the closed-form optimum.
class SynthesisGap : public std::runtime_error {
 public:
  SynthesisGap(double achieved, double target)
      : std::runtime_error(describe(achieved, target)), achieved_(achieved), target_(target) {}
  double achieved() const { return achieved_; }
  double target() const { return target_; }

 private:
  static std::string describe(double achieved, double target) {
    std::ostringstream os;
    os.precision(17);
    os << "synthesized policy reaches NDT " << achieved << " but the closed form is " << target;
    return os.str();
  }
  double achieved_;
  double target_;
};

inline constexpr double kSynthesisTolerance = 1e-6;

namespace detail {

// Times implied by a load: 0 when nothing is carried, +inf when a zero-rate
// resource would have to carry something.
inline double time_for(double bits, double rate) {
  if (bits <= 1e-14) return 0.0;
  return rate > 0.0 ? bits / rate : kInf;
}

inline SerialPolicy make_policy(double mu, double joint, double alignment, double assisted, double cooperation,
                                const SystemParams& p) {
  SerialPolicy pol;
  // LP round-off leaves ~1e-12 residues (tie-break slack) that would cost a
  // whole bit per block in the simulator; snap to a 1e-11 grid and drop dust.
  auto snap = [](double v) { return std::round(v * 1e11) / 1e11; };
  joint = std::clamp(snap(joint), std::max(0.0, 2.0 * mu - 1.0), mu);
  if (std::abs(joint - mu) <= 1e-9) joint = mu;
  if (std::abs(joint - (2.0 * mu - 1.0)) <= 1e-9) joint = std::max(0.0, 2.0 * mu - 1.0);
  pol.placement = CachePlacement::symmetric(mu, joint);
  const double exclusive_total = 2.0 * (mu - joint);
  auto clean = [&](double v) { return v > 1e-9 ? snap(v) : 0.0; };
  std::array<double, 3> split = {clean(alignment), clean(assisted), clean(cooperation)};
  const double s = split[0] + split[1] + split[2];
  for (auto& v : split) v = s > 0.0 ? v * exclusive_total / s : 0.0;
  if (s <= 0.0) split[0] = exclusive_total;  // only reachable when exclusive_total is ~0

  const std::array<std::pair<DeliveryMode, double>, 5> entries = {{
      {DeliveryMode::CacheZf, joint},
      {DeliveryMode::CloudZf, clean(pol.placement.uncached())},
      {DeliveryMode::Alignment, split[0]},
      {DeliveryMode::FronthaulAssistedZf, split[1]},
      {DeliveryMode::D2dCooperation, split[2]},
  }};
  for (const auto& [mode, f] : entries) {
    if (f <= 0.0) continue;
    const auto c = mode_cost(mode);
    pol.plan.push_back({mode, f, {c.fronthaul * f, c.edge * f, c.d2d * f}});
  }
  const auto load = pol.load();
  pol.ndt = {time_for(load.fronthaul, p.r_f), load.edge, time_for(load.d2d, p.r_d)};
  return pol;
}

// Variable layout of the allocation LP.
enum Var : std::size_t { kJoint, kAlign, kAssist, kCoop, kTimeE, kTimeF, kTimeD, kMakespan, kVars };

inline lp::Problem allocation_lp(const SystemParams& p, Objective obj) {
  const double mu = p.mu;
  lp::Problem lp(kVars);
  auto row = [](std::initializer_list<std::pair<Var, double>> terms) {
    std::vector<double> r(kVars, 0.0);
    for (const auto& [v, c] : terms) r[v] = c;
    return r;
  };
  lp.add_le(row({{kJoint, 1.0}}), mu);
  lp.add_ge(row({{kJoint, 1.0}}), 2.0 * mu - 1.0);  // uncached part is nonnegative
  lp.add_eq(row({{kAlign, 1.0}, {kAssist, 1.0}, {kCoop, 1.0}, {kJoint, 2.0}}), 2.0 * mu);
  // edge: joint + uncached + 3/2 align + assist + coop <= t_e, with uncached = 1 - 2mu + joint
  lp.add_le(row({{kJoint, 2.0}, {kAlign, 1.5}, {kAssist, 1.0}, {kCoop, 1.0}, {kTimeE, -1.0}}), 2.0 * mu - 1.0);
  // fronthaul per link: uncached + assist/2 <= r_f t_f
  lp.add_le(row({{kJoint, 1.0}, {kAssist, 0.5}, {kTimeF, -p.r_f}}), 2.0 * mu - 1.0);
  // D2D per direction: coop/2 <= r_d t_d
  lp.add_le(row({{kCoop, 0.5}, {kTimeD, -p.r_d}}), 0.0);
  if (obj == Objective::Pipelined) {
    lp.add_le(row({{kTimeE, 1.0}, {kMakespan, -1.0}}), 0.0);
    lp.add_le(row({{kTimeF, 1.0}, {kMakespan, -1.0}}), 0.0);
    lp.add_le(row({{kTimeD, 1.0}, {kMakespan, -1.0}}), 0.0);
  } else {
    lp.add_le(row({{kMakespan, 1.0}}), 0.0);
  }
  return lp;
}

inline std::vector<double> objective_row(Objective obj) {
  std::vector<double> c(kVars, 0.0);
  if (obj == Objective::Pipelined) {
    c[kMakespan] = 1.0;
  } else {
    c[kTimeE] = c[kTimeF] = c[kTimeD] = 1.0;
  }
  return c;
}

inline std::vector<double> negated(std::vector<double> v) {
  for (auto& x : v) x = -x;
  return v;
}

inline double slack(double v) { return v + 1e-12 * std::max(1.0, std::abs(v)); }

}  // namespace detail

// Min-max (or min-sum) allocation over the mode catalog with symmetric
// placement. Ties are broken lexicographically: least D2D load, then least
// fronthaul load.
inline SerialPolicy synthesize_serial_policy(const SystemParams& p, Objective obj = Objective::Pipelined) {
  const Ndt target = min_pipelined_ndt(p);  // validates p
  if (!target.finite()) throw InfeasibleError("instance is infeasible: uncached bits but no fronthaul");

  auto lp = detail::allocation_lp(p, obj);
  const auto cost = detail::objective_row(obj);

  lp.set_objective(detail::negated(cost));
  const auto first = lp.maximize();
  if (!first.optimal()) throw InfeasibleError("allocation program has no feasible point");
  lp.add_le(cost, detail::slack(-first.objective));

  std::vector<double> d2d(detail::kVars, 0.0);
  d2d[detail::kCoop] = 1.0;
  lp.set_objective(detail::negated(d2d));
  const auto second = lp.maximize();
  if (!second.optimal()) throw InfeasibleError("allocation program lost feasibility while tie-breaking");
  lp.add_le(d2d, detail::slack(-second.objective));

  std::vector<double> fronthaul(detail::kVars, 0.0);
  fronthaul[detail::kJoint] = 1.0;
  fronthaul[detail::kAssist] = 0.5;
  lp.set_objective(detail::negated(fronthaul));
  const auto third = lp.maximize();
  const auto& x = third.optimal() ? third.x : second.x;

  auto pol = detail::make_policy(p.mu, x[detail::kJoint], x[detail::kAlign], x[detail::kAssist],
                                 x[detail::kCoop], p);
  if (obj == Objective::Pipelined && !(std::abs(pol.ndt.max() - target.value) <= kSynthesisTolerance))
    throw SynthesisGap(pol.ndt.max(), target.value);
  return pol;
}

inline Ndt achievable_pipelined_ndt(const NdtTriple& t) { return {t.max()}; }

enum class PolicyViolation { None, Placement, Cache, Coverage, Fronthaul, Edge, D2d };

inline std::string to_string(PolicyViolation v) {
  switch (v) {
    case PolicyViolation::None: return "none";
    case PolicyViolation::Placement: return "placement";
    case PolicyViolation::Cache: return "cache";
    case PolicyViolation::Coverage: return "coverage";
    case PolicyViolation::Fronthaul: return "fronthaul";
    case PolicyViolation::Edge: return "edge";
    case PolicyViolation::D2d: return "d2d";
  }
  return "?";
}

struct PolicyCheck {
  PolicyViolation violation = PolicyViolation::None;
  double margin = 0.0;  // how far the constraint is exceeded (0 on pass)
  std::string detail;

  bool ok() const { return violation == PolicyViolation::None; }
  explicit operator bool() const { return ok(); }
};

inline PolicyCheck validate_policy(const SerialPolicy& pol, const SystemParams& p, double tol = 1e-9) {
  auto fail = [](PolicyViolation v, double margin, std::string what) { return PolicyCheck{v, margin, std::move(what)}; };
  const auto& pl = pol.placement;

  for (double f : {pl.joint, pl.exclusive_1, pl.exclusive_2, pl.uncached()})
    if (f < -tol) return fail(PolicyViolation::Placement, -f, "negative placement fraction");
  for (int en = 0; en < 2; ++en)
    if (pl.stored_at(en) > p.mu + tol)
      return fail(PolicyViolation::Cache, pl.stored_at(en) - p.mu,
                  "EN" + std::to_string(en + 1) + " stores more than mu of a file");

  for (const auto& e : pol.plan)
    if (e.fraction < -tol) return fail(PolicyViolation::Coverage, -e.fraction, "negative mode fraction");
  const double zf = pol.fraction(DeliveryMode::CacheZf);
  const double cloud = pol.fraction(DeliveryMode::CloudZf);
  double exclusive = 0.0;
  for (auto m : kAllModes)
    if (uses_exclusive_bits(m)) exclusive += pol.fraction(m);
  if (std::abs(zf - pl.joint) > tol)
    return fail(PolicyViolation::Coverage, std::abs(zf - pl.joint), "cache_zf does not match the joint fraction");
  if (std::abs(cloud - pl.uncached()) > tol)
    return fail(PolicyViolation::Coverage, std::abs(cloud - pl.uncached()), "cloud_zf does not match the uncached fraction");
  if (std::abs(exclusive - pl.exclusive_1 - pl.exclusive_2) > tol)
    return fail(PolicyViolation::Coverage, std::abs(exclusive - pl.exclusive_1 - pl.exclusive_2),
                "exclusive modes do not cover the exclusively cached bits");

  const auto load = pol.load();
  const double f_cap = pol.ndt.delta_f * p.r_f;
  if (load.fronthaul > f_cap + tol)
    return fail(PolicyViolation::Fronthaul, load.fronthaul - f_cap, "fronthaul load exceeds delta_f * r_f");
  if (load.edge > pol.ndt.delta_e + tol)
    return fail(PolicyViolation::Edge, load.edge - pol.ndt.delta_e, "edge load exceeds delta_e");
  const double d_cap = pol.ndt.delta_d * p.r_d;
  if (load.d2d > d_cap + tol) return fail(PolicyViolation::D2d, load.d2d - d_cap, "D2D load exceeds delta_d * r_d");
  return {};
}

// One block-Markov slot. Block indices are 1-based; an empty optional means
// the resource idles in that slot.
struct Slot {
  std::int64_t index = 0;
  std::optional<std::int64_t> fronthaul_block;
  std::optional<std::int64_t> edge_block;
  std::optional<std::int64_t> d2d_block;
  double duration = 0.0;  // normalized time
};

struct PipelinedSchedule {
  SerialPolicy policy;
  SimScale scale;
  std::int64_t blocks = 1;
  std::vector<Slot> slots;

  double slot_duration() const { return policy.ndt.max() / static_cast<double>(blocks); }
  double total_duration() const {
    double t = 0.0;
    for (const auto& s : slots) t += s.duration;
    return t;
  }
};

// Slot b carries fronthaul block b, edge block b-1 and D2D block b-2.
inline PipelinedSchedule block_markov_convert(const SerialPolicy& policy, const SimScale& scale) {
  if (scale.blocks < 1) throw ValidationError("blocks", "must be positive");
  PipelinedSchedule s;
  s.policy = policy;
  s.scale = scale;
  s.blocks = scale.blocks;
  const double dt = s.slot_duration();
  for (std::int64_t b = 1; b <= s.blocks + 2; ++b) {
    Slot slot;
    slot.index = b;
    if (b <= s.blocks) slot.fronthaul_block = b;
    if (b - 1 >= 1 && b - 1 <= s.blocks) slot.edge_block = b - 1;
    if (b - 2 >= 1) slot.d2d_block = b - 2;
    slot.duration = dt;
    s.slots.push_back(slot);
  }
  return s;
}

// Inverse direction: fronthaul first, then edge, then D2D, each reusing the
// pipelined strategy. Phase lengths are the per-resource busy times.
inline SerialPolicy serialize_pipelined(const PipelinedSchedule& schedule) {
  SerialPolicy out = schedule.policy;
  const double b = static_cast<double>(schedule.blocks);
  NdtTriple busy;
  for (const auto& slot : schedule.slots) {
    if (slot.fronthaul_block) busy.delta_f += schedule.policy.ndt.delta_f / b;
    if (slot.edge_block) busy.delta_e += schedule.policy.ndt.delta_e / b;
    if (slot.d2d_block) busy.delta_d += schedule.policy.ndt.delta_d / b;
  }
  out.ndt = busy;
  return out;
}

}  // namespace fogran
