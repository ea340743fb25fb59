// analysis.hpp - closed-form minimum NDT under pipelined delivery and the
// quantities derived from it (regimes, D2D threshold, breakpoints, gain bounds).

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fogran/model.hpp"

namespace fogran {

// Relative tolerance used to decide that two closed-form terms coincide.
// Terms that agree in exact arithmetic can differ by a few ulps once evaluated.
inline constexpr double kTieTolerance = 1e-12;

inline bool nearly_equal(double a, double b, double rel = kTieTolerance) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// The three arguments of the max, in order: fronthaul, edge + D2D, ideal.
struct NdtTerms {
  double fronthaul = 0.0;
  double edge_d2d = 0.0;
  double ideal = 1.0;
};

inline NdtTerms ndt_terms(const SystemParams& p) {
  NdtTerms t;
  const double uncached = 1.0 - 2.0 * p.mu;
  // Nothing has to cross the fronthaul once two caches can hold every bit,
  // even when r_f == 0.
  if (uncached <= 0.0)
    t.fronthaul = 0.0;
  else
    t.fronthaul = p.r_f > 0.0 ? uncached / p.r_f : kInf;
  t.edge_d2d = (2.0 - p.mu) / (1.0 + p.r_f + p.r_d);
  return t;
}

inline Ndt min_pipelined_ndt(const SystemParams& p) {
  require_valid(p);
  const auto t = ndt_terms(p);
  if (!std::isfinite(t.fronthaul)) return Ndt::infeasible();
  const double floor_term = std::max(t.fronthaul, t.ideal);
  // The edge/D2D term only wins when it is strictly above the other two;
  // an ulp-level excess is a tie and must not make the result depend on r_d.
  if (t.edge_d2d > floor_term && !nearly_equal(t.edge_d2d, floor_term)) return {t.edge_d2d};
  return {floor_term};
}

enum class RegimeTag { FronthaulLimited, EdgeD2DLimited, Ideal, Infeasible };

inline std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::FronthaulLimited: return "FronthaulLimited";
    case RegimeTag::EdgeD2DLimited: return "EdgeD2DLimited";
    case RegimeTag::Ideal: return "Ideal";
    case RegimeTag::Infeasible: return "Infeasible";
  }
  return "?";
}

struct Regime {
  RegimeTag tag = RegimeTag::Ideal;
  bool tie = false;

  std::string label() const { return tie ? "tie(" + to_string(tag) + ")" : to_string(tag); }
  friend bool operator==(const Regime&, const Regime&) = default;
};

// On ties the reported tag follows the order Ideal, EdgeD2DLimited,
// FronthaulLimited (the higher-mu side of a breakpoint knot).
inline Regime classify_regime(const SystemParams& p) {
  const Ndt ndt = min_pipelined_ndt(p);
  if (!ndt.finite()) return {RegimeTag::Infeasible, false};
  const auto t = ndt_terms(p);
  const bool hit_ideal = nearly_equal(t.ideal, ndt.value);
  const bool hit_edge = nearly_equal(t.edge_d2d, ndt.value);
  const bool hit_fronthaul = nearly_equal(t.fronthaul, ndt.value);
  const int hits = int(hit_ideal) + int(hit_edge) + int(hit_fronthaul);
  Regime r;
  r.tie = hits > 1;
  if (hit_ideal)
    r.tag = RegimeTag::Ideal;
  else if (hit_edge)
    r.tag = RegimeTag::EdgeD2DLimited;
  else
    r.tag = RegimeTag::FronthaulLimited;
  return r;
}

// D2D rate beyond which the minimum NDT stops improving. The raw value can be
// negative, meaning the D2D links are not needed at all.
struct D2dThreshold {
  double raw = 0.0;
  double clamped = 0.0;
};

inline D2dThreshold d2d_threshold(const SystemParams& p) {
  require_valid(p);
  const double edge_bound = 1.0 - p.r_f - p.mu;
  double raw = edge_bound;
  if (p.mu < 0.5) {
    // r_f == 0 gives -1 here: the instance is infeasible and no D2D rate helps.
    const double fronthaul_bound = p.r_f * (1.0 + p.mu) / (1.0 - 2.0 * p.mu) - 1.0;
    raw = std::min(edge_bound, fronthaul_bound);
  }
  return {raw, std::max(0.0, raw)};
}

inline bool is_d2d_beneficial(double mu, double r_f) {
  return r_f < 1.0 && mu >= (1.0 - r_f) / (2.0 + r_f) && mu < 1.0 - r_f;
}

struct Knot {
  double mu = 0.0;
  double ndt = 0.0;
};

// Piecewise-linear minimum NDT as a function of mu for fixed (r_f, r_d).
class BreakpointCurve {
 public:
  explicit BreakpointCurve(std::vector<Knot> knots) : knots_(std::move(knots)) {}

  const std::vector<Knot>& knots() const { return knots_; }

  std::vector<double> slopes() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < knots_.size(); ++i)
      out.push_back((knots_[i].ndt - knots_[i - 1].ndt) / (knots_[i].mu - knots_[i - 1].mu));
    return out;
  }

  double operator()(double mu) const {
    if (mu <= knots_.front().mu) return knots_.front().ndt;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const auto& a = knots_[i - 1];
      const auto& b = knots_[i];
      if (mu <= b.mu) {
        if (mu == b.mu) return b.ndt;
        return a.ndt + (b.ndt - a.ndt) * (mu - a.mu) / (b.mu - a.mu);
      }
    }
    return knots_.back().ndt;
  }

 private:
  std::vector<Knot> knots_;
};

class UnsupportedRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline BreakpointCurve ndt_vs_mu_breakpoints(double r_f, double r_d) {
  if (!(r_f > 0.0 && r_f < 1.0)) throw UnsupportedRange("breakpoint curve needs 0 < r_f < 1");
  if (!(r_d >= 0.0) || std::isinf(r_d)) throw ValidationError("r_d", "must be a finite value >= 0");
  std::vector<Knot> knots;
  knots.push_back({0.0, 1.0 / r_f});
  if (r_d < (1.0 - r_f) / 2.0) {
    // fronthaul term meets the edge/D2D term above 1, which then decays to 1
    const double denom = 2.0 + r_f + 2.0 * r_d;
    knots.push_back({(1.0 - r_f + r_d) / denom, 3.0 / denom});
    knots.push_back({1.0 - r_f - r_d, 1.0});
  } else {
    // fronthaul term drops straight to 1
    knots.push_back({(1.0 - r_f) / 2.0, 1.0});
  }
  knots.push_back({1.0, 1.0});
  return BreakpointCurve(std::move(knots));
}

inline double pipelining_gain_bound(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("mu", "must lie in [0, 1]");
  return mu < 0.5 ? 2.0 + mu : 2.0 - mu;
}

// Set of (r_f, r_d) at which the pipelining-gain bound holds with equality.
struct GainEqualityConditions {
  enum class Branch { LowCache, HighCache };
  Branch branch = Branch::LowCache;
  double mu = 0.0;
  // low cache: r_f == r_f_exact and r_d in [r_d_min, r_d_max]
  double r_f_exact = 0.0;
  double r_d_min = 0.0;
  double r_d_max = 1.0;
  // high cache: r_f <= r_f_max, r_d <= r_d_max, r_f + r_d >= sum_min
  double r_f_max = 1.0;
  double sum_min = 0.0;

  bool contains(double r_f, double r_d, double tol = 1e-12) const {
    if (branch == Branch::LowCache)
      return std::abs(r_f - r_f_exact) <= tol && r_d >= r_d_min - tol && r_d <= r_d_max + tol;
    return r_f >= 0.0 && r_d >= 0.0 && r_f <= r_f_max + tol && r_d <= r_d_max + tol && r_f + r_d >= sum_min - tol;
  }
};

inline GainEqualityConditions gain_equality_conditions(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("mu", "must lie in [0, 1]");
  GainEqualityConditions c;
  c.mu = mu;
  if (mu < 0.5) {
    c.branch = GainEqualityConditions::Branch::LowCache;
    c.r_f_exact = 1.0 - 2.0 * mu;
    c.r_d_min = mu;
    c.r_d_max = 1.0;
  } else {
    c.branch = GainEqualityConditions::Branch::HighCache;
    c.r_f_max = 1.0;
    c.r_d_max = 1.0;
    c.sum_min = 1.0 - mu;
  }
  return c;
}

// Serial upper bound obtained by running the optimal pipelined policy's
// fronthaul, edge and D2D stages back to back.
inline Ndt serialization_upper_bound(Ndt pipelined) {
  if (!pipelined.finite()) return Ndt::infeasible();
  return {3.0 * pipelined.value};
}

}  // namespace fogran
