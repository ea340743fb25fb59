// simulator.hpp - slot-level bit-flow execution of serial and pipelined
// transmission intervals at finite (L, log P, B)
//
// The wireless channel is abstracted to the per-mode rates of scheme.hpp:
// every transmission is a set of bit ranges moving from a source that must
// already hold them (an EN cache, bits an EN received over the fronthaul, or
// an edge observation awaiting D2D help) to a user's ledger. A user decodes
// when its ledger covers the whole requested file.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogran/analysis.hpp"
#include "fogran/interval_set.hpp"
#include "fogran/model.hpp"
#include "fogran/scheme.hpp"

namespace fogran {

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Causality or conservation violated: a transmission needs bits its source
// does not hold yet, or a bit range would be credited twice.
class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstraintBreach : public std::runtime_error {
 public:
  ConstraintBreach(std::string resource, std::int64_t slot, double required, double available)
      : std::runtime_error(resource + " capacity exceeded in slot " + std::to_string(slot) + ": needs " +
                           std::to_string(required) + ", has " + std::to_string(available)),
        resource_(std::move(resource)),
        slot_(slot),
        required_(required),
        available_(available) {}

  const std::string& resource() const { return resource_; }
  std::int64_t slot() const { return slot_; }
  double required() const { return required_; }
  double available() const { return available_; }

 private:
  std::string resource_;
  std::int64_t slot_;
  double required_;
  double available_;
};

using Range = IntervalSet::Range;

namespace detail {

// ceil that ignores round-off just above an integer (500.0000000000001 -> 500)
inline std::int64_t ceil_tolerant(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

inline std::int64_t len(const Range& r) { return r.second - r.first; }

}  // namespace detail

// Bit layout of one block, identical for every block of every file.
// Offsets are relative to the start of the block.
struct BlockLayout {
  std::int64_t block_bits = 0;
  Range joint{0, 0};
  std::array<Range, 2> alignment{};    // per EN holding the bits
  std::array<Range, 2> assisted{};
  std::array<Range, 2> cooperation{};
  Range uncached{0, 0};

  std::array<Range, 2> exclusive() const {
    return {Range{alignment[0].first, cooperation[0].second}, Range{alignment[1].first, cooperation[1].second}};
  }

  // Cumulative boundaries are rounded up to whole bits; an EN never stores
  // more than ceil(stored fraction * block_bits) bits of a block.
  static BlockLayout from(const SerialPolicy& pol, std::int64_t block_bits) {
    using detail::ceil_tolerant;
    BlockLayout lay;
    lay.block_bits = block_bits;
    const double lb = static_cast<double>(block_bits);
    const auto& pl = pol.placement;
    auto clamp_bits = [&](std::int64_t v) { return std::clamp<std::int64_t>(v, 0, block_bits); };

    const std::int64_t joint_end = clamp_bits(ceil_tolerant(pl.joint * lb));
    const std::int64_t size0 = clamp_bits(ceil_tolerant((pl.joint + pl.exclusive_1) * lb) - joint_end);
    std::int64_t size1 = clamp_bits(ceil_tolerant((pl.joint + pl.exclusive_2) * lb) - joint_end);
    size1 = std::min(size1, block_bits - joint_end - size0);
    if (pl.exclusive_1 <= 0.0) size1 = std::max<std::int64_t>(0, size1);

    const double x = pol.fraction(DeliveryMode::Alignment);
    const double s = pol.fraction(DeliveryMode::FronthaulAssistedZf);
    const double d = pol.fraction(DeliveryMode::D2dCooperation);
    const double total = x + s + d;
    const double a_share = total > 0.0 ? x / total : 0.0;
    const double as_share = total > 0.0 ? (x + s) / total : 0.0;

    lay.joint = {0, joint_end};
    std::int64_t start = joint_end;
    for (int en = 0; en < 2; ++en) {
      const std::int64_t size = en == 0 ? size0 : size1;
      const double sz = static_cast<double>(size);
      const std::int64_t a = std::min(size, ceil_tolerant(a_share * sz));
      const std::int64_t b = total > 0.0 && d <= 0.0 ? size : std::min(size, ceil_tolerant(as_share * sz));
      lay.alignment[en] = {start, start + a};
      lay.assisted[en] = {start + a, start + b};
      lay.cooperation[en] = {start + b, start + size};
      if (total <= 0.0) {
        // exclusive bits without an exclusive mode cannot be delivered; keep
        // them in the alignment slot so the run fails loudly on coverage
        lay.alignment[en] = {start, start + size};
        lay.assisted[en] = lay.cooperation[en] = {start + size, start + size};
      }
      start += size;
    }
    lay.uncached = {start, block_bits};
    return lay;
  }
};

// Per-EN, per-file stored bit ranges.
struct CacheState {
  std::int64_t file_bits = 0;
  // stored[en][file - 1]
  std::array<std::vector<IntervalSet>, 2> stored;
  std::array<std::int64_t, 2> occupancy{0, 0};

  bool holds(int en, int file, std::int64_t lo, std::int64_t hi) const {
    return stored[en][file - 1].covers(lo, hi);
  }
};

inline CacheState place_caches(const SerialPolicy& pol, const SystemParams& p, const SimScale& scale) {
  require_valid(p);
  require_valid(scale);
  const auto check = validate_policy(pol, p);
  if (check.violation == PolicyViolation::Placement || check.violation == PolicyViolation::Cache)
    throw PlacementError("placement rejected: " + check.detail);

  const auto lay = BlockLayout::from(pol, scale.block_bits());
  CacheState cs;
  cs.file_bits = scale.file_bits;
  for (int en = 0; en < 2; ++en) {
    cs.stored[en].assign(static_cast<std::size_t>(p.n_files), IntervalSet{});
    for (int f = 0; f < p.n_files; ++f) {
      for (std::int64_t b = 0; b < scale.blocks; ++b) {
        const std::int64_t off = b * lay.block_bits;
        auto& set = cs.stored[en][f];
        set.insert(off + lay.joint.first, off + lay.joint.second);
        const auto ex = lay.exclusive()[en];
        set.insert(off + ex.first, off + ex.second);
      }
      cs.occupancy[en] += cs.stored[en][f].size();
    }
    // one bit of round-up per block and file is tolerated
    const double budget = p.mu * p.n_files * static_cast<double>(scale.file_bits) +
                          static_cast<double>(p.n_files) * static_cast<double>(scale.blocks);
    if (static_cast<double>(cs.occupancy[en]) > budget + 1e-6)
      throw PlacementError("EN" + std::to_string(en + 1) + " occupancy " + std::to_string(cs.occupancy[en]) +
                           " exceeds mu*N*L");
  }
  return cs;
}

struct BusySymbols {
  std::int64_t fronthaul_1 = 0;
  std::int64_t fronthaul_2 = 0;
  std::int64_t edge = 0;
  std::int64_t d2d_12 = 0;  // user 1 -> user 2
  std::int64_t d2d_21 = 0;  // user 2 -> user 1

  friend bool operator==(const BusySymbols&, const BusySymbols&) = default;
};

struct DeliveryReport {
  DemandVector demand;
  bool pipelined = false;
  bool passthrough = false;  // degenerate single-resource schedule run serially
  std::int64_t blocks = 1;
  std::int64_t total_symbols = 0;
  std::int64_t slot_symbols = 0;  // pipelined only
  BusySymbols busy;
  std::array<IntervalSet, 2> ledger;  // bits of each user's requested file
  bool decode_success = false;
  double empirical_ndt = 0.0;
  double closed_form = 0.0;
  double gap_to_closed_form = 0.0;
};

struct SimOptions {
  // Run a schedule whose load sits on a single resource without block-Markov
  // staggering (it cannot gain from pipelining).
  bool degenerate_passthrough = false;
};

namespace detail {

// Per-block resource load for one demand class.
struct BlockLoad {
  std::array<std::int64_t, 2> fronthaul{0, 0};  // bits per link
  std::int64_t edge_units = 0;                  // edge symbols * log_p
  std::array<std::int64_t, 2> d2d{0, 0};        // bits per direction, indexed by receiving user
};

inline BlockLoad block_load(const BlockLayout& lay, bool same_demand) {
  BlockLoad l;
  const auto j = len(lay.joint);
  const auto u = len(lay.uncached);
  const std::array<std::int64_t, 2> x = {len(lay.alignment[0]), len(lay.alignment[1])};
  const std::array<std::int64_t, 2> s = {len(lay.assisted[0]), len(lay.assisted[1])};
  const std::int64_t d = std::max(len(lay.cooperation[0]), len(lay.cooperation[1]));
  if (same_demand) {
    // one file: EN1 fetches the uncached part and multicasts; every other
    // mode degenerates to multicast from the holding EN
    l.fronthaul = {u, 0};
    l.edge_units = j + u + s[0] + s[1] + d + x[0] + x[1];
    l.d2d = {d, d};
  } else {
    // link m carries user m's uncached part plus the precoded signal for the
    // assisted pair cached at the other EN
    l.fronthaul = {u + s[1], u + s[0]};
    l.edge_units = j + u + s[0] + s[1] + 2 * d + 3 * std::max(x[0], x[1]);
    l.d2d = {d, d};
  }
  return l;
}

// Symbols a resource needs to carry `bits` at `rate` bits/symbol.
inline std::int64_t symbols_for(double bits, double rate, const char* resource, std::int64_t slot) {
  if (bits <= 0.0) return 0;
  if (!(rate > 0.0)) throw ConstraintBreach(resource, slot, bits, 0.0);
  return ceil_tolerant(bits / rate);
}

struct Phases {
  std::array<std::int64_t, 2> fronthaul_link{0, 0};
  std::int64_t edge = 0;
  std::array<std::int64_t, 2> d2d_dir{0, 0};  // by receiving user

  std::int64_t fronthaul() const { return std::max(fronthaul_link[0], fronthaul_link[1]); }
  std::int64_t d2d() const { return std::max(d2d_dir[0], d2d_dir[1]); }
  std::int64_t longest() const { return std::max({fronthaul(), edge, d2d()}); }
  int active() const { return int(fronthaul() > 0) + int(edge > 0) + int(d2d() > 0); }
};

// Rounding of block boundaries can add a few bits per block on top of the
// policy's real-valued loads; anything beyond this is a capacity breach.
inline constexpr double kRoundingBitsPerBlock = 16.0;

inline void check_claim(const char* resource, double actual_symbols, double claimed_delta, double rate,
                        const SimScale& scale, std::int64_t slot) {
  const double claimed = claimed_delta * scale.reference_symbols();
  const double allowance = kRoundingBitsPerBlock * static_cast<double>(scale.blocks) / std::max(rate, 1e-300);
  if (actual_symbols > claimed + allowance + 1e-6) throw ConstraintBreach(resource, slot, actual_symbols, claimed);
}

// Phase lengths of the whole TI (all blocks), checked against the policy's triple.
inline Phases phase_symbols(const SerialPolicy& pol, const BlockLoad& l, const SystemParams& p, const SimScale& scale,
                            std::array<std::int64_t, 3> first_slot) {
  const double blocks = static_cast<double>(scale.blocks);
  const double f_rate = p.r_f * scale.log_p;
  const double d_rate = p.r_d * scale.log_p;
  Phases ph;
  for (int m = 0; m < 2; ++m) {
    const double bits = blocks * static_cast<double>(l.fronthaul[m]);
    ph.fronthaul_link[m] = symbols_for(bits, f_rate, "fronthaul", first_slot[0]);
    if (bits > 0.0) check_claim("fronthaul", bits / f_rate, pol.ndt.delta_f, f_rate, scale, first_slot[0]);
  }
  const double edge_symbols = blocks * static_cast<double>(l.edge_units) / scale.log_p;
  ph.edge = ceil_tolerant(edge_symbols);
  check_claim("edge", edge_symbols, pol.ndt.delta_e, scale.log_p / 3.0, scale, first_slot[1]);
  for (int k = 0; k < 2; ++k) {
    const double bits = blocks * static_cast<double>(l.d2d[k]);
    ph.d2d_dir[k] = symbols_for(bits, d_rate, "d2d", first_slot[2]);
    if (bits > 0.0) check_claim("d2d", bits / d_rate, pol.ndt.delta_d, d_rate, scale, first_slot[2]);
  }
  return ph;
}

struct SlotPlan {
  std::int64_t index = 0;
  std::int64_t symbols = 0;
  std::vector<std::int64_t> fronthaul_blocks;
  std::vector<std::int64_t> edge_blocks;
  std::vector<std::int64_t> d2d_blocks;
};

// Sequential state machine for one transmission interval.
class TiEngine {
 public:
  TiEngine(const SerialPolicy& pol, DemandVector demand, const SystemParams& p, const SimScale& scale)
      : p_(p),
        scale_(scale),
        demand_(demand),
        layout_(BlockLayout::from(pol, scale.block_bits())),
        cache_(place_caches(pol, p, scale)),
        received_(),
        fronthaul_done_(static_cast<std::size_t>(scale.blocks + 1), false),
        edge_done_(static_cast<std::size_t>(scale.blocks + 1), false),
        d2d_done_(static_cast<std::size_t>(scale.blocks + 1), false) {
    if (demand.d1 < 1 || demand.d1 > p.n_files || demand.d2 < 1 || demand.d2 > p.n_files)
      throw ValidationError("demand", "file index outside the library");
    load_ = block_load(layout_, demand.coincident());
  }

  const BlockLayout& layout() const { return layout_; }
  const BlockLoad& load() const { return load_; }

  void run_slot(const SlotPlan& slot) {
    // D2D, then edge, then fronthaul: each stage only sees what earlier
    // slots produced.
    run_d2d(slot);
    run_edge(slot);
    run_fronthaul(slot);
  }

  const BusySymbols& busy() const { return busy_; }
  const std::array<IntervalSet, 2>& ledger() const { return ledger_; }

  bool decoded() const {
    return ledger_[0].covers(0, scale_.file_bits) && ledger_[1].covers(0, scale_.file_bits);
  }

 private:
  std::int64_t offset(std::int64_t block) const { return (block - 1) * layout_.block_bits; }

  void credit(int user, std::int64_t block, const Range& r, std::int64_t slot) {
    if (detail::len(r) <= 0) return;
    const auto off = offset(block);
    if (!ledger_[user].insert(off + r.first, off + r.second))
      throw ScheduleError("user " + std::to_string(user + 1) + " credited bits [" + std::to_string(off + r.first) +
                          ", " + std::to_string(off + r.second) + ") twice in slot " + std::to_string(slot));
  }

  void require_cached(int en, int file, std::int64_t block, const Range& r, std::int64_t slot) const {
    if (detail::len(r) <= 0) return;
    const auto off = offset(block);
    if (!cache_.holds(en, file, off + r.first, off + r.second))
      throw ScheduleError("EN" + std::to_string(en + 1) + " transmits uncached bits of file " + std::to_string(file) +
                          " in slot " + std::to_string(slot));
  }

  void require_received(int en, int file, std::int64_t block, const Range& r, std::int64_t slot) const {
    if (detail::len(r) <= 0) return;
    const auto off = offset(block);
    const auto it = received_[en].find(file);
    if (it == received_[en].end() || !it->second.covers(off + r.first, off + r.second))
      throw ScheduleError("EN" + std::to_string(en + 1) + " transmits fronthaul bits of file " + std::to_string(file) +
                          " before receiving them (slot " + std::to_string(slot) + ")");
  }

  void check_capacity(const char* resource, double need, double cap, std::int64_t slot) const {
    if (need > cap * (1.0 + 1e-12) + 1e-9) throw ConstraintBreach(resource, slot, need, cap);
  }

  void run_fronthaul(const SlotPlan& slot) {
    if (slot.fronthaul_blocks.empty()) return;
    const double cap = static_cast<double>(slot.symbols) * p_.r_f * scale_.log_p;
    const double n = static_cast<double>(slot.fronthaul_blocks.size());
    for (int m = 0; m < 2; ++m) {
      const double bits = n * static_cast<double>(load_.fronthaul[m]);
      check_capacity(m == 0 ? "fronthaul_1" : "fronthaul_2", bits, cap, slot.index);
      if (bits > 0.0) add_busy(m == 0 ? busy_.fronthaul_1 : busy_.fronthaul_2, bits / (p_.r_f * scale_.log_p), slot);
    }
    for (auto b : slot.fronthaul_blocks) {
      const auto off = offset(b);
      const auto& u = layout_.uncached;
      if (detail::len(u) > 0) {
        // file d_k's uncached part goes to EN k; with a shared demand EN1 fetches it
        const int users = demand_.coincident() ? 1 : 2;
        for (int k = 0; k < users; ++k) received_[k][demand_.file_of(k)].insert(off + u.first, off + u.second);
      }
      fronthaul_done_[b] = true;
    }
  }

  void run_edge(const SlotPlan& slot) {
    if (slot.edge_blocks.empty()) return;
    const double n = static_cast<double>(slot.edge_blocks.size());
    const double need = n * static_cast<double>(load_.edge_units) / scale_.log_p;
    check_capacity("edge", need, static_cast<double>(slot.symbols), slot.index);
    if (need > 0.0) add_busy(busy_.edge, need, slot);

    const bool same = demand_.coincident();
    std::array<std::int64_t, 2> own_antenna{0, 0};
    for (auto b : slot.edge_blocks) {
      const bool needs_fronthaul =
          detail::len(layout_.uncached) > 0 ||
          (!same && (detail::len(layout_.assisted[0]) > 0 || detail::len(layout_.assisted[1]) > 0));
      if (needs_fronthaul && !fronthaul_done_[b])
        throw ScheduleError("edge transmits block " + std::to_string(b) + " before its fronthaul completed (slot " +
                            std::to_string(slot.index) + ")");
      for (int k = 0; k < 2; ++k) {
        const int f = demand_.file_of(k);
        const int other = demand_.file_of(1 - k);
        // zero-forcing on jointly cached bits
        require_cached(0, f, b, layout_.joint, slot.index);
        require_cached(1, f, b, layout_.joint, slot.index);
        credit(k, b, layout_.joint, slot.index);
        // uncached bits, at the EN that fetched them
        require_received(same ? 0 : k, f, b, layout_.uncached, slot.index);
        credit(k, b, layout_.uncached, slot.index);
        for (int en = 0; en < 2; ++en) {
          require_cached(en, f, b, layout_.alignment[en], slot.index);
          credit(k, b, layout_.alignment[en], slot.index);
          require_cached(en, f, b, layout_.assisted[en], slot.index);
          if (!same) require_cached(en, other, b, layout_.assisted[en], slot.index);
          credit(k, b, layout_.assisted[en], slot.index);
          require_cached(en, f, b, layout_.cooperation[en], slot.index);
        }
        // cooperation: the EN paired with this user reaches it directly, the
        // other stream is resolved once the peer's observation arrives
        credit(k, b, layout_.cooperation[k], slot.index);
        const auto& rest = layout_.cooperation[1 - k];
        if (detail::len(rest) > 0) pending_[k][b] = rest;
        const std::int64_t direct = detail::len(layout_.joint) + detail::len(layout_.uncached) +
                                    detail::len(layout_.alignment[0]) + detail::len(layout_.alignment[1]) +
                                    detail::len(layout_.assisted[0]) + detail::len(layout_.assisted[1]) +
                                    detail::len(layout_.cooperation[k]);
        own_antenna[k] += direct;
      }
      edge_done_[b] = true;
    }
    const double per_user_cap = static_cast<double>(slot.symbols) * scale_.log_p;
    for (int k = 0; k < 2; ++k) check_capacity("edge_user", static_cast<double>(own_antenna[k]), per_user_cap, slot.index);
  }

  void run_d2d(const SlotPlan& slot) {
    if (slot.d2d_blocks.empty()) return;
    const double cap = static_cast<double>(slot.symbols) * p_.r_d * scale_.log_p;
    const double n = static_cast<double>(slot.d2d_blocks.size());
    for (int k = 0; k < 2; ++k) {
      const double bits = n * static_cast<double>(load_.d2d[k]);
      // load_.d2d[k] is what user k receives, i.e. the (other -> k) direction
      check_capacity(k == 0 ? "d2d_21" : "d2d_12", bits, cap, slot.index);
      if (bits > 0.0) add_busy(k == 0 ? busy_.d2d_21 : busy_.d2d_12, bits / (p_.r_d * scale_.log_p), slot);
    }
    for (auto b : slot.d2d_blocks) {
      if (!edge_done_[b])
        throw ScheduleError("D2D conferencing on block " + std::to_string(b) + " before its edge transmission (slot " +
                            std::to_string(slot.index) + ")");
      for (int k = 0; k < 2; ++k) {
        auto it = pending_[k].find(b);
        if (it == pending_[k].end()) continue;
        credit(k, b, it->second, slot.index);
        pending_[k].erase(it);
      }
      d2d_done_[b] = true;
    }
  }

  static void add_busy(std::int64_t& counter, double symbols, const SlotPlan& slot) {
    counter += std::min(slot.symbols, ceil_tolerant(symbols));
  }

  SystemParams p_;
  SimScale scale_;
  DemandVector demand_;
  BlockLayout layout_;
  BlockLoad load_;
  CacheState cache_;
  // received_[en][file] = bits delivered over the fronthaul so far
  std::array<std::map<int, IntervalSet>, 2> received_;
  std::vector<bool> fronthaul_done_, edge_done_, d2d_done_;
  // pending_[user][block] = cooperation bits waiting for the peer's observation
  std::array<std::map<std::int64_t, Range>, 2> pending_;
  std::array<IntervalSet, 2> ledger_;
  BusySymbols busy_;
};

inline std::vector<std::int64_t> all_blocks(std::int64_t blocks) {
  std::vector<std::int64_t> v;
  for (std::int64_t b = 1; b <= blocks; ++b) v.push_back(b);
  return v;
}

inline DeliveryReport serial_run(const SerialPolicy& pol, DemandVector demand, const SystemParams& p,
                                 const SimScale& scale) {
  TiEngine engine(pol, demand, p, scale);
  const auto ph = phase_symbols(pol, engine.load(), p, scale, {1, 2, 3});
  const auto blocks = all_blocks(scale.blocks);
  engine.run_slot({1, ph.fronthaul(), blocks, {}, {}});
  engine.run_slot({2, ph.edge, {}, blocks, {}});
  engine.run_slot({3, ph.d2d(), {}, {}, blocks});

  DeliveryReport r;
  r.demand = demand;
  r.blocks = scale.blocks;
  r.total_symbols = ph.fronthaul() + ph.edge + ph.d2d();
  r.busy = engine.busy();
  r.ledger = engine.ledger();
  r.decode_success = engine.decoded();
  r.empirical_ndt = static_cast<double>(r.total_symbols) / scale.reference_symbols();
  return r;
}

}  // namespace detail

// Fronthaul for all blocks, then the edge phase, then D2D conferencing.
// The gap is measured against the policy's serial NDT (sum of its triple).
inline DeliveryReport run_serial_ti(const SerialPolicy& pol, DemandVector demand, const SystemParams& p,
                                    const SimScale& scale) {
  require_valid(p);
  require_valid(scale);
  auto r = detail::serial_run(pol, demand, p, scale);
  r.closed_form = pol.ndt.sum();
  r.gap_to_closed_form = r.empirical_ndt - r.closed_form;
  return r;
}

// Executes the schedule's slots as given; each slot lasts
// ceil(longest phase / B) symbols. The gap is measured against the
// closed-form minimum pipelined NDT.
inline DeliveryReport run_pipelined_ti(const PipelinedSchedule& schedule, DemandVector demand, const SystemParams& p,
                                       const SimOptions& opts = {}) {
  require_valid(p);
  require_valid(schedule.scale);
  const auto& scale = schedule.scale;
  if (schedule.blocks != scale.blocks) throw ValidationError("blocks", "schedule and scale disagree on B");
  const double closed = min_pipelined_ndt(p).value;

  detail::TiEngine engine(schedule.policy, demand, p, scale);
  const auto ph = detail::phase_symbols(schedule.policy, engine.load(), p, scale, {1, 2, 3});

  if (opts.degenerate_passthrough && ph.active() <= 1) {
    auto r = detail::serial_run(schedule.policy, demand, p, scale);
    r.pipelined = true;
    r.passthrough = true;
    r.closed_form = closed;
    r.gap_to_closed_form = r.empirical_ndt - closed;
    return r;
  }

  const std::int64_t slot_symbols = (ph.longest() + scale.blocks - 1) / scale.blocks;
  for (const auto& s : schedule.slots) {
    detail::SlotPlan plan;
    plan.index = s.index;
    plan.symbols = slot_symbols;
    if (s.fronthaul_block) plan.fronthaul_blocks.push_back(*s.fronthaul_block);
    if (s.edge_block) plan.edge_blocks.push_back(*s.edge_block);
    if (s.d2d_block) plan.d2d_blocks.push_back(*s.d2d_block);
    for (const auto* v : {&plan.fronthaul_blocks, &plan.edge_blocks, &plan.d2d_blocks})
      for (auto b : *v)
        if (b < 1 || b > scale.blocks) throw ScheduleError("slot " + std::to_string(s.index) + " names a block out of range");
    engine.run_slot(plan);
  }

  DeliveryReport r;
  r.demand = demand;
  r.pipelined = true;
  r.blocks = scale.blocks;
  r.slot_symbols = slot_symbols;
  r.total_symbols = slot_symbols * static_cast<std::int64_t>(schedule.slots.size());
  r.busy = engine.busy();
  r.ledger = engine.ledger();
  r.decode_success = engine.decoded();
  r.empirical_ndt = static_cast<double>(r.total_symbols) / scale.reference_symbols();
  r.closed_form = closed;
  r.gap_to_closed_form = r.empirical_ndt - closed;
  return r;
}

namespace detail {

template <class Run>
DeliveryReport worst_of(int n_files, Run&& run) {
  std::optional<DeliveryReport> worst;
  for (const auto& d : worst_case_demands(n_files)) {
    auto r = run(d);
    // ties go to the later class (distinct demands)
    if (!worst || r.total_symbols >= worst->total_symbols) worst = std::move(r);
  }
  return *worst;
}

}  // namespace detail

inline DeliveryReport worst_case_report(const SerialPolicy& pol, const SystemParams& p, const SimScale& scale) {
  return detail::worst_of(p.n_files, [&](DemandVector d) { return run_serial_ti(pol, d, p, scale); });
}

inline DeliveryReport worst_case_report(const PipelinedSchedule& schedule, const SystemParams& p,
                                        const SimOptions& opts = {}) {
  return detail::worst_of(p.n_files, [&](DemandVector d) { return run_pipelined_ti(schedule, d, p, opts); });
}

struct ConvergencePoint {
  std::int64_t blocks = 0;
  double log_p = 0.0;
  std::int64_t total_symbols = 0;
  double empirical_ndt = 0.0;
  double closed_form_gap = 0.0;
};

struct ConvergenceSeries {
  bool infeasible = false;
  double closed_form = 0.0;
  std::int64_t file_bits = 0;
  std::vector<ConvergencePoint> points;
};

// Worst-case pipelined runs of the synthesized policy over every (B, log P)
// pair, in the order given.
inline ConvergenceSeries convergence_study(const SystemParams& p, const std::vector<std::int64_t>& block_list,
                                           const std::vector<double>& log_p_list, std::int64_t file_bits,
                                           const SimOptions& opts = {}) {
  ConvergenceSeries series;
  series.file_bits = file_bits;
  const Ndt closed = min_pipelined_ndt(p);
  series.closed_form = closed.value;
  if (!closed.finite()) {
    series.infeasible = true;
    return series;
  }
  const auto policy = synthesize_serial_policy(p);
  for (auto b : block_list) {
    for (double lp : log_p_list) {
      const SimScale scale{file_bits, lp, b};
      require_valid(scale);
      const auto report = worst_case_report(block_markov_convert(policy, scale), p, opts);
      series.points.push_back({b, lp, report.total_symbols, report.empirical_ndt, report.gap_to_closed_form});
    }
  }
  return series;
}

}  // namespace fogran
