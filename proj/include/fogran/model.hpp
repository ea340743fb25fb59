// model.hpp - shared value types and parameter validation for the 2x2 D2D-aided F-RAN

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogran {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Rates are in units of log P bits per symbol, so NDT arithmetic never
// sees the SNR; only the simulator converts back to bits.
struct SystemParams {
  double mu = 0.0;   // fractional cache size
  double r_f = 0.0;  // fronthaul rate
  double r_d = 0.0;  // D2D rate, per direction
  int n_files = 2;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// Finite-size scale used by the simulator.
struct SimScale {
  std::int64_t file_bits = 0;  // L
  double log_p = 0.0;          // bits per symbol of one interference-free link
  std::int64_t blocks = 1;     // B

  std::int64_t block_bits() const { return file_bits / blocks; }
  double reference_symbols() const { return static_cast<double>(file_bits) / log_p; }

  friend bool operator==(const SimScale&, const SimScale&) = default;
};

// Normalized delivery time; +inf encodes an infeasible instance.
struct Ndt {
  double value = 0.0;

  bool finite() const { return std::isfinite(value); }
  static Ndt infeasible() { return {kInf}; }

  friend auto operator<=>(const Ndt&, const Ndt&) = default;
};

struct NdtTriple {
  double delta_f = 0.0;
  double delta_e = 0.0;
  double delta_d = 0.0;

  double max() const { return std::max({delta_f, delta_e, delta_d}); }
  double sum() const { return delta_f + delta_e + delta_d; }

  friend bool operator==(const NdtTriple&, const NdtTriple&) = default;
};

// 1-based file indices, as in the demand vector (d1, d2).
struct DemandVector {
  int d1 = 1;
  int d2 = 2;

  bool coincident() const { return d1 == d2; }
  int file_of(int user) const { return user == 0 ? d1 : d2; }

  friend bool operator==(const DemandVector&, const DemandVector&) = default;
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Validation {
  bool ok = true;
  std::string field;
  std::string message;

  explicit operator bool() const { return ok; }
  static Validation pass() { return {}; }
  static Validation reject(std::string field, std::string message) {
    return {false, std::move(field), std::move(message)};
  }
};

inline Validation validate_params(const SystemParams& p) {
  // NaN fails every comparison below, so write the checks positively.
  if (!(p.mu >= 0.0 && p.mu <= 1.0)) return Validation::reject("mu", "must lie in [0, 1]");
  if (!(p.r_f >= 0.0) || std::isinf(p.r_f)) return Validation::reject("r_f", "must be a finite value >= 0");
  if (!(p.r_d >= 0.0) || std::isinf(p.r_d)) return Validation::reject("r_d", "must be a finite value >= 0");
  if (p.n_files < 2) return Validation::reject("n_files", "library needs at least 2 files");
  return Validation::pass();
}

inline Validation validate_scale(const SimScale& s) {
  if (s.file_bits <= 0) return Validation::reject("file_bits", "must be positive");
  if (!(s.log_p > 0.0) || std::isinf(s.log_p)) return Validation::reject("log_p", "must be a finite value > 0");
  if (s.blocks <= 0) return Validation::reject("blocks", "must be positive");
  if (s.file_bits % s.blocks != 0) return Validation::reject("blocks", "must divide file_bits");
  return Validation::pass();
}

inline void require_valid(const SystemParams& p) {
  if (auto v = validate_params(p); !v) throw ValidationError(v.field, v.message);
}

inline void require_valid(const SimScale& s) {
  if (auto v = validate_scale(s); !v) throw ValidationError(v.field, v.message);
}

// Under symmetric placement every file is cached the same way, so delivery
// cost depends only on whether the two demands coincide. One representative
// per class is enough for worst-case evaluation.
inline std::vector<DemandVector> worst_case_demands(int n_files) {
  if (n_files < 2) throw ValidationError("n_files", "library needs at least 2 files");
  return {DemandVector{1, 1}, DemandVector{1, 2}};
}

}  // namespace fogran
