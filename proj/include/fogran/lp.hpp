// lp.hpp - small dense two-phase simplex
//
// Solves   maximize c'x   subject to   A x <= b,  x >= 0
// with Bland-style tie breaking on (value, index) so the pivot sequence, and
// therefore the returned vertex, is deterministic. Negative entries in b are
// handled by an auxiliary first phase. Sized for the handful of variables the
// scheme synthesizer needs; no sparsity, no presolve.

#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace fogran::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;

  bool optimal() const { return status == Status::Optimal; }
};

// Builder for A x <= b rows; equality rows are added as two inequalities.
class Problem {
 public:
  explicit Problem(std::size_t n_vars) : n_(n_vars), c_(n_vars, 0.0) {}

  std::size_t variables() const { return n_; }

  void set_objective(std::vector<double> c) { c_ = std::move(c); c_.resize(n_, 0.0); }

  void add_le(std::vector<double> row, double rhs) {
    row.resize(n_, 0.0);
    a_.push_back(std::move(row));
    b_.push_back(rhs);
  }

  void add_ge(std::vector<double> row, double rhs) {
    for (auto& v : row) v = -v;
    add_le(std::move(row), -rhs);
  }

  void add_eq(const std::vector<double>& row, double rhs) {
    add_le(row, rhs);
    add_ge(row, rhs);
  }

  Result maximize() const;

 private:
  std::size_t n_;
  std::vector<double> c_;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
};

namespace detail {

class Tableau {
 public:
  static constexpr double kEps = 1e-10;

  Tableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        nonbasic_(n_ + 1),
        basic_(m_),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) d_[i][j] = a[i][j];
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      d_[i][n_] = -1.0;  // auxiliary column for phase one
      d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  Result solve() {
    Result res;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -kEps) {
        res.status = Status::Infeasible;
        return res;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = 0;
        for (int j = 1; j <= n_; ++j)
          if (std::make_pair(d_[i][j], nonbasic_[j]) < std::make_pair(d_[i][s], nonbasic_[s])) s = j;
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    res.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < n_) res.x[basic_[i]] = d_[i][n_ + 1];
    res.status = bounded ? Status::Optimal : Status::Unbounded;
    res.objective = bounded ? d_[m_][n_ + 1] : std::numeric_limits<double>::infinity();
    return res;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_[i][s]) <= kEps) continue;
      const double f = d_[i][s] * inv;
      for (int j = 0; j < n_ + 2; ++j) d_[i][j] -= d_[r][j] * f;
      d_[i][s] = d_[r][s] * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i][s] *= -inv;
    d_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const int x = m_ + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (s == -1 || std::make_pair(d_[x][j], nonbasic_[j]) < std::make_pair(d_[x][s], nonbasic_[s])) s = j;
      }
      if (d_[x][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] <= kEps) continue;
        if (r == -1 || std::make_pair(d_[i][n_ + 1] / d_[i][s], basic_[i]) <
                           std::make_pair(d_[r][n_ + 1] / d_[r][s], basic_[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> d_;
};

}  // namespace detail

inline Result Problem::maximize() const {
  detail::Tableau t(a_, b_, c_);
  return t.solve();
}

}  // namespace fogran::lp
