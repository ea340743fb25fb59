// interval_set.hpp - disjoint half-open bit ranges

#pragma once

#include <cstdint>
#include <iterator>
#include <map>
#include <utility>
#include <vector>

namespace fogran {

class IntervalSet {
 public:
  using Range = std::pair<std::int64_t, std::int64_t>;  // [lo, hi)

  // Returns false (and leaves the set untouched) if [lo, hi) overlaps a
  // range already present. Adjacent ranges are merged.
  bool insert(std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return true;
    const std::int64_t added = hi - lo;
    auto next = ranges_.lower_bound(lo);
    if (next != ranges_.end() && next->first < hi) return false;
    if (next != ranges_.begin()) {
      auto prev = std::prev(next);
      if (prev->second > lo) return false;
      if (prev->second == lo) {
        lo = prev->first;
        ranges_.erase(prev);
      }
    }
    if (next != ranges_.end() && next->first == hi) {
      hi = next->second;
      ranges_.erase(next);
    }
    ranges_.emplace(lo, hi);
    size_ += added;
    return true;
  }

  bool covers(std::int64_t lo, std::int64_t hi) const {
    if (lo >= hi) return true;
    auto it = ranges_.upper_bound(lo);
    if (it == ranges_.begin()) return false;
    --it;
    return it->first <= lo && it->second >= hi;
  }

  std::int64_t size() const { return size_; }
  bool empty() const { return ranges_.empty(); }

  std::vector<Range> ranges() const { return {ranges_.begin(), ranges_.end()}; }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.ranges_ == b.ranges_; }

 private:
  std::map<std::int64_t, std::int64_t> ranges_;
  std::int64_t size_ = 0;
};

}  // namespace fogran
