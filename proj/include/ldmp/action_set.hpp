#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace ldmp {

/// Subset of the action set [0, k), k <= 64.
class ActionSet {
 public:
  ActionSet() = default;
  static ActionSet single(int a) { return ActionSet(std::uint64_t{1} << a); }
  static ActionSet full(int k) {
    return ActionSet(k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1);
  }

  void insert(int a) { bits_ |= std::uint64_t{1} << a; }
  bool contains(int a) const { return (bits_ >> a) & 1U; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool subset_of(ActionSet other) const { return (bits_ & ~other.bits_) == 0; }
  std::uint64_t bits() const { return bits_; }

  /// Smallest member; undefined on an empty set.
  int front() const { return std::countr_zero(bits_); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend ActionSet operator|(ActionSet a, ActionSet b) { return ActionSet(a.bits_ | b.bits_); }
  friend bool operator==(ActionSet a, ActionSet b) = default;

 private:
  explicit ActionSet(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

}  // namespace ldmp
