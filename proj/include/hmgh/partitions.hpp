#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hmgh {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultPartitionCap = 1'000'000;

// Canonical set partition of {0..n-1}: blocks sorted internally and ordered by
// smallest element, so subsystem 0 always sits in the first block.
class Partition {
 public:
  explicit Partition(std::vector<std::vector<int>> blocks);

  int size() const { return n_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& block(int i) const { return blocks_.at(i); }
  // Block index of every subsystem.
  std::vector<int> assignment() const;

  // 1-based labels, e.g. "{1|23}" or "{1,10|2,...}" once n > 9.
  std::string to_string() const;

  auto operator<=>(const Partition&) const = default;

 private:
  struct Trusted {};
  Partition(std::vector<std::vector<int>> blocks, int n, Trusted) : blocks_(std::move(blocks)), n_(n) {}
  friend void for_each_k_partition(int, int, const std::function<void(const Partition&)>&);

  std::vector<std::vector<int>> blocks_;
  int n_ = 0;
};

// S(n, k), exact.
BigInt stirling2(int n, int k);
// S(n, k) as a saturating 64-bit count, for cap checks.
std::uint64_t stirling2_u64(int n, int k);

// Streams every canonical k-partition of n labels in lexicographic order of
// block contents. No cap; the visitor sees S(n, k) partitions.
void for_each_k_partition(int n, int k, const std::function<void(const Partition&)>& visit);

// Materialised list; throws ResourceError when S(n, k) exceeds the cap.
std::vector<Partition> unique_k_partitions(int n, int k, std::uint64_t cap = kDefaultPartitionCap);

// Throws ResourceError when S(n, k) > cap.
void require_partition_count(int n, int k, std::uint64_t cap = kDefaultPartitionCap);

}  // namespace hmgh
