#include "hmgh/partitions.hpp"

#include "hmgh/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>

namespace hmgh {

namespace mp = boost::multiprecision;

Partition::Partition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  int count = 0;
  for (const auto& b : blocks_) {
    if (b.empty()) throw DomainError("partition blocks must be non-empty");
    if (!std::is_sorted(b.begin(), b.end()) || std::adjacent_find(b.begin(), b.end()) != b.end())
      throw DomainError("partition blocks must be strictly increasing");
    count += static_cast<int>(b.size());
  }
  if (blocks_.empty()) throw DomainError("partition needs at least one block");
  n_ = count;
  std::vector<bool> seen(n_, false);
  for (const auto& b : blocks_)
    for (int x : b) {
      if (x < 0 || x >= n_ || seen[x]) throw DomainError("partition blocks must cover 0..n-1 disjointly");
      seen[x] = true;
    }
  for (std::size_t i = 1; i < blocks_.size(); ++i)
    if (blocks_[i].front() < blocks_[i - 1].front())
      throw DomainError("partition blocks must be ordered by smallest element");
}

std::vector<int> Partition::assignment() const {
  std::vector<int> a(n_, 0);
  for (int i = 0; i < block_count(); ++i)
    for (int x : blocks_[i]) a[x] = i;
  return a;
}

std::string Partition::to_string() const {
  const bool wide = n_ > 9;
  std::string s = "{";
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) s += '|';
    for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
      if (wide && j) s += ',';
      s += std::to_string(blocks_[i][j] + 1);
    }
  }
  return s + "}";
}

BigInt stirling2(int n, int k) {
  if (k < 1 || n < 1 || k > n) throw DomainError("stirling2 needs 1 <= k <= n");
  // S(n,k) = (1/k!) sum_j (-1)^j C(k,j) (k-j)^n, summed exactly.
  mp::cpp_rational sum = 0;
  BigInt binom = 1;
  for (int j = 0; j <= k; ++j) {
    BigInt term = binom * mp::pow(BigInt(k - j), static_cast<unsigned>(n));
    if (j % 2) sum -= term; else sum += term;
    binom = binom * (k - j) / (j + 1);
  }
  BigInt fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;
  mp::cpp_rational s = sum / mp::cpp_rational(fact);
  if (mp::denominator(s) != 1) throw std::logic_error("stirling2: non-integral result");
  return mp::numerator(s);
}

std::uint64_t stirling2_u64(int n, int k) {
  BigInt s = stirling2(n, k);
  if (s > BigInt(std::numeric_limits<std::uint64_t>::max())) return std::numeric_limits<std::uint64_t>::max();
  return s.convert_to<std::uint64_t>();
}

void require_partition_count(int n, int k, std::uint64_t cap) {
  std::uint64_t count = stirling2_u64(n, k);
  if (count > cap)
    throw ResourceError("S(" + std::to_string(n) + "," + std::to_string(k) + ") = " + std::to_string(count) +
                            " partitions exceeds cap " + std::to_string(cap),
                        count);
}

namespace {

struct Enumerator {
  const std::function<void(std::vector<std::vector<int>>&)>& emit;
  std::vector<std::vector<int>> blocks;

  // Partition `rest` (sorted) into `k` blocks, appending to `blocks`.
  void split(const std::vector<int>& rest, int k) {
    if (k == 1) {
      blocks.push_back(rest);
      emit(blocks);
      blocks.pop_back();
      return;
    }
    const int max_size = static_cast<int>(rest.size()) - (k - 1);
    std::vector<int> block{rest.front()};
    std::vector<bool> taken(rest.size(), false);
    taken[0] = true;
    grow(rest, k, max_size, block, taken, 0);
  }

  // Depth-first over first-block supersets: a prefix precedes its extensions,
  // smaller next elements come first, giving lexicographic block order.
  void grow(const std::vector<int>& rest, int k, int max_size, std::vector<int>& block, std::vector<bool>& taken,
            std::size_t last) {
    std::vector<int> remaining;
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (!taken[i]) remaining.push_back(rest[i]);
    blocks.push_back(block);
    split(remaining, k - 1);
    blocks.pop_back();
    if (static_cast<int>(block.size()) == max_size) return;
    for (std::size_t i = last + 1; i < rest.size(); ++i) {
      block.push_back(rest[i]);
      taken[i] = true;
      grow(rest, k, max_size, block, taken, i);
      taken[i] = false;
      block.pop_back();
    }
  }
};

}  // namespace

void for_each_k_partition(int n, int k, const std::function<void(const Partition&)>& visit) {
  if (k < 1 || n < 1 || k > n) throw DomainError("k-partitions need 1 <= k <= n");
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::function<void(std::vector<std::vector<int>>&)> emit = [&](std::vector<std::vector<int>>& blocks) {
    visit(Partition(blocks, n, Partition::Trusted{}));
  };
  Enumerator e{emit, {}};
  e.split(all, k);
}

std::vector<Partition> unique_k_partitions(int n, int k, std::uint64_t cap) {
  require_partition_count(n, k, cap);
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(stirling2_u64(n, k)));
  for_each_k_partition(n, k, [&](const Partition& p) { out.push_back(p); });
  return out;
}

}  // namespace hmgh
