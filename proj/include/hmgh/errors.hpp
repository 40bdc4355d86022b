#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmgh {

// Invalid arguments: bad shapes, labels, ranges, probes.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured size cap (dense dimension, partition count) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t requested)
      : std::runtime_error(what), requested_(requested) {}
  std::uint64_t requested() const { return requested_; }

 private:
  std::uint64_t requested_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmgh
