#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace dlab {

/// All primes p <= limit, ascending (sieve of Eratosthenes).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// The first count primes.
std::vector<std::uint64_t> first_primes(std::size_t count);

/// Number of primes <= limit.
std::size_t prime_pi(std::uint64_t limit);

struct PrimePower {
  std::uint64_t p;
  unsigned e;
};

/// Largest n accepted by factorize().
inline constexpr std::uint64_t kMaxFactorIndex = 1'000'000'000'000ULL;

/// Canonical factorization by trial division, ascending primes.
/// Throws PreconditionError("n too large") above kMaxFactorIndex.
std::vector<PrimePower> factorize(std::uint64_t n);

/// Largest prime factor (1 for n = 1).
std::uint64_t largest_prime_factor(std::uint64_t n);

/// C(e + k - 1, k - 1): number of ordered ways to split p^e into k factors.
double divisor_k_prime_power(unsigned k, unsigned e);

/// The r-smooth integers up to a bound.
class SmoothSet {
 public:
  SmoothSet(std::uint64_t r, std::uint64_t bound, std::vector<std::uint64_t> members)
      : r_(r), bound_(bound), members_(std::move(members)) {}

  std::uint64_t r() const { return r_; }
  std::uint64_t bound() const { return bound_; }
  const std::vector<std::uint64_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(std::uint64_t n) const;

 private:
  std::uint64_t r_;
  std::uint64_t bound_;
  std::vector<std::uint64_t> members_;
};

/// Every n <= bound whose prime factors are all <= r, sorted ascending.
/// Built as products of prime powers, not by filtering.
SmoothSet smooth_enumerate(std::uint64_t r, std::uint64_t bound);

}  // namespace dlab
