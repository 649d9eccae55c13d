#include "dlab/arith.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"

namespace dlab {

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  if (count == 0) return {};
  // p_n < n (log n + log log n) for n >= 6
  const double n = static_cast<double>(std::max<std::size_t>(count, 6));
  const auto limit = static_cast<std::uint64_t>(n * (std::log(n) + std::log(std::log(n)))) + 1;
  auto primes = primes_up_to(limit);
  primes.resize(count);
  return primes;
}

std::size_t prime_pi(std::uint64_t limit) { return primes_up_to(limit).size(); }

std::vector<PrimePower> factorize(std::uint64_t n) {
  if (n == 0) throw PreconditionError("factorize: n must be >= 1");
  if (n > kMaxFactorIndex) throw PreconditionError("n too large");
  std::vector<PrimePower> out;
  auto take = [&](std::uint64_t p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.push_back({p, e});
  };
  take(2);
  take(3);
  for (std::uint64_t p = 5; p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  const auto f = factorize(n);
  return f.empty() ? 1 : f.back().p;
}

double divisor_k_prime_power(unsigned k, unsigned e) {
  if (k == 0) return e == 0 ? 1.0 : 0.0;
  // C(e + k - 1, e), built incrementally; exact in double for desk-scale k, e
  double c = 1.0;
  for (unsigned i = 1; i <= e; ++i) c = c * static_cast<double>(k - 1 + i) / static_cast<double>(i);
  return std::round(c);
}

bool SmoothSet::contains(std::uint64_t n) const {
  return std::binary_search(members_.begin(), members_.end(), n);
}

SmoothSet smooth_enumerate(std::uint64_t r, std::uint64_t bound) {
  if (r < 2) throw PreconditionError("smooth_enumerate: r must be >= 2");
  if (bound < 1) throw PreconditionError("smooth_enumerate: bound must be >= 1");
  std::vector<std::uint64_t> members{1};
  for (std::uint64_t p : primes_up_to(r)) {
    const std::size_t existing = members.size();
    for (std::size_t i = 0; i < existing; ++i) {
      std::uint64_t m = members[i];
      while (m <= bound / p) {
        m *= p;
        members.push_back(m);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return SmoothSet(r, bound, std::move(members));
}

}  // namespace dlab
