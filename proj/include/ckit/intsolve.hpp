#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ckit/corresp.hpp"

namespace ckit {

/// Exact rational arithmetic on 64-bit numerator/denominator with 128-bit
/// intermediates; plenty for desk-scale fixed-vector systems.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n);  // NOLINT(google-explicit-constructor)
  Rat(long long n, long long d);

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;
  Rat operator-() const;
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const;
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class Rel { LE, GE, EQ };

/// One constraint sum_j coeffs[j] x_j (rel) rhs.
struct LinConstraint {
  std::vector<Rat> coeffs;
  Rel rel;
  Rat rhs;
};

struct Feasibility {
  bool feasible;
  std::vector<Rat> point;   // a rational solution when feasible
  std::string certificate;  // elimination trace of the contradiction otherwise
};

/// Fourier-Motzkin elimination over the rationals. Exact; intended for a
/// handful of variables.
Feasibility solve_linear_feasibility(int vars, std::vector<LinConstraint> constraints);

struct FixedVectorResult {
  bool exists;
  std::vector<long long> vec;  // positive integer solution when exists
  std::string certificate;
};

/// Positive integer m with mu^T m = m (row side when transpose = true uses mu
/// itself: mu g = g). Entries are bounded by `cap`; solutions are scaled from
/// an exact rational point.
FixedVectorResult positive_fixed_vector(const IMat& mu, bool transpose,
                                        long long cap = 1000000);

/// Positive integer m with (mu^T m)_j <= m_j.
FixedVectorResult positive_subinvariant_vector(const IMat& mu, long long cap = 1000000);

/// Positive integer h >= lower with mu h = h.
FixedVectorResult positive_fixed_vector_above(const IMat& mu, const std::vector<long long>& lower,
                                              long long cap = 1000000);

}  // namespace ckit
