#pragma once

#include <compare>
#include <cstdint>
#include <limits>

#include "remi/expression.hpp"
#include "remi/prominence.hpp"

namespace remi {

// Estimated complexity in bits, held in fixed point (2^-32 bit resolution).
// Integer sums are associative, so the complexity of a conjunction does not
// depend on the order in which components are added, and comparisons between
// equal-cost expressions are exact.
class ComplexityBits {
 public:
  static constexpr double kScale = 4294967296.0;  // 2^32

  constexpr ComplexityBits() = default;
  static ComplexityBits from_bits(double bits);
  static constexpr ComplexityBits from_raw(std::int64_t raw) {
    ComplexityBits c;
    c.raw_ = raw;
    return c;
  }
  static constexpr ComplexityBits infinity() { return from_raw(std::numeric_limits<std::int64_t>::max()); }

  double value() const;
  constexpr std::int64_t raw() const { return raw_; }
  constexpr bool is_infinite() const { return raw_ == std::numeric_limits<std::int64_t>::max(); }

  ComplexityBits& operator+=(ComplexityBits other);
  friend ComplexityBits operator+(ComplexityBits a, ComplexityBits b) { return a += b; }
  friend constexpr auto operator<=>(ComplexityBits, ComplexityBits) = default;

 private:
  std::int64_t raw_ = 0;
};

// Chain-rule cost of one subgraph expression: one log2-rank term per
// predicate and per bound object, each conditioned on the preceding atoms.
// Throws std::invalid_argument when rho has no match in the model's store.
ComplexityBits bits_of_subgraph(const ProminenceModel& model, const SubgraphExpression& rho);

// Sum over the components.
ComplexityBits bits_of_expression(const ProminenceModel& model, const Expression& e);

}  // namespace remi
