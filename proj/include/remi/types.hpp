#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace remi {

using TermId = std::uint32_t;
using PredicateId = std::uint32_t;

inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

// Appended to the IRI of a predicate p to name its materialized inverse. '^'
// cannot occur in an N-Triples IRIREF, so the synthetic name never collides
// with a loaded predicate.
inline constexpr std::string_view kInverseSuffix = "^-1";

enum class TermKind : std::uint8_t { Entity, Literal, Blank };

std::string_view to_string(TermKind kind);

struct Term {
  TermKind kind = TermKind::Entity;
  TermId id = kNoId;
  // IRI text without angle brackets, the literal in N-Triples notation
  // (quoted, escaped, with its language tag or datatype), or the blank label
  // without the "_:" prefix.
  std::string lexical;

  bool is_entity() const { return kind == TermKind::Entity; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_blank() const { return kind == TermKind::Blank; }
};

struct Predicate {
  PredicateId id = kNoId;
  std::string lexical;
  // Set on both members of a materialized pair p / p^-1.
  std::optional<PredicateId> inverse_of;
  bool is_inverse = false;
};

struct Triple {
  TermId subject;
  PredicateId predicate;
  TermId object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

}  // namespace remi
