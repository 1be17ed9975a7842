#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <variant>
#include <vector>

#include "remi/types.hpp"

namespace remi {

// Variables of the expression language. Every subgraph expression is rooted
// at X and introduces at most one additional variable Y.
enum class Variable : std::uint8_t { X, Y };

using Argument = std::variant<Variable, TermId>;

struct Atom {
  PredicateId predicate = kNoId;
  Argument subject = Variable::X;
  Argument object = Variable::Y;

  bool has_variable() const {
    return std::holds_alternative<Variable>(subject) ||
           std::holds_alternative<Variable>(object);
  }
  friend bool operator==(const Atom&, const Atom&) = default;
};

using Assignment = std::map<Variable, TermId>;

enum class Shape : std::uint8_t { OneAtom, Path, PathStar, Closed2, Closed3 };

std::string_view to_string(Shape shape);

// One of the five rooted shapes:
//   OneAtom   p0(x, I0)
//   Path      p0(x, y) ∧ p1(y, I1)
//   PathStar  p0(x, y) ∧ p1(y, I1) ∧ p2(y, I2)
//   Closed2   p0(x, y) ∧ p1(x, y)
//   Closed3   p0(x, y) ∧ p1(x, y) ∧ p2(x, y)
// predicates[i] and objects[i] describe atom i; objects[i] is kNoId when the
// atom's second argument is a variable. Use the factories, which produce the
// canonical form, so that structural equality is member-wise equality.
struct SubgraphExpression {
  Shape shape = Shape::OneAtom;
  std::array<PredicateId, 3> predicates{kNoId, kNoId, kNoId};
  std::array<TermId, 3> objects{kNoId, kNoId, kNoId};

  static SubgraphExpression one_atom(PredicateId p0, TermId object);
  static SubgraphExpression path(PredicateId p0, PredicateId p1, TermId object);
  // Orders the two star atoms so that (p1, I1) < (p2, I2).
  static SubgraphExpression path_star(PredicateId p0, PredicateId p1, TermId object1,
                                      PredicateId p2, TermId object2);
  // Predicates are sorted ascending.
  static SubgraphExpression closed(PredicateId p0, PredicateId p1);
  static SubgraphExpression closed(PredicateId p0, PredicateId p1, PredicateId p2);

  std::size_t atom_count() const;
  std::vector<Atom> atoms() const;
  // Predicate ids used by the expression, in atom order.
  std::vector<PredicateId> used_predicates() const;
  bool is_canonical() const;

  friend auto operator<=>(const SubgraphExpression&, const SubgraphExpression&) = default;
};

struct SubgraphExpressionHash {
  std::size_t operator()(const SubgraphExpression& rho) const noexcept;
};

// A conjunction of subgraph expressions sharing only the root variable.
// queue_indexes, when set, records the strictly increasing positions of the
// components in the candidate queue the expression was assembled from.
struct Expression {
  std::vector<SubgraphExpression> components;
  std::vector<std::size_t> queue_indexes;

  bool empty() const { return components.empty(); }
  std::size_t size() const { return components.size(); }
};

}  // namespace remi
