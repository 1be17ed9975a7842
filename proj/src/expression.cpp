#include "remi/expression.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace remi {

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Entity: return "entity";
    case TermKind::Literal: return "literal";
    case TermKind::Blank: return "blank";
  }
  return "?";
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::OneAtom: return "one_atom";
    case Shape::Path: return "path";
    case Shape::PathStar: return "path_star";
    case Shape::Closed2: return "closed2";
    case Shape::Closed3: return "closed3";
  }
  return "?";
}

SubgraphExpression SubgraphExpression::one_atom(PredicateId p0, TermId object) {
  SubgraphExpression rho;
  rho.shape = Shape::OneAtom;
  rho.predicates[0] = p0;
  rho.objects[0] = object;
  return rho;
}

SubgraphExpression SubgraphExpression::path(PredicateId p0, PredicateId p1, TermId object) {
  SubgraphExpression rho;
  rho.shape = Shape::Path;
  rho.predicates[0] = p0;
  rho.predicates[1] = p1;
  rho.objects[1] = object;
  return rho;
}

SubgraphExpression SubgraphExpression::path_star(PredicateId p0, PredicateId p1, TermId object1,
                                                 PredicateId p2, TermId object2) {
  if (std::tie(p2, object2) < std::tie(p1, object1)) {
    std::swap(p1, p2);
    std::swap(object1, object2);
  }
  SubgraphExpression rho;
  rho.shape = Shape::PathStar;
  rho.predicates = {p0, p1, p2};
  rho.objects = {kNoId, object1, object2};
  return rho;
}

SubgraphExpression SubgraphExpression::closed(PredicateId p0, PredicateId p1) {
  SubgraphExpression rho;
  rho.shape = Shape::Closed2;
  rho.predicates[0] = std::min(p0, p1);
  rho.predicates[1] = std::max(p0, p1);
  return rho;
}

SubgraphExpression SubgraphExpression::closed(PredicateId p0, PredicateId p1, PredicateId p2) {
  std::array<PredicateId, 3> sorted{p0, p1, p2};
  std::sort(sorted.begin(), sorted.end());
  SubgraphExpression rho;
  rho.shape = Shape::Closed3;
  rho.predicates = sorted;
  return rho;
}

std::size_t SubgraphExpression::atom_count() const {
  switch (shape) {
    case Shape::OneAtom: return 1;
    case Shape::Path:
    case Shape::Closed2: return 2;
    case Shape::PathStar:
    case Shape::Closed3: return 3;
  }
  return 0;
}

std::vector<Atom> SubgraphExpression::atoms() const {
  switch (shape) {
    case Shape::OneAtom:
      return {Atom{predicates[0], Variable::X, objects[0]}};
    case Shape::Path:
      return {Atom{predicates[0], Variable::X, Variable::Y},
              Atom{predicates[1], Variable::Y, objects[1]}};
    case Shape::PathStar:
      return {Atom{predicates[0], Variable::X, Variable::Y},
              Atom{predicates[1], Variable::Y, objects[1]},
              Atom{predicates[2], Variable::Y, objects[2]}};
    case Shape::Closed2:
      return {Atom{predicates[0], Variable::X, Variable::Y},
              Atom{predicates[1], Variable::X, Variable::Y}};
    case Shape::Closed3:
      return {Atom{predicates[0], Variable::X, Variable::Y},
              Atom{predicates[1], Variable::X, Variable::Y},
              Atom{predicates[2], Variable::X, Variable::Y}};
  }
  throw std::logic_error("unknown shape");
}

std::vector<PredicateId> SubgraphExpression::used_predicates() const {
  return {predicates.begin(), predicates.begin() + static_cast<std::ptrdiff_t>(atom_count())};
}

bool SubgraphExpression::is_canonical() const {
  switch (shape) {
    case Shape::OneAtom:
      return objects[0] != kNoId;
    case Shape::Path:
      return objects[1] != kNoId;
    case Shape::PathStar:
      return objects[1] != kNoId && objects[2] != kNoId &&
             std::tie(predicates[1], objects[1]) < std::tie(predicates[2], objects[2]);
    case Shape::Closed2:
      return predicates[0] < predicates[1];
    case Shape::Closed3:
      return predicates[0] < predicates[1] && predicates[1] < predicates[2];
  }
  return false;
}

std::size_t SubgraphExpressionHash::operator()(const SubgraphExpression& rho) const noexcept {
  std::size_t h = static_cast<std::size_t>(rho.shape);
  auto mix = [&h](std::uint32_t v) {
    h ^= std::hash<std::uint32_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (auto p : rho.predicates) mix(p);
  for (auto o : rho.objects) mix(o);
  return h;
}

}  // namespace remi
