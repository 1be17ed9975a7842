#include "remi/complexity.hpp"

#include <cmath>
#include <stdexcept>

namespace remi {

ComplexityBits ComplexityBits::from_bits(double bits) {
  if (!std::isfinite(bits) || bits < 0.0) throw std::invalid_argument("complexity must be finite and >= 0");
  return from_raw(std::llround(bits * kScale));
}

double ComplexityBits::value() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return static_cast<double>(raw_) / kScale;
}

ComplexityBits& ComplexityBits::operator+=(ComplexityBits other) {
  if (is_infinite() || other.is_infinite()) {
    raw_ = infinity().raw_;
  } else {
    raw_ += other.raw_;
  }
  return *this;
}

ComplexityBits bits_of_subgraph(const ProminenceModel& model, const SubgraphExpression& rho) {
  if (shared_bindings_of_subgraph(model.store(), rho)->empty()) {
    throw std::invalid_argument("subgraph expression has no match in the store");
  }
  const auto& p = rho.predicates;
  const auto& o = rho.objects;
  // Each term is rounded to fixed point on its own so that a component's cost
  // is a sum of per-term integers.
  auto term = [](double bits) { return ComplexityBits::from_bits(bits); };

  ComplexityBits total = term(model.predicate_bits(p[0], RankContext::global()));
  switch (rho.shape) {
    case Shape::OneAtom:
      total += term(model.estimated_rank_bits(o[0], RankContext::object_of(p[0])));
      break;
    case Shape::Path:
      total += term(model.predicate_bits(p[1], RankContext::join(p[0])));
      total += term(model.estimated_rank_bits(o[1], RankContext::object_of_join(p[0], p[1])));
      break;
    case Shape::PathStar:
      total += term(model.predicate_bits(p[1], RankContext::join(p[0])));
      total += term(model.estimated_rank_bits(o[1], RankContext::object_of_join(p[0], p[1])));
      total += term(model.predicate_bits(p[2], RankContext::star(p[0], p[1])));
      total += term(model.estimated_rank_bits(o[2], RankContext::object_of_star(p[0], p[1], p[2])));
      break;
    case Shape::Closed2:
      total += term(model.predicate_bits(p[1], RankContext::closing(p[0])));
      break;
    case Shape::Closed3:
      total += term(model.predicate_bits(p[1], RankContext::closing(p[0])));
      total += term(model.predicate_bits(p[2], RankContext::closing(p[0], p[1])));
      break;
  }
  return total;
}

ComplexityBits bits_of_expression(const ProminenceModel& model, const Expression& e) {
  ComplexityBits total;
  for (const auto& rho : e.components) total += bits_of_subgraph(model, rho);
  return total;
}

}  // namespace remi
