#include "remi/kb_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace remi {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::size_t QueryCache::KeyHash::operator()(const Key& key) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto v : key) {
    h ^= v;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Builder

TermId TripleStoreBuilder::intern_term(TermKind kind, std::string_view lexical) {
  auto& dictionary = term_dictionary_[static_cast<std::size_t>(kind)];
  auto [it, inserted] = dictionary.try_emplace(std::string(lexical), static_cast<TermId>(terms_.size()));
  if (inserted) terms_.push_back(Term{kind, it->second, std::string(lexical)});
  return it->second;
}

PredicateId TripleStoreBuilder::intern_predicate(std::string_view iri) {
  auto [it, inserted] =
      predicate_dictionary_.try_emplace(std::string(iri), static_cast<PredicateId>(predicates_.size()));
  if (inserted) predicates_.push_back(Predicate{it->second, std::string(iri), std::nullopt, false});
  return it->second;
}

void TripleStoreBuilder::add(TermId subject, PredicateId predicate, TermId object) {
  triples_.push_back(Triple{subject, predicate, object});
}

TripleStore TripleStoreBuilder::build(std::size_t cache_capacity) && {
  TripleStore store;
  store.terms_ = std::move(terms_);
  store.term_dictionary_ = std::move(term_dictionary_);
  store.predicates_ = std::move(predicates_);
  store.predicate_dictionary_ = std::move(predicate_dictionary_);
  store.triples_ = std::move(triples_);
  store.cache_->set_capacity(cache_capacity);
  store.build_indexes();
  return store;
}

// ---------------------------------------------------------------------------
// Store

TripleStore::TripleStore() : cache_(std::make_unique<QueryCache>(kDefaultCacheCapacity)) {}
TripleStore::TripleStore(TripleStore&&) noexcept = default;
TripleStore& TripleStore::operator=(TripleStore&&) noexcept = default;
TripleStore::~TripleStore() = default;

namespace {

std::uint64_t pair_key(TermId subject, TermId object) {
  return (static_cast<std::uint64_t>(subject) << 32) | object;
}

}  // namespace

void TripleStore::build_indexes() {
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  const std::size_t n_terms = terms_.size();
  const std::size_t n_predicates = predicates_.size();

  subject_offsets_.assign(n_terms + 1, 0);
  for (const auto& t : triples_) ++subject_offsets_[t.subject + 1];
  for (std::size_t i = 0; i < n_terms; ++i) subject_offsets_[i + 1] += subject_offsets_[i];
  subject_facts_.clear();
  subject_facts_.reserve(triples_.size());
  // triples_ is sorted by (s, p, o), so facts are laid out in CSR order.
  for (const auto& t : triples_) subject_facts_.push_back({t.predicate, t.object});

  subjects_by_object_.assign(n_predicates, {});
  object_counts_.assign(n_predicates, {});
  pairs_.assign(n_predicates, {});
  links_.clear();
  frequency_.assign(n_terms, 0);

  for (const auto& t : triples_) {
    subjects_by_object_[t.predicate][t.object].push_back(t.subject);
    pairs_[t.predicate].push_back({t.subject, t.object});
    links_[pair_key(t.subject, t.object)].push_back(t.predicate);
    ++frequency_[t.subject];
    if (t.object != t.subject) ++frequency_[t.object];
  }
  for (std::size_t p = 0; p < n_predicates; ++p) {
    auto& counts = object_counts_[p];
    for (auto& [object, subjects] : subjects_by_object_[p]) {
      std::sort(subjects.begin(), subjects.end());
      counts.push_back({object, static_cast<std::uint32_t>(subjects.size())});
    }
    std::sort(counts.begin(), counts.end(),
              [](const ObjectCount& a, const ObjectCount& b) { return a.object < b.object; });
  }
  for (auto& [key, predicates] : links_) std::sort(predicates.begin(), predicates.end());

  entity_count_ = 0;
  for (const auto& term : terms_) {
    if (term.is_entity()) ++entity_count_;
  }
}

std::optional<TermId> TripleStore::find_term(TermKind kind, std::string_view lexical) const {
  const auto& dictionary = term_dictionary_[static_cast<std::size_t>(kind)];
  auto it = dictionary.find(std::string(lexical));
  if (it == dictionary.end()) return std::nullopt;
  return it->second;
}

std::optional<PredicateId> TripleStore::find_predicate(std::string_view iri) const {
  auto it = predicate_dictionary_.find(std::string(iri));
  if (it == predicate_dictionary_.end()) return std::nullopt;
  return it->second;
}

std::span<const PredicateObject> TripleStore::facts_of(TermId subject) const {
  if (subject >= terms_.size()) return {};
  return std::span<const PredicateObject>(subject_facts_)
      .subspan(subject_offsets_[subject], subject_offsets_[subject + 1] - subject_offsets_[subject]);
}

std::span<const TermId> TripleStore::subjects_of(PredicateId predicate, TermId object) const {
  if (predicate >= subjects_by_object_.size()) return {};
  const auto& by_object = subjects_by_object_[predicate];
  auto it = by_object.find(object);
  if (it == by_object.end()) return {};
  return it->second;
}

std::span<const ObjectCount> TripleStore::objects_of(PredicateId predicate) const {
  if (predicate >= object_counts_.size()) return {};
  return object_counts_[predicate];
}

std::span<const SubjectObject> TripleStore::pairs_of(PredicateId predicate) const {
  if (predicate >= pairs_.size()) return {};
  return pairs_[predicate];
}

std::span<const PredicateId> TripleStore::links(TermId subject, TermId object) const {
  auto it = links_.find(pair_key(subject, object));
  if (it == links_.end()) return {};
  return it->second;
}

bool TripleStore::contains(TermId subject, PredicateId predicate, TermId object) const {
  auto facts = facts_of(subject);
  return std::binary_search(facts.begin(), facts.end(), PredicateObject{predicate, object});
}

// ---------------------------------------------------------------------------
// N-Triples

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_number) : line_(line), number_(line_number) {}

  struct ParsedTerm {
    TermKind kind;
    std::string lexical;
  };

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return at_end() ? '\0' : line_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(number_, message + " (column " + std::to_string(pos_ + 1) + ")");
  }

  std::uint32_t read_hex(std::size_t digits) {
    if (pos_ + digits > line_.size()) fail("truncated unicode escape");
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = line_[pos_++];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("invalid hex digit in unicode escape");
    }
    return value;
  }

  std::string read_iri() {
    if (peek() != '<') fail("expected '<'");
    ++pos_;
    std::string iri;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = line_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        char kind = peek();
        ++pos_;
        if (kind == 'u') append_utf8(iri, read_hex(4));
        else if (kind == 'U') append_utf8(iri, read_hex(8));
        else fail("invalid escape in IRI");
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`') {
        fail(std::string("invalid character in IRI: '") + c + "'");
      }
      iri.push_back(c);
      ++pos_;
    }
    return iri;
  }

  std::string read_blank() {
    if (line_.substr(pos_, 2) != "_:") fail("expected blank node");
    pos_ += 2;
    std::size_t start = pos_;
    while (!at_end()) {
      auto c = static_cast<unsigned char>(line_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':' || c >= 0x80) ++pos_;
      else break;
    }
    // A label never ends with '.'; a trailing dot is the statement terminator.
    while (pos_ > start && line_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    return std::string(line_.substr(start, pos_ - start));
  }

  std::string read_literal() {
    ++pos_;  // opening quote
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = line_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      char e = line_[pos_++];
      switch (e) {
        case 't': value.push_back('\t'); break;
        case 'b': value.push_back('\b'); break;
        case 'n': value.push_back('\n'); break;
        case 'r': value.push_back('\r'); break;
        case 'f': value.push_back('\f'); break;
        case '"': value.push_back('"'); break;
        case '\'': value.push_back('\''); break;
        case '\\': value.push_back('\\'); break;
        case 'u': append_utf8(value, read_hex(4)); break;
        case 'U': append_utf8(value, read_hex(8)); break;
        default: fail(std::string("invalid escape '\\") + e + "'");
      }
    }
    std::string lexical = "\"";
    for (char c : value) {
      switch (c) {
        case '"': lexical += "\\\""; break;
        case '\\': lexical += "\\\\"; break;
        case '\n': lexical += "\\n"; break;
        case '\r': lexical += "\\r"; break;
        default: lexical.push_back(c);
      }
    }
    lexical.push_back('"');
    if (peek() == '@') {
      std::size_t start = pos_++;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '-')) ++pos_;
      if (pos_ == start + 1) fail("empty language tag");
      lexical += line_.substr(start, pos_ - start);
    } else if (line_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      lexical += "^^<" + read_iri() + ">";
    }
    return lexical;
  }

  ParsedTerm read_subject() {
    if (peek() == '<') return {TermKind::Entity, read_iri()};
    if (peek() == '_') return {TermKind::Blank, read_blank()};
    fail("expected IRI or blank node as subject");
  }

  ParsedTerm read_object() {
    if (peek() == '<') return {TermKind::Entity, read_iri()};
    if (peek() == '_') return {TermKind::Blank, read_blank()};
    if (peek() == '"') return {TermKind::Literal, read_literal()};
    if (at_end()) fail("missing object");
    fail("expected IRI, blank node or literal as object");
  }

  void read_terminator() {
    skip_ws();
    if (peek() != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after '.'");
  }

 private:
  std::string_view line_;
  std::size_t number_;
  std::size_t pos_ = 0;
};

void parse_line(std::string_view line, std::size_t number, TripleStoreBuilder& builder) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  LineParser parser(line, number);
  parser.skip_ws();
  if (parser.at_end() || parser.peek() == '#') return;
  auto subject = parser.read_subject();
  parser.skip_ws();
  if (parser.at_end()) parser.fail("missing predicate");
  auto predicate = parser.read_iri();
  parser.skip_ws();
  auto object = parser.read_object();
  parser.read_terminator();
  builder.add(builder.intern_term(subject.kind, subject.lexical), builder.intern_predicate(predicate),
              builder.intern_term(object.kind, object.lexical));
}

}  // namespace

TripleStore parse_ntriples(std::istream& input, std::size_t cache_capacity) {
  TripleStoreBuilder builder;
  std::string line;
  std::size_t number = 0;
  while (std::getline(input, line)) parse_line(line, ++number, builder);
  return std::move(builder).build(cache_capacity);
}

TripleStore parse_ntriples(std::string_view text, std::size_t cache_capacity) {
  TripleStoreBuilder builder;
  std::size_t number = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    parse_line(text.substr(0, end), ++number, builder);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return std::move(builder).build(cache_capacity);
}

TripleStore load_ntriples_file(const std::filesystem::path& path, std::size_t cache_capacity) {
  std::ifstream input(path);
  if (!input) throw std::runtime_error("cannot open " + path.string());
  return parse_ntriples(input, cache_capacity);
}

// ---------------------------------------------------------------------------
// Inverse materialization

std::vector<TermId> entities_by_frequency(const TripleStore& store) {
  std::vector<TermId> entities;
  for (const auto& term : store.terms()) {
    if (term.is_entity()) entities.push_back(term.id);
  }
  std::sort(entities.begin(), entities.end(), [&store](TermId a, TermId b) {
    auto fa = store.frequency(a), fb = store.frequency(b);
    if (fa != fb) return fa > fb;
    return store.term(a).lexical < store.term(b).lexical;
  });
  return entities;
}

std::vector<TermId> top_entities(const TripleStore& store, double fraction) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  auto ranked = entities_by_frequency(store);
  auto n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ranked.size())));
  ranked.resize(std::min(n, ranked.size()));
  return ranked;
}

TripleStore materialize_inverses(const TripleStore& store, double top_fraction) {
  TripleStoreBuilder builder;
  builder.terms_ = store.terms_;
  builder.term_dictionary_ = store.term_dictionary_;
  builder.predicates_ = store.predicates_;
  builder.predicate_dictionary_ = store.predicate_dictionary_;
  builder.triples_ = store.triples_;

  auto top = top_entities(store, top_fraction);
  std::unordered_set<TermId> selected(top.begin(), top.end());
  for (const auto& t : store.triples_) {
    if (!selected.contains(t.object)) continue;
    const auto& predicate = builder.predicates_[t.predicate];
    if (predicate.is_inverse) continue;
    PredicateId inverse;
    if (predicate.inverse_of) {
      inverse = *predicate.inverse_of;
    } else {
      inverse = builder.intern_predicate(predicate.lexical + std::string(kInverseSuffix));
      builder.predicates_[inverse].is_inverse = true;
      builder.predicates_[inverse].inverse_of = t.predicate;
      builder.predicates_[t.predicate].inverse_of = inverse;
    }
    builder.add(t.object, inverse, t.subject);
  }
  return std::move(builder).build(store.cache().capacity());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

constexpr std::uint32_t kOpMatchAtom = 1;
constexpr std::uint32_t kOpSubgraph = 2;

std::uint32_t encode(const Argument& arg) {
  if (const auto* var = std::get_if<Variable>(&arg)) return kNoId - 1 - static_cast<std::uint32_t>(*var);
  return std::get<TermId>(arg);
}

std::vector<Assignment> match_atom_uncached(const TripleStore& store, const Atom& atom) {
  std::vector<Assignment> result;
  const auto* subject_var = std::get_if<Variable>(&atom.subject);
  const auto* object_var = std::get_if<Variable>(&atom.object);
  if (subject_var && !object_var) {
    for (TermId s : store.subjects_of(atom.predicate, std::get<TermId>(atom.object))) {
      result.push_back({{*subject_var, s}});
    }
  } else if (!subject_var && object_var) {
    for (const auto& fact : store.facts_of(std::get<TermId>(atom.subject))) {
      if (fact.predicate == atom.predicate) result.push_back({{*object_var, fact.object}});
    }
  } else if (*subject_var == *object_var) {
    for (const auto& pair : store.pairs_of(atom.predicate)) {
      if (pair.subject == pair.object) result.push_back({{*subject_var, pair.subject}});
    }
  } else {
    for (const auto& pair : store.pairs_of(atom.predicate)) {
      result.push_back({{*subject_var, pair.subject}, {*object_var, pair.object}});
    }
  }
  return result;
}

void sort_unique(BindingSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

BindingSet subjects_reaching(const TripleStore& store, PredicateId p0, std::span<const TermId> ys) {
  BindingSet result;
  for (TermId y : ys) {
    auto xs = store.subjects_of(p0, y);
    result.insert(result.end(), xs.begin(), xs.end());
  }
  sort_unique(result);
  return result;
}

BindingSet bindings_uncached(const TripleStore& store, const SubgraphExpression& rho) {
  const auto& p = rho.predicates;
  const auto& o = rho.objects;
  switch (rho.shape) {
    case Shape::OneAtom: {
      auto xs = store.subjects_of(p[0], o[0]);
      return {xs.begin(), xs.end()};
    }
    case Shape::Path:
      return subjects_reaching(store, p[0], store.subjects_of(p[1], o[1]));
    case Shape::PathStar:
      return subjects_reaching(store, p[0],
                               intersect(store.subjects_of(p[1], o[1]), store.subjects_of(p[2], o[2])));
    case Shape::Closed2:
    case Shape::Closed3: {
      BindingSet result;
      for (const auto& pair : store.pairs_of(p[0])) {
        if (!result.empty() && result.back() == pair.subject) continue;
        if (!store.contains(pair.subject, p[1], pair.object)) continue;
        if (rho.shape == Shape::Closed3 && !store.contains(pair.subject, p[2], pair.object)) continue;
        result.push_back(pair.subject);
      }
      return result;
    }
  }
  return {};
}

}  // namespace

std::vector<Assignment> match_atom(const TripleStore& store, const Atom& atom) {
  if (!atom.has_variable()) throw std::invalid_argument("match_atom: atom has no variables");
  if (atom.predicate >= store.predicate_count()) return {};
  QueryCache::Key key{kOpMatchAtom, atom.predicate, encode(atom.subject), encode(atom.object), 0, 0, 0, 0};
  auto cached = store.cache().assignments().get_or_compute(key, [&] {
    return std::make_shared<const std::vector<Assignment>>(match_atom_uncached(store, atom));
  });
  return *cached;
}

std::shared_ptr<const BindingSet> shared_bindings_of_subgraph(const TripleStore& store,
                                                             const SubgraphExpression& rho) {
  QueryCache::Key key{kOpSubgraph,        static_cast<std::uint32_t>(rho.shape),
                      rho.predicates[0],  rho.predicates[1],
                      rho.predicates[2],  rho.objects[0],
                      rho.objects[1],     rho.objects[2]};
  return store.cache().bindings().get_or_compute(
      key, [&] { return std::make_shared<const BindingSet>(bindings_uncached(store, rho)); });
}

BindingSet bindings_of_subgraph(const TripleStore& store, const SubgraphExpression& rho) {
  return *shared_bindings_of_subgraph(store, rho);
}

BindingSet bindings_of_expression(const TripleStore& store, const Expression& e) {
  if (e.empty()) throw std::invalid_argument("bindings_of_expression: empty expression");
  BindingSet result = bindings_of_subgraph(store, e.components.front());
  for (std::size_t i = 1; i < e.components.size() && !result.empty(); ++i) {
    result = intersect(result, *shared_bindings_of_subgraph(store, e.components[i]));
  }
  return result;
}

bool is_referring_expression(const TripleStore& store, const Expression& e, std::span<const TermId> targets) {
  if (e.empty() || targets.empty()) return false;
  auto bindings = bindings_of_expression(store, e);
  return std::equal(bindings.begin(), bindings.end(), targets.begin(), targets.end());
}

BindingSet intersect(std::span<const TermId> a, std::span<const TermId> b) {
  BindingSet result;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(result));
  return result;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string render_term(const TripleStore& store, TermId id) {
  const auto& term = store.term(id);
  switch (term.kind) {
    case TermKind::Entity: return "<" + term.lexical + ">";
    case TermKind::Literal: return term.lexical;
    case TermKind::Blank: return "_:" + term.lexical;
  }
  return "?";
}

std::string render_argument(const TripleStore& store, const Argument& arg) {
  if (const auto* var = std::get_if<Variable>(&arg)) return *var == Variable::X ? "x" : "y";
  return render_term(store, std::get<TermId>(arg));
}

}  // namespace

std::string to_string(const TripleStore& store, const Atom& atom) {
  return "<" + store.predicate(atom.predicate).lexical + ">(" + render_argument(store, atom.subject) + ", " +
         render_argument(store, atom.object) + ")";
}

std::string to_string(const TripleStore& store, const SubgraphExpression& rho) {
  std::string out;
  for (const auto& atom : rho.atoms()) {
    if (!out.empty()) out += " ∧ ";
    out += to_string(store, atom);
  }
  return out;
}

std::string to_string(const TripleStore& store, const Expression& e) {
  if (e.empty()) return "⊤";
  std::string out;
  for (const auto& rho : e.components) {
    if (!out.empty()) out += " ∧ ";
    out += to_string(store, rho);
  }
  return out;
}

}  // namespace remi
