#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galex/bitset.hpp"
#include "galex/context.hpp"
#include "galex/error.hpp"

namespace galex {

using ConceptId = std::size_t;

struct FormalConcept {
  ConceptId id = 0;
  ObjectSet extent;
  AttributeSet intent;
};

struct EnumerationOptions {
  std::size_t max_concepts = 10'000'000;
};

namespace detail {

/// Close-by-One over the attribute order. Each closed intent is generated
/// once: a branch adding attribute j survives only if its closure adds no
/// attribute below j that the parent intent lacked.
inline std::vector<FormalConcept> close_by_one(const FormalContext& ctx, std::size_t max_concepts) {
  const std::size_t m = ctx.attribute_count();

  struct Frame {
    BitSet extent;
    BitSet intent;
    std::size_t next;
  };
  std::vector<FormalConcept> out;
  std::vector<Frame> stack;

  BitSet all_objects = BitSet::full(ctx.object_count());
  BitSet top_intent = BitSet::full(m);
  all_objects.for_each([&](std::size_t o) { top_intent &= ctx.row(o); });
  stack.push_back({std::move(all_objects), std::move(top_intent), 0});

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (out.size() == max_concepts)
      throw Error(ErrorCode::CapacityExceeded,
                  "concept count exceeds ceiling of " + std::to_string(max_concepts));
    // Push in reverse so branches pop in ascending attribute order.
    for (std::size_t j = m; j-- > f.next;) {
      if (f.intent.test(j)) continue;
      BitSet extent = f.extent & ctx.column(j);
      BitSet intent = BitSet::full(m);
      extent.for_each([&](std::size_t o) { intent &= ctx.row(o); });
      if (intent.equal_below(f.intent, j)) stack.push_back({std::move(extent), std::move(intent), j + 1});
    }
    out.push_back({0, ObjectSet(std::move(f.extent)), AttributeSet(std::move(f.intent))});
  }
  return out;
}

/// Canonical id order: extent size ascending, ties by intent as an ascending
/// index sequence. Bottom gets id 0 and top the last id.
inline void assign_canonical_ids(std::vector<FormalConcept>& concepts) {
  std::sort(concepts.begin(), concepts.end(), [](const FormalConcept& a, const FormalConcept& b) {
    const std::size_t sa = a.extent.size(), sb = b.extent.size();
    if (sa != sb) return sa < sb;
    return a.intent.bits().index_less(b.intent.bits());
  });
  for (std::size_t i = 0; i < concepts.size(); ++i) concepts[i].id = i;
}

}  // namespace detail

/// Every formal concept of `ctx`, each exactly once, in canonical id order.
inline std::vector<FormalConcept> enumerate_concepts(const FormalContext& ctx, EnumerationOptions opts = {}) {
  auto concepts = detail::close_by_one(ctx, opts.max_concepts);
  detail::assign_canonical_ids(concepts);
  return concepts;
}

/// Per-concept labels with inherited attributes and objects removed.
struct ReducedLabeling {
  std::vector<AttributeSet> introduced_attributes;
  std::vector<ObjectSet> introduced_objects;
};

struct Neighbourhood {
  std::vector<ConceptId> upper;
  std::vector<ConceptId> lower;
};

class ConceptLattice {
 public:
  ConceptLattice(FormalContext ctx, std::vector<FormalConcept> concepts)
      : ctx_(std::move(ctx)), concepts_(std::move(concepts)) {
    for (const auto& c : concepts_) {
      by_extent_.emplace(c.extent.bits(), c.id);
      by_intent_.emplace(c.intent.bits(), c.id);
    }
    bottom_ = 0;
    top_ = concepts_.size() - 1;
    compute_covers();
    compute_introducers();
  }

  const FormalContext& context() const noexcept { return ctx_; }
  std::size_t size() const noexcept { return concepts_.size(); }
  const std::vector<FormalConcept>& concepts() const noexcept { return concepts_; }
  const FormalConcept& concept_at(ConceptId id) const {
    check(id);
    return concepts_[id];
  }
  ConceptId top() const noexcept { return top_; }
  ConceptId bottom() const noexcept { return bottom_; }
  bool contains(ConceptId id) const noexcept { return id < concepts_.size(); }

  /// Cover pairs (lower, upper), sorted.
  const std::vector<std::pair<ConceptId, ConceptId>>& covers() const noexcept { return covers_; }
  const std::vector<ConceptId>& upper_covers(ConceptId id) const {
    check(id);
    return upper_[id];
  }
  const std::vector<ConceptId>& lower_covers(ConceptId id) const {
    check(id);
    return lower_[id];
  }
  Neighbourhood neighbourhood(ConceptId id) const {
    check(id);
    return {upper_[id], lower_[id]};
  }
  bool is_cover(ConceptId lower, ConceptId upper) const {
    const auto& up = upper_covers(lower);
    check(upper);
    return std::binary_search(up.begin(), up.end(), upper);
  }

  bool leq(ConceptId a, ConceptId b) const {
    check(a);
    check(b);
    return concepts_[a].extent.subset_of(concepts_[b].extent);
  }

  /// Least upper bound: the concept whose intent is the intersection of intents.
  ConceptId join(std::span<const ConceptId> ids) const {
    if (ids.empty()) throw Error(ErrorCode::InvalidSet, "join of an empty concept set");
    BitSet intent = BitSet::full(ctx_.attribute_count());
    for (ConceptId id : ids) intent &= concept_at(id).intent.bits();
    return by_intent_.at(intent);
  }
  ConceptId join(std::initializer_list<ConceptId> ids) const { return join(std::span(ids.begin(), ids.size())); }

  /// Greatest lower bound: the concept whose extent is the intersection of extents.
  ConceptId meet(std::span<const ConceptId> ids) const {
    if (ids.empty()) throw Error(ErrorCode::InvalidSet, "meet of an empty concept set");
    BitSet extent = BitSet::full(ctx_.object_count());
    for (ConceptId id : ids) extent &= concept_at(id).extent.bits();
    return by_extent_.at(extent);
  }
  ConceptId meet(std::initializer_list<ConceptId> ids) const { return meet(std::span(ids.begin(), ids.size())); }

  ConceptId attribute_concept(std::size_t attribute) const {
    if (attribute >= ctx_.attribute_count())
      throw Error(ErrorCode::UnknownAttribute, "attribute index " + std::to_string(attribute));
    return attribute_introducer_[attribute];
  }
  ConceptId attribute_concept(std::string_view name) const { return attribute_introducer_[ctx_.attribute_index(name)]; }
  ConceptId object_concept(std::size_t object) const {
    if (object >= ctx_.object_count())
      throw Error(ErrorCode::UnknownObject, "object index " + std::to_string(object));
    return object_introducer_[object];
  }
  ConceptId object_concept(std::string_view name) const { return object_introducer_[ctx_.object_index(name)]; }

  std::optional<ConceptId> find_by_extent(const ObjectSet& extent) const {
    auto it = by_extent_.find(extent.bits());
    return it == by_extent_.end() ? std::nullopt : std::optional(it->second);
  }
  std::optional<ConceptId> find_by_intent(const AttributeSet& intent) const {
    auto it = by_intent_.find(intent.bits());
    return it == by_intent_.end() ? std::nullopt : std::optional(it->second);
  }

  ReducedLabeling reduced_labels() const {
    ReducedLabeling r;
    r.introduced_attributes.assign(size(), AttributeSet::none(ctx_.attribute_count()));
    r.introduced_objects.assign(size(), ObjectSet::none(ctx_.object_count()));
    for (std::size_t a = 0; a < ctx_.attribute_count(); ++a) r.introduced_attributes[attribute_introducer_[a]].insert(a);
    for (std::size_t o = 0; o < ctx_.object_count(); ++o) r.introduced_objects[object_introducer_[o]].insert(o);
    return r;
  }

  /// True iff every pair of the listed concepts is comparable.
  bool is_chain(std::span<const ConceptId> ids) const {
    for (ConceptId id : ids) check(id);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (!leq(ids[i], ids[j]) && !leq(ids[j], ids[i])) return false;
    return true;
  }
  bool is_chain(std::initializer_list<ConceptId> ids) const { return is_chain(std::span(ids.begin(), ids.size())); }

 private:
  void check(ConceptId id) const {
    if (id >= concepts_.size()) throw Error(ErrorCode::UnknownConcept, "concept " + std::to_string(id));
  }

  // Upper neighbours by Lindig's rule: for each object g outside the extent E,
  // the closure of E + g is an upper cover iff it adds no object that is
  // still a candidate minimum.
  void compute_covers() {
    upper_.assign(size(), {});
    lower_.assign(size(), {});
    const std::size_t n_obj = ctx_.object_count();
    for (const auto& c : concepts_) {
      const BitSet& extent = c.extent.bits();
      BitSet candidates = extent.complement();
      BitSet outside = candidates;
      outside.for_each([&](std::size_t g) {
        BitSet intent = c.intent.bits() & ctx_.row(g);
        BitSet closed = BitSet::full(n_obj);
        intent.for_each([&](std::size_t a) { closed &= ctx_.column(a); });
        BitSet added = closed - extent;
        added.reset(g);
        if (!added.intersects(candidates)) {
          upper_[c.id].push_back(by_extent_.at(closed));
        } else {
          candidates.reset(g);
        }
      });
      auto& up = upper_[c.id];
      std::sort(up.begin(), up.end());
      up.erase(std::unique(up.begin(), up.end()), up.end());
    }
    for (ConceptId lo = 0; lo < size(); ++lo)
      for (ConceptId hi : upper_[lo]) {
        lower_[hi].push_back(lo);
        covers_.emplace_back(lo, hi);
      }
    for (auto& v : lower_) std::sort(v.begin(), v.end());
  }

  void compute_introducers() {
    attribute_introducer_.resize(ctx_.attribute_count());
    object_introducer_.resize(ctx_.object_count());
    for (std::size_t a = 0; a < ctx_.attribute_count(); ++a)
      attribute_introducer_[a] = by_extent_.at(ctx_.column(a));
    for (std::size_t o = 0; o < ctx_.object_count(); ++o) object_introducer_[o] = by_intent_.at(ctx_.row(o));
  }

  FormalContext ctx_;
  std::vector<FormalConcept> concepts_;
  std::unordered_map<BitSet, ConceptId, BitSetHash> by_extent_;
  std::unordered_map<BitSet, ConceptId, BitSetHash> by_intent_;
  std::vector<std::vector<ConceptId>> upper_;
  std::vector<std::vector<ConceptId>> lower_;
  std::vector<std::pair<ConceptId, ConceptId>> covers_;
  std::vector<ConceptId> attribute_introducer_;
  std::vector<ConceptId> object_introducer_;
  ConceptId top_ = 0;
  ConceptId bottom_ = 0;
};

inline ConceptLattice build_lattice(const FormalContext& ctx, EnumerationOptions opts = {}) {
  return ConceptLattice(ctx, enumerate_concepts(ctx, opts));
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::ordered_json concept_to_json(const ConceptLattice& l, const ReducedLabeling& labels, ConceptId id) {
  const auto& ctx = l.context();
  const auto& c = l.concept_at(id);
  nlohmann::ordered_json j;
  j["id"] = id;
  j["extent"] = ctx.names_of(c.extent);
  j["intent"] = ctx.names_of(c.intent);
  j["introduced_attributes"] = ctx.names_of(labels.introduced_attributes[id]);
  j["introduced_objects"] = ctx.names_of(labels.introduced_objects[id]);
  return j;
}

inline nlohmann::ordered_json lattice_to_json(const ConceptLattice& l) {
  const auto labels = l.reduced_labels();
  nlohmann::ordered_json j;
  auto concepts = nlohmann::ordered_json::array();
  for (ConceptId id = 0; id < l.size(); ++id) concepts.push_back(concept_to_json(l, labels, id));
  j["concepts"] = std::move(concepts);
  auto covers = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : l.covers()) covers.push_back({lo, hi});
  j["covers"] = std::move(covers);
  j["top"] = l.top();
  j["bottom"] = l.bottom();
  return j;
}

/// Rebuilds a lattice from its JSON export. The context is recovered from
/// the concepts (objects = top extent, attributes = bottom intent) and the
/// rebuilt lattice must reproduce the document exactly.
inline ConceptLattice lattice_from_json(const nlohmann::json& doc, EnumerationOptions opts = {}) {
  try {
    const auto& concepts = doc.at("concepts");
    if (!concepts.is_array() || concepts.empty()) throw Error(ErrorCode::MalformedTable, "no concepts");
    const auto top = doc.at("top").get<std::size_t>();
    const auto bottom = doc.at("bottom").get<std::size_t>();
    if (top >= concepts.size() || bottom >= concepts.size())
      throw Error(ErrorCode::MalformedTable, "top/bottom out of range");
    auto objects = concepts[top].at("extent").get<std::vector<std::string>>();
    auto attributes = concepts[bottom].at("intent").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::size_t> oi, ai;
    for (std::size_t i = 0; i < objects.size(); ++i) oi.emplace(objects[i], i);
    for (std::size_t i = 0; i < attributes.size(); ++i) ai.emplace(attributes[i], i);
    std::vector<std::vector<bool>> incidence(objects.size(), std::vector<bool>(attributes.size()));
    for (const auto& c : concepts) {
      for (const auto& o : c.at("extent"))
        for (const auto& a : c.at("intent")) {
          auto io = oi.find(o.get<std::string>());
          auto ia = ai.find(a.get<std::string>());
          if (io == oi.end() || ia == ai.end()) throw Error(ErrorCode::MalformedTable, "name outside top/bottom");
          incidence[io->second][ia->second] = true;
        }
    }
    ConceptLattice l = build_lattice(FormalContext(std::move(objects), std::move(attributes), incidence), opts);
    if (nlohmann::json(lattice_to_json(l)) != doc)
      throw Error(ErrorCode::MalformedTable, "document is not the canonical lattice of its own context");
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTable, std::string("bad lattice document: ") + e.what());
  }
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_lines(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += "\\n";
    out += dot_escape(names[i]);
  }
  return out;
}

}  // namespace detail

struct DotOptions {
  bool full_labels = false;
  std::string name_prefix = "C";
};

/// Graphviz rendering: one 3-part record (name / intent / extent) per listed
/// concept and one edge per (lower, upper) pair, drawn bottom-to-top.
inline void write_dot(std::ostream& out, const ConceptLattice& l, std::span<const ConceptId> nodes,
                      std::span<const std::pair<ConceptId, ConceptId>> edges, const DotOptions& opts,
                      std::string_view graph_name = "lattice") {
  const auto& ctx = l.context();
  const auto labels = l.reduced_labels();
  out << "digraph " << graph_name << " {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=record, fontname=\"Helvetica\"];\n";
  for (ConceptId id : nodes) {
    const auto& c = l.concept_at(id);
    const auto intent = ctx.names_of(opts.full_labels ? c.intent : labels.introduced_attributes[id]);
    const auto extent = ctx.names_of(opts.full_labels ? c.extent : labels.introduced_objects[id]);
    out << "  c" << id << " [label=\"{" << opts.name_prefix << id << '|' << detail::dot_lines(intent) << '|'
        << detail::dot_lines(extent) << "}\"];\n";
  }
  for (const auto& [lo, hi] : edges) out << "  c" << lo << " -> c" << hi << ";\n";
  out << "}\n";
}

inline void write_dot(std::ostream& out, const ConceptLattice& l, const DotOptions& opts = {}) {
  std::vector<ConceptId> nodes(l.size());
  for (ConceptId i = 0; i < l.size(); ++i) nodes[i] = i;
  write_dot(out, l, nodes, l.covers(), opts);
}

}  // namespace galex
