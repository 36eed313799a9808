#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galex/error.hpp"
#include "galex/lattice.hpp"

namespace galex {

enum class PosetKind { AOC, AC, OC, Iceberg };

constexpr std::string_view kind_name(PosetKind k) noexcept {
  switch (k) {
    case PosetKind::AOC: return "AOC";
    case PosetKind::AC: return "AC";
    case PosetKind::OC: return "OC";
    case PosetKind::Iceberg: return "ICEBERG";
  }
  return "?";
}

/// A subset of a lattice's concepts (same ids) with the restricted order,
/// stored as its own transitive reduction.
struct ConceptPoset {
  PosetKind kind = PosetKind::AOC;
  std::optional<std::size_t> min_extent;
  std::vector<ConceptId> concepts;
  std::vector<std::pair<ConceptId, ConceptId>> order_edges;

  bool contains(ConceptId id) const { return std::binary_search(concepts.begin(), concepts.end(), id); }
};

namespace detail {

/// Hasse edges of the lattice order restricted to `keep` (sorted ids).
inline std::vector<std::pair<ConceptId, ConceptId>> restricted_reduction(const ConceptLattice& l,
                                                                         const std::vector<ConceptId>& keep) {
  std::vector<ConceptId> by_size = keep;
  std::stable_sort(by_size.begin(), by_size.end(), [&](ConceptId a, ConceptId b) {
    return l.concept_at(a).extent.size() < l.concept_at(b).extent.size();
  });
  std::vector<std::pair<ConceptId, ConceptId>> edges;
  for (ConceptId c : keep) {
    const auto& ext = l.concept_at(c).extent;
    std::vector<ConceptId> accepted;
    // Closest candidates first: a strictly greater concept is a cover unless
    // it lies above one already accepted.
    for (ConceptId d : by_size) {
      const auto& dext = l.concept_at(d).extent;
      if (dext.size() <= ext.size() || !ext.subset_of(dext)) continue;
      const bool above_accepted = std::any_of(accepted.begin(), accepted.end(), [&](ConceptId e) {
        return l.concept_at(e).extent.subset_of(dext);
      });
      if (!above_accepted) accepted.push_back(d);
    }
    std::sort(accepted.begin(), accepted.end());
    for (ConceptId d : accepted) edges.emplace_back(c, d);
  }
  return edges;
}

template <typename Pred>
ConceptPoset filter_poset(const ConceptLattice& l, PosetKind kind, Pred keep_if) {
  ConceptPoset p;
  p.kind = kind;
  for (ConceptId id = 0; id < l.size(); ++id)
    if (keep_if(id)) p.concepts.push_back(id);
  p.order_edges = restricted_reduction(l, p.concepts);
  return p;
}

}  // namespace detail

inline ConceptPoset aoc_poset(const ConceptLattice& l) {
  const auto labels = l.reduced_labels();
  return detail::filter_poset(l, PosetKind::AOC, [&](ConceptId id) {
    return !labels.introduced_attributes[id].empty() || !labels.introduced_objects[id].empty();
  });
}

inline ConceptPoset ac_poset(const ConceptLattice& l) {
  const auto labels = l.reduced_labels();
  return detail::filter_poset(l, PosetKind::AC,
                              [&](ConceptId id) { return !labels.introduced_attributes[id].empty(); });
}

inline ConceptPoset oc_poset(const ConceptLattice& l) {
  const auto labels = l.reduced_labels();
  return detail::filter_poset(l, PosetKind::OC, [&](ConceptId id) { return !labels.introduced_objects[id].empty(); });
}

/// Concepts whose extent holds at least `min_extent` objects.
inline ConceptPoset iceberg(const ConceptLattice& l, std::size_t min_extent) {
  if (min_extent < 1) throw Error(ErrorCode::InvalidThreshold, "iceberg threshold must be >= 1");
  auto p = detail::filter_poset(l, PosetKind::Iceberg,
                                [&](ConceptId id) { return l.concept_at(id).extent.size() >= min_extent; });
  p.min_extent = min_extent;
  return p;
}

inline nlohmann::ordered_json poset_to_json(const ConceptLattice& l, const ConceptPoset& p) {
  const auto labels = l.reduced_labels();
  nlohmann::ordered_json j;
  j["kind"] = kind_name(p.kind);
  j["min_extent"] = p.min_extent ? nlohmann::ordered_json(*p.min_extent) : nlohmann::ordered_json(nullptr);
  auto concepts = nlohmann::ordered_json::array();
  for (ConceptId id : p.concepts) concepts.push_back(concept_to_json(l, labels, id));
  j["concepts"] = std::move(concepts);
  auto covers = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : p.order_edges) covers.push_back({lo, hi});
  j["covers"] = std::move(covers);
  // A unique maximal (minimal) element is reported as top (bottom); sub-hierarchies need not have one.
  std::vector<ConceptId> maximal, minimal;
  for (ConceptId id : p.concepts) {
    auto has = [&](auto pick) {
      return std::any_of(p.order_edges.begin(), p.order_edges.end(), [&](const auto& e) { return pick(e) == id; });
    };
    if (!has([](const auto& e) { return e.first; })) maximal.push_back(id);
    if (!has([](const auto& e) { return e.second; })) minimal.push_back(id);
  }
  j["top"] = maximal.size() == 1 ? nlohmann::ordered_json(maximal[0]) : nlohmann::ordered_json(nullptr);
  j["bottom"] = minimal.size() == 1 ? nlohmann::ordered_json(minimal[0]) : nlohmann::ordered_json(nullptr);
  return j;
}

inline void write_dot(std::ostream& out, const ConceptLattice& l, const ConceptPoset& p, const DotOptions& opts = {}) {
  write_dot(out, l, p.concepts, p.order_edges, opts, "poset");
}

}  // namespace galex
