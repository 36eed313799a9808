#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galex/context.hpp"
#include "galex/error.hpp"
#include "galex/lattice.hpp"

namespace galex {

/// premise -> conclusion: every object owning the premise owns the conclusion.
struct Implication {
  std::size_t premise = 0;
  std::size_t conclusion = 0;
  /// Premise is owned by no object.
  bool vacuous = false;

  friend bool operator==(const Implication&, const Implication&) = default;
  friend auto operator<=>(const Implication&, const Implication&) = default;
};

/// Unordered pair stored with first < second.
struct MutexPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend bool operator==(const MutexPair&, const MutexPair&) = default;
  friend auto operator<=>(const MutexPair&, const MutexPair&) = default;
};

struct ReportOptions {
  /// List every pairwise implication (including within equivalence groups and
  /// from dead attributes) and mutexes involving dead attributes.
  bool exhaustive = false;
};

struct VariabilityReport {
  AttributeSet core;
  AttributeSet dead;
  std::vector<Implication> implications;
  std::vector<std::vector<std::size_t>> equivalence_groups;
  std::vector<MutexPair> mutex_pairs;
  /// (specializer, generalized) object pairs.
  std::vector<std::pair<std::size_t, std::size_t>> specializations;
  /// Extent size of each attribute's introducer.
  std::vector<std::size_t> attribute_support;
  /// Intent size of each object's introducer.
  std::vector<std::size_t> object_intent_size;
};

enum class ConfigurationKind { Valid, MaximalPartial, Partial, Invalid };

constexpr std::string_view kind_name(ConfigurationKind k) noexcept {
  switch (k) {
    case ConfigurationKind::Valid: return "VALID";
    case ConfigurationKind::MaximalPartial: return "MAXIMAL_PARTIAL";
    case ConfigurationKind::Partial: return "PARTIAL";
    case ConfigurationKind::Invalid: return "INVALID";
  }
  return "?";
}

struct ConfigurationClass {
  ConfigurationKind kind = ConfigurationKind::Invalid;
  /// Matching concept (VALID, MAXIMAL_PARTIAL) or the concept of the closure (PARTIAL).
  std::optional<ConceptId> witness;
  /// Closure of the queried set, for PARTIAL.
  std::optional<AttributeSet> completion;
};

/// Attributes owned by every object: the reduced attribute label of top.
inline AttributeSet core_attributes(const ConceptLattice& l) {
  return l.reduced_labels().introduced_attributes[l.top()];
}

/// Attributes owned by no object: bottom's reduced label when bottom's extent is empty.
inline AttributeSet dead_attributes(const ConceptLattice& l) {
  const auto& ctx = l.context();
  if (!l.concept_at(l.bottom()).extent.empty()) return AttributeSet::none(ctx.attribute_count());
  return l.reduced_labels().introduced_attributes[l.bottom()];
}

/// Every a1 -> a2 (a1 != a2) whose attribute-concepts satisfy AC(a1) <= AC(a2).
inline std::vector<Implication> binary_implications(const ConceptLattice& l) {
  const auto& ctx = l.context();
  std::vector<Implication> out;
  for (std::size_t a1 = 0; a1 < ctx.attribute_count(); ++a1) {
    const ConceptId c1 = l.attribute_concept(a1);
    const bool vacuous = l.concept_at(c1).extent.empty();
    for (std::size_t a2 = 0; a2 < ctx.attribute_count(); ++a2)
      if (a1 != a2 && l.leq(c1, l.attribute_concept(a2))) out.push_back({a1, a2, vacuous});
  }
  return out;
}

/// Attributes grouped by shared attribute-concept; singleton groups included.
inline std::vector<std::vector<std::size_t>> equivalence_groups(const ConceptLattice& l) {
  std::map<ConceptId, std::vector<std::size_t>> by_concept;
  for (std::size_t a = 0; a < l.context().attribute_count(); ++a) by_concept[l.attribute_concept(a)].push_back(a);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [id, attrs] : by_concept) groups.push_back(std::move(attrs));
  std::sort(groups.begin(), groups.end());
  return groups;
}

/// Attribute pairs whose attribute-concepts meet at an empty extent.
inline std::vector<MutexPair> mutex_pairs(const ConceptLattice& l, const ReportOptions& opts = {}) {
  const auto& ctx = l.context();
  const std::size_t m = ctx.attribute_count();
  std::vector<bool> dead(m);
  for (std::size_t a = 0; a < m; ++a) dead[a] = l.concept_at(l.attribute_concept(a)).extent.empty();
  std::vector<MutexPair> out;
  for (std::size_t a1 = 0; a1 < m; ++a1)
    for (std::size_t a2 = a1 + 1; a2 < m; ++a2) {
      if (!opts.exhaustive && (dead[a1] || dead[a2])) continue;
      const ConceptId glb = l.meet({l.attribute_concept(a1), l.attribute_concept(a2)});
      if (l.concept_at(glb).extent.empty()) out.push_back({a1, a2});
    }
  return out;
}

/// Ordered pairs (o1, o2) with OC(o1) < OC(o2). Objects with identical
/// configurations share an object-concept and are not listed.
inline std::vector<std::pair<std::size_t, std::size_t>> specializations(const ConceptLattice& l) {
  const auto& ctx = l.context();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t o1 = 0; o1 < ctx.object_count(); ++o1)
    for (std::size_t o2 = 0; o2 < ctx.object_count(); ++o2) {
      const ConceptId c1 = l.object_concept(o1), c2 = l.object_concept(o2);
      if (c1 != c2 && l.leq(c1, c2)) out.emplace_back(o1, o2);
    }
  return out;
}

/// Attributes shared by both objects: the intent of the join of their object-concepts.
inline AttributeSet similarity(const ConceptLattice& l, std::size_t o1, std::size_t o2) {
  return l.concept_at(l.join({l.object_concept(o1), l.object_concept(o2)})).intent;
}

inline AttributeSet similarity(const ConceptLattice& l, std::string_view o1, std::string_view o2) {
  const auto& ctx = l.context();
  return similarity(l, ctx.object_index(o1), ctx.object_index(o2));
}

inline ConfigurationClass classify_configuration(const FormalContext& ctx, const ConceptLattice& l,
                                                 const AttributeSet& attrs) {
  const ObjectSet owners = beta(ctx, attrs);
  if (owners.empty()) return {ConfigurationKind::Invalid, std::nullopt, std::nullopt};
  const AttributeSet closed = alpha(ctx, owners);
  const ConceptId concept_id = *l.find_by_intent(closed);
  if (!(closed == attrs)) return {ConfigurationKind::Partial, concept_id, closed};
  bool is_object_row = false;
  owners.bits().for_each([&](std::size_t o) { is_object_row = is_object_row || ctx.row(o) == attrs.bits(); });
  return {is_object_row ? ConfigurationKind::Valid : ConfigurationKind::MaximalPartial, concept_id, std::nullopt};
}

inline ConfigurationClass classify_configuration(const ConceptLattice& l, const AttributeSet& attrs) {
  return classify_configuration(l.context(), l, attrs);
}

inline VariabilityReport build_report(const ConceptLattice& l, const ReportOptions& opts = {}) {
  const auto& ctx = l.context();
  VariabilityReport r;
  r.core = core_attributes(l);
  r.dead = dead_attributes(l);
  r.equivalence_groups = equivalence_groups(l);
  for (const auto& imp : binary_implications(l)) {
    if (!opts.exhaustive) {
      if (imp.vacuous) continue;
      if (l.attribute_concept(imp.premise) == l.attribute_concept(imp.conclusion)) continue;
    }
    r.implications.push_back(imp);
  }
  r.mutex_pairs = mutex_pairs(l, opts);
  r.specializations = specializations(l);
  for (std::size_t a = 0; a < ctx.attribute_count(); ++a)
    r.attribute_support.push_back(l.concept_at(l.attribute_concept(a)).extent.size());
  for (std::size_t o = 0; o < ctx.object_count(); ++o)
    r.object_intent_size.push_back(l.concept_at(l.object_concept(o)).intent.size());
  return r;
}

inline VariabilityReport build_report(const FormalContext& ctx, const ReportOptions& opts = {},
                                      EnumerationOptions enum_opts = {}) {
  return build_report(build_lattice(ctx, enum_opts), opts);
}

inline nlohmann::ordered_json report_to_json(const FormalContext& ctx, const VariabilityReport& r) {
  const auto& A = ctx.attributes();
  const auto& O = ctx.objects();
  nlohmann::ordered_json j;
  j["core"] = ctx.names_of(r.core);
  j["dead"] = ctx.names_of(r.dead);
  auto imps = nlohmann::ordered_json::array();
  for (const auto& imp : r.implications) {
    nlohmann::ordered_json e;
    e["premise"] = A[imp.premise];
    e["conclusion"] = A[imp.conclusion];
    if (imp.vacuous) e["vacuous"] = true;
    imps.push_back(std::move(e));
  }
  j["implications"] = std::move(imps);
  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : r.equivalence_groups) {
    auto names = nlohmann::ordered_json::array();
    for (std::size_t a : g) names.push_back(A[a]);
    groups.push_back(std::move(names));
  }
  j["equivalences"] = std::move(groups);
  auto mutex = nlohmann::ordered_json::array();
  for (const auto& p : r.mutex_pairs) mutex.push_back({A[p.first], A[p.second]});
  j["mutex"] = std::move(mutex);
  auto spec = nlohmann::ordered_json::array();
  for (const auto& [o1, o2] : r.specializations) spec.push_back({O[o1], O[o2]});
  j["specializations"] = std::move(spec);
  nlohmann::ordered_json support, intent_size;
  for (std::size_t a = 0; a < A.size(); ++a) support[A[a]] = r.attribute_support[a];
  for (std::size_t o = 0; o < O.size(); ++o) intent_size[O[o]] = r.object_intent_size[o];
  j["metrics"] = {{"attribute_support", support}, {"object_intent_size", intent_size}};
  return j;
}

inline void write_report_text(std::ostream& out, const FormalContext& ctx, const VariabilityReport& r) {
  const auto& A = ctx.attributes();
  const auto& O = ctx.objects();
  auto list = [&](const std::vector<std::string>& names) {
    if (names.empty()) return std::string("none");
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    return s;
  };
  out << "core: " << list(ctx.names_of(r.core)) << '\n';
  out << "dead: " << list(ctx.names_of(r.dead)) << '\n';

  out << "equivalences:\n";
  bool any = false;
  for (const auto& g : r.equivalence_groups) {
    if (g.size() < 2) continue;
    any = true;
    out << "  ";
    for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " <-> " : "") << A[g[i]];
    out << '\n';
  }
  if (!any) out << "  none\n";

  out << "implications:\n";
  for (const auto& imp : r.implications)
    out << "  " << A[imp.premise] << " -> " << A[imp.conclusion] << (imp.vacuous ? "  (vacuous)" : "") << '\n';
  if (r.implications.empty()) out << "  none\n";

  out << "mutex:\n";
  for (const auto& p : r.mutex_pairs) out << "  " << A[p.first] << " -/- " << A[p.second] << '\n';
  if (r.mutex_pairs.empty()) out << "  none\n";

  out << "specializations:\n";
  for (const auto& [o1, o2] : r.specializations) out << "  " << O[o1] << " specializes " << O[o2] << '\n';
  if (r.specializations.empty()) out << "  none\n";
}

}  // namespace galex
