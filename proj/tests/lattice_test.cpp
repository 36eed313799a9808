#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "galex/lattice.hpp"
#include "oracle.hpp"

using namespace galex;
using fixtures::dm;

namespace {

std::set<oracle::Concept> as_oracle(const std::vector<FormalConcept>& cs) {
  std::set<oracle::Concept> out;
  for (const auto& c : cs) out.emplace(oracle::to_set(c.extent.indices()), oracle::to_set(c.intent.indices()));
  return out;
}

oracle::Table permuted(const oracle::Table& t, std::mt19937_64& rng) {
  std::vector<std::size_t> rp(t.n()), cp(t.m());
  std::iota(rp.begin(), rp.end(), 0u);
  std::iota(cp.begin(), cp.end(), 0u);
  std::shuffle(rp.begin(), rp.end(), rng);
  std::shuffle(cp.begin(), cp.end(), rng);
  oracle::Table p;
  for (std::size_t j : cp) p.attributes.push_back(t.attributes[j]);
  for (std::size_t i : rp) {
    p.objects.push_back(t.objects[i]);
    std::vector<bool> row;
    for (std::size_t j : cp) row.push_back(t.cells[i][j]);
    p.cells.push_back(row);
  }
  return p;
}

}  // namespace

TEST(EnumerateConcepts, DataModellingTable) {
  const auto ctx = fixtures::kdm();
  const auto concepts = enumerate_concepts(ctx);
  EXPECT_EQ(concepts.size(), 10u);
  // the oracle table must use the context's (sorted) index order
  oracle::Table sorted{ctx.objects(), ctx.attributes(), {}};
  for (std::size_t o = 0; o < ctx.object_count(); ++o) {
    sorted.cells.emplace_back();
    for (std::size_t a = 0; a < ctx.attribute_count(); ++a) sorted.cells.back().push_back(ctx.owns(o, a));
  }
  EXPECT_EQ(as_oracle(concepts), oracle::concepts(sorted));
  const auto e = ctx.objects_named({"Erwin-DM", "ER-Studio", "Magic-Draw"});
  const auto i = ctx.attributes_named({"OS:Windows", "DM:Conceptual", "DM:Physical", "DM:Logical"});
  EXPECT_TRUE(std::any_of(concepts.begin(), concepts.end(),
                          [&](const FormalConcept& c) { return c.extent == e && c.intent == i; }));
}

TEST(EnumerateConcepts, Contranominal3) {
  EXPECT_EQ(enumerate_concepts(oracle::contranominal(3).context()).size(), 8u);
}

TEST(EnumerateConcepts, SingleObject) {
  const auto ctx = parse_context(",a1,a2\no,x,\n", ContextFormat::Csv);
  const auto cs = enumerate_concepts(ctx);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(ctx.names_of(cs[1].extent), (std::vector<std::string>{"o"}));
  EXPECT_EQ(ctx.names_of(cs[1].intent), (std::vector<std::string>{"a1"}));
  EXPECT_TRUE(cs[0].extent.empty());
  EXPECT_EQ(cs[0].intent.size(), 2u);
}

TEST(EnumerateConcepts, CeilingIsEnforced) {
  try {
    enumerate_concepts(oracle::contranominal(6).context(), {63});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CapacityExceeded);
  }
  EXPECT_EQ(enumerate_concepts(oracle::contranominal(6).context(), {64}).size(), 64u);
}

TEST(EnumerateConcepts, MatchesOracleOnRandomContexts) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 150; ++round) {
    const auto t = oracle::random_table(rng, 10);
    const auto cs = enumerate_concepts(t.context());
    const auto expected = oracle::concepts(t);
    ASSERT_EQ(cs.size(), expected.size());
    EXPECT_EQ(as_oracle(cs), expected);
    // Maximality: closed on both sides.
    const auto ctx = t.context();
    for (const auto& c : cs) {
      EXPECT_EQ(alpha(ctx, c.extent), c.intent);
      EXPECT_EQ(beta(ctx, c.intent), c.extent);
    }
  }
}

TEST(BuildLattice, TopBottomAndCovers) {
  const auto l = build_lattice(fixtures::kdm());
  EXPECT_EQ(l.concept_at(l.top()).extent.size(), 5u);
  EXPECT_TRUE(l.concept_at(l.bottom()).extent.empty());
  EXPECT_EQ(l.top(), l.size() - 1);
  EXPECT_EQ(l.bottom(), 0u);
  EXPECT_TRUE(l.is_cover(dm(l, 3), dm(l, 6)));
  EXPECT_FALSE(l.is_cover(dm(l, 4), dm(l, 9)));
}

TEST(BuildLattice, CoversMatchOracle) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 100; ++round) {
    const auto t = oracle::random_table(rng, 8);
    const auto l = build_lattice(t.context());
    const auto expected = oracle::covers(oracle::concepts(t));
    std::set<std::pair<oracle::Concept, oracle::Concept>> got;
    for (const auto& [lo, hi] : l.covers()) {
      const auto& a = l.concept_at(lo);
      const auto& b = l.concept_at(hi);
      got.emplace(oracle::Concept{oracle::to_set(a.extent.indices()), oracle::to_set(a.intent.indices())},
                  oracle::Concept{oracle::to_set(b.extent.indices()), oracle::to_set(b.intent.indices())});
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(BuildLattice, CanonicalUnderPermutation) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 40; ++round) {
    const auto t = oracle::random_table(rng, 12);
    const auto reference = lattice_to_json(build_lattice(t.context())).dump();
    EXPECT_EQ(lattice_to_json(build_lattice(permuted(t, rng).context())).dump(), reference);
  }
}

TEST(Order, Leq) {
  const auto l = build_lattice(fixtures::kdm());
  EXPECT_TRUE(l.leq(dm(l, 3), dm(l, 6)));
  EXPECT_FALSE(l.leq(dm(l, 3), dm(l, 4)));
  EXPECT_FALSE(l.leq(dm(l, 4), dm(l, 3)));
  for (ConceptId c = 0; c < l.size(); ++c) EXPECT_TRUE(l.leq(c, c));
  EXPECT_THROW(l.leq(0, 99), Error);
}

TEST(Order, JoinAndMeet) {
  const auto l = build_lattice(fixtures::kdm());
  EXPECT_EQ(l.join({dm(l, 1), dm(l, 2)}), dm(l, 5));
  EXPECT_EQ(l.join({dm(l, 3), dm(l, 4)}), dm(l, 6));
  EXPECT_EQ(l.meet({dm(l, 4), dm(l, 5)}), dm(l, 1));
  EXPECT_EQ(l.meet({dm(l, 6), dm(l, 2)}), dm(l, 0));
  for (ConceptId c = 0; c < l.size(); ++c) {
    EXPECT_EQ(l.join({c, l.top()}), l.top());
    EXPECT_EQ(l.meet({c, l.bottom()}), l.bottom());
  }
  EXPECT_THROW(l.join(std::span<const ConceptId>{}), Error);
  try {
    l.meet({0, 42});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownConcept);
  }
}

TEST(Order, LatticeLawsOnRandomTriples) {
  std::mt19937_64 rng(24);
  for (int round = 0; round < 60; ++round) {
    const auto l = build_lattice(oracle::random_table(rng, 10).context());
    std::uniform_int_distribution<ConceptId> pick(0, l.size() - 1);
    for (int k = 0; k < 30; ++k) {
      const ConceptId a = pick(rng), b = pick(rng), c = pick(rng);
      EXPECT_EQ(l.join({a, b}), l.join({b, a}));
      EXPECT_EQ(l.meet({a, b}), l.meet({b, a}));
      EXPECT_EQ(l.join({l.join({a, b}), c}), l.join({a, l.join({b, c})}));
      EXPECT_EQ(l.meet({l.meet({a, b}), c}), l.meet({a, l.meet({b, c})}));
      EXPECT_EQ(l.join({a, a}), a);
      EXPECT_EQ(l.join({a, l.meet({a, b})}), a);
      EXPECT_EQ(l.meet({a, l.join({a, b})}), a);
      EXPECT_EQ(l.concept_at(l.join({a, b})).intent, l.concept_at(a).intent & l.concept_at(b).intent);
      EXPECT_EQ(l.concept_at(l.meet({a, b})).extent, l.concept_at(a).extent & l.concept_at(b).extent);
      // join is the least upper bound
      const ConceptId j = l.join({a, b});
      for (ConceptId u = 0; u < l.size(); ++u)
        if (l.leq(a, u) && l.leq(b, u)) {
          EXPECT_TRUE(l.leq(j, u));
        }
    }
  }
}

TEST(Introducers, AttributeConcepts) {
  const auto l = build_lattice(fixtures::kdm());
  const auto& ctx = l.context();
  EXPECT_EQ(l.attribute_concept("DM:Physical"), dm(l, 7));
  EXPECT_EQ(l.concept_at(dm(l, 7)).extent.size(), 4u);
  EXPECT_EQ(l.attribute_concept("DM:Logical"), dm(l, 5));
  EXPECT_EQ(l.attribute_concept("OS:Windows"), l.top());
  EXPECT_EQ(l.top(), dm(l, 9));
  for (std::size_t a = 0; a < ctx.attribute_count(); ++a)
    EXPECT_EQ(l.concept_at(l.attribute_concept(a)).extent, beta(ctx, ctx.attribute_set({a})));
  EXPECT_THROW(l.attribute_concept("DM:Graph"), Error);
  EXPECT_THROW(l.attribute_concept(std::size_t{7}), Error);
}

TEST(Introducers, ObjectConcepts) {
  const auto l = build_lattice(fixtures::kdm());
  const auto& ctx = l.context();
  EXPECT_EQ(l.object_concept("Astah"), dm(l, 4));
  EXPECT_EQ(l.object_concept("Erwin-DM"), dm(l, 5));
  EXPECT_EQ(l.object_concept("ER-Studio"), dm(l, 2));
  for (std::size_t o = 0; o < ctx.object_count(); ++o)
    EXPECT_EQ(l.concept_at(l.object_concept(o)).intent, alpha(ctx, ctx.object_set({o})));
  try {
    l.object_concept("Visio");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownObject);
  }
}

TEST(Introducers, HighestAndLowest) {
  std::mt19937_64 rng(25);
  for (int round = 0; round < 50; ++round) {
    const auto l = build_lattice(oracle::random_table(rng, 9).context());
    const auto& ctx = l.context();
    for (std::size_t a = 0; a < ctx.attribute_count(); ++a) {
      const ConceptId ac = l.attribute_concept(a);
      for (ConceptId c = 0; c < l.size(); ++c)
        if (l.concept_at(c).intent.contains(a)) {
          EXPECT_TRUE(l.leq(c, ac));
        }
    }
    for (std::size_t o = 0; o < ctx.object_count(); ++o) {
      const ConceptId oc = l.object_concept(o);
      for (ConceptId c = 0; c < l.size(); ++c)
        if (l.concept_at(c).extent.contains(o)) {
          EXPECT_TRUE(l.leq(oc, c));
        }
    }
  }
}

TEST(ReducedLabels, DataModellingTable) {
  const auto l = build_lattice(fixtures::kdm());
  const auto& ctx = l.context();
  const auto r = l.reduced_labels();
  EXPECT_EQ(ctx.names_of(r.introduced_attributes[dm(l, 6)]), (std::vector<std::string>{"OS:Linux", "OS:Mac"}));
  EXPECT_TRUE(r.introduced_attributes[dm(l, 0)].empty());
  EXPECT_TRUE(r.introduced_objects[dm(l, 0)].empty());
  std::size_t na = 0, no = 0;
  for (ConceptId c = 0; c < l.size(); ++c) {
    na += r.introduced_attributes[c].size();
    no += r.introduced_objects[c].size();
  }
  EXPECT_EQ(na, 7u);
  EXPECT_EQ(no, 5u);
}

TEST(ReducedLabels, ReconstructByInheritance) {
  std::mt19937_64 rng(26);
  for (int round = 0; round < 50; ++round) {
    const auto l = build_lattice(oracle::random_table(rng, 9).context());
    const auto r = l.reduced_labels();
    const auto& ctx = l.context();
    for (ConceptId c = 0; c < l.size(); ++c) {
      auto intent = AttributeSet::none(ctx.attribute_count());
      auto extent = ObjectSet::none(ctx.object_count());
      for (ConceptId d = 0; d < l.size(); ++d) {
        if (l.leq(c, d)) intent = intent | r.introduced_attributes[d];
        if (l.leq(d, c)) extent = extent | r.introduced_objects[d];
      }
      EXPECT_EQ(intent, l.concept_at(c).intent);
      EXPECT_EQ(extent, l.concept_at(c).extent);
    }
  }
}

TEST(Neighbourhood, DataModellingTable) {
  const auto l = build_lattice(fixtures::kdm());
  const auto n4 = l.neighbourhood(dm(l, 4));
  std::vector<ConceptId> expected{dm(l, 6), dm(l, 8)};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(n4.upper, expected);
  EXPECT_EQ(std::count(n4.upper.begin(), n4.upper.end(), dm(l, 9)), 0);
  EXPECT_TRUE(l.neighbourhood(l.top()).upper.empty());
  EXPECT_TRUE(l.neighbourhood(l.bottom()).lower.empty());
  EXPECT_THROW(l.neighbourhood(10), Error);
}

TEST(Chains, DataModellingTable) {
  const auto l = build_lattice(fixtures::kdm());
  EXPECT_TRUE(l.is_chain({dm(l, 9), dm(l, 6), dm(l, 3), dm(l, 1), dm(l, 0)}));
  EXPECT_FALSE(l.is_chain({dm(l, 9), dm(l, 6), dm(l, 3), dm(l, 1), dm(l, 0), dm(l, 4)}));
  EXPECT_TRUE(l.is_chain({dm(l, 4)}));
  EXPECT_THROW(l.is_chain({0, 77}), Error);
}

TEST(Export, JsonRoundTripIsByteIdentical) {
  const auto l = build_lattice(fixtures::kdm());
  const std::string first = lattice_to_json(l).dump(2);
  const auto back = lattice_from_json(nlohmann::json::parse(first));
  EXPECT_EQ(lattice_to_json(back).dump(2), first);
  EXPECT_EQ(back.context(), l.context());

  auto doc = nlohmann::json::parse(first);
  doc["covers"].erase(0);
  EXPECT_THROW(lattice_from_json(doc), Error);
}

TEST(Export, DotHasOneNodePerConceptAndOneEdgePerCover) {
  const auto l = build_lattice(fixtures::kdm());
  std::ostringstream out;
  write_dot(out, l);
  const std::string dot = out.str();
  std::size_t nodes = 0, edges = 0, pos = 0;
  while ((pos = dot.find("[label=", pos)) != std::string::npos) ++nodes, ++pos;
  pos = 0;
  while ((pos = dot.find(" -> ", pos)) != std::string::npos) ++edges, ++pos;
  EXPECT_EQ(nodes, 10u);
  EXPECT_EQ(edges, l.covers().size());
  EXPECT_NE(dot.find("rankdir=BT"), std::string::npos);
  // reduced label of the Mac/Linux concept
  EXPECT_NE(dot.find("|OS:Linux\\nOS:Mac|"), std::string::npos);
}
