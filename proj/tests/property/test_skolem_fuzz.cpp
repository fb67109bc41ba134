#include <gtest/gtest.h>

#include <random>
#include <set>

#include "complr/skolem.hpp"
#include "complr/turtle.hpp"
#include "corpus.hpp"

namespace complr {
namespace {

// 10^4 declarations in three files, each file with its own property
// orderings: every id matches the canonical-form oracle, and distinct
// structures never share an id
TEST(skolem_fuzz, identical_structures_share_ids_distinct_ones_never_collide) {
    auto r = testing::skolem_fuzz(0x5EED, 10000, 3);
    EXPECT_EQ(r.mismatches, 0u);
    EXPECT_EQ(r.collisions, 0u);
    // the corpus must hold many distinct structures for this to mean anything
    EXPECT_GT(r.distinct, 2500u);
}

TEST(skolem_fuzz, three_orderings_of_one_declaration) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        auto n = testing::random_declaration(rng);
        std::set<std::string> seen;
        for (int k = 0; k < 3; ++k) {
            std::mt19937_64 order_rng(rng());
            auto text = "@prefix : <" + testing::corpus_ns + "> .\n:D :decl " + testing::render_turtle(n, order_rng) + " .\n";
            auto g = skolemize(rdf::parse_document(text, "o" + std::to_string(k) + ".ttl"));
            for (const auto& t : g.triples)
                if (t.predicate == testing::corpus_ns + "decl") seen.insert(t.object.value);
        }
        ASSERT_EQ(seen.size(), 1u);
        ASSERT_EQ(*seen.begin(), testing::expected_id(n));
    }
}

} // namespace
} // namespace complr
