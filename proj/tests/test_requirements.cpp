#include <random>

#include "doctest.h"
#include "pddl/requirements.hpp"

using namespace pddl;

static ReqSet bits(std::initializer_list<Req> rs) {
    ReqSet s = 0;
    for (Req r : rs) s |= req_bit(r);
    return s;
}

TEST_CASE("empty declaration defaults to :strips") {
    CHECK(close_requirements(0) == bits({Req::Strips}));
}

TEST_CASE("single-flag implications") {
    CHECK(close_requirements(bits({Req::QuantifiedPreconditions})) ==
          bits({Req::QuantifiedPreconditions, Req::ExistentialPreconditions,
                Req::UniversalPreconditions}));
    CHECK(close_requirements(bits({Req::ForeachExpansions})) ==
          bits({Req::ForeachExpansions, Req::ActionExpansions}));
    CHECK(close_requirements(bits({Req::DagExpansions})) ==
          bits({Req::DagExpansions, Req::ActionExpansions}));
    CHECK(close_requirements(bits({Req::ExpressionEvaluation})) ==
          bits({Req::ExpressionEvaluation, Req::DomainAxioms}));
    CHECK(close_requirements(bits({Req::Fluents})) ==
          bits({Req::Fluents, Req::ExpressionEvaluation, Req::DomainAxioms}));
    CHECK(close_requirements(bits({Req::TrueNegation})) ==
          bits({Req::TrueNegation, Req::OpenWorld}));
    CHECK(close_requirements(bits({Req::Strips})) == bits({Req::Strips}));
    CHECK(close_requirements(bits({Req::Typing})) == bits({Req::Typing}));
}

TEST_CASE(":adl expands to its group") {
    CHECK(close_requirements(bits({Req::Adl})) ==
          bits({Req::Adl, Req::Strips, Req::Typing, Req::DisjunctivePreconditions,
                Req::Equality, Req::QuantifiedPreconditions,
                Req::ExistentialPreconditions, Req::UniversalPreconditions,
                Req::ConditionalEffects}));
}

TEST_CASE(":ucpop covers :adl plus axioms and safety") {
    ReqSet u = close_requirements(bits({Req::Ucpop}));
    CHECK(req_has(u, Req::Adl));
    CHECK(req_has(u, Req::Strips));
    CHECK(req_has(u, Req::ConditionalEffects));
    CHECK(req_has(u, Req::DomainAxioms));
    CHECK(req_has(u, Req::SafetyConstraints));
    CHECK(u == (close_requirements(bits({Req::Adl})) |
                bits({Req::Ucpop, Req::DomainAxioms, Req::SafetyConstraints})));
}

TEST_CASE("closure is idempotent and monotone on sampled sets") {
    std::mt19937 rng(20260814);
    std::uniform_int_distribution<uint32_t> dist(0, (1u << kNumReqs) - 1);
    for (int t = 0; t < 2000; t++) {
        ReqSet a = dist(rng);
        ReqSet ca = close_requirements(a);
        CHECK((ca & a) == a);                     // extensive
        CHECK(close_requirements(ca) == ca);       // idempotent
        ReqSet b = a | dist(rng);
        CHECK((close_requirements(b) & ca) == ca); // monotone
    }
}

TEST_CASE("names round trip") {
    for (int i = 0; i < kNumReqs; i++) {
        Req r = static_cast<Req>(i);
        auto back = req_from_name(req_name(r));
        REQUIRE(back.has_value());
        CHECK(*back == r);
    }
    CHECK(!req_from_name(":warp-drive").has_value());
    CHECK(std::string(req_name(Req::DisjunctivePreconditions)) ==
          ":disjunctive-preconditions");
}

TEST_CASE("req_sorted orders by flag name") {
    auto v = req_sorted(bits({Req::Typing, Req::Strips, Req::Adl}));
    REQUIRE(v.size() == 3);
    CHECK(v[0] == Req::Adl);
    CHECK(v[1] == Req::Strips);
    CHECK(v[2] == Req::Typing);
}
