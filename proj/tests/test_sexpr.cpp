#include "doctest.h"
#include "pddl/sexpr.hpp"

using namespace pddl;

static std::vector<SExprPtr> rd(const std::string& s, std::vector<Diagnostic>* d = nullptr) {
    std::vector<Diagnostic> local;
    auto out = read_sexprs(s, d ? *d : local);
    if (!d) CHECK(local.empty());
    return out;
}

TEST_CASE("atoms classify by shape") {
    auto es = rd("(foo ?x :keyword 12 -4 3.5 - -- = < <= ^^)");
    REQUIRE(es.size() == 1);
    auto& it = es[0]->items;
    REQUIRE(it.size() == 12);
    CHECK(it[0]->kind == AtomKind::Symbol);
    CHECK(it[1]->kind == AtomKind::Variable);
    CHECK(it[1]->canon == "?x");
    CHECK(it[2]->kind == AtomKind::Keyword);
    CHECK(it[3]->kind == AtomKind::Number);
    CHECK(it[3]->num.i == 12);
    CHECK(it[4]->num.i == -4);
    CHECK(it[5]->num.kind == NumericValue::Kind::Real);
    CHECK(it[5]->num.r == doctest::Approx(3.5));
    for (int i = 6; i <= 11; i++) CHECK(it[i]->kind == AtomKind::Symbol);
    CHECK(it[6]->canon == "-");
    CHECK(it[7]->canon == "--");
}

TEST_CASE("names are case-insensitive; canon is lowercase, original kept") {
    auto es = rd("(Load-Truck ?Obj TRUCK)");
    auto& it = es[0]->items;
    CHECK(it[0]->canon == "load-truck");
    CHECK(it[0]->text == "Load-Truck");
    CHECK(it[1]->canon == "?obj");
    CHECK(it[2]->canon == "truck");
}

TEST_CASE("comments read as whitespace, even mid-token") {
    auto a = rd("(on a b)");
    auto b = rd("(on ; this is table talk\n a b) ; trailing");
    auto c = rd("(on;x\na b)");
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    REQUIRE(c.size() == 1);
    CHECK(sexpr_equal(a[0], b[0]));
    CHECK(sexpr_equal(a[0], c[0]));
}

TEST_CASE("lines and columns track through comments and newlines") {
    std::vector<Diagnostic> d;
    auto es = rd("; head\n(a\n  b)", &d);
    REQUIRE(es.size() == 1);
    CHECK(es[0]->span.line == 2);
    CHECK(es[0]->items[0]->span.line == 2);
    CHECK(es[0]->items[1]->span.line == 3);
    CHECK(es[0]->items[1]->span.col == 3);
}

TEST_CASE("stray right paren is flagged and kept in place") {
    std::vector<Diagnostic> d;
    auto es = rd("(a b)) (c)", &d);
    REQUIRE(d.size() == 1);
    CHECK(d[0].id == DiagId::UnmatchedRightParen);
    REQUIRE(es.size() == 3);
    CHECK(es[1]->synthetic);
}

TEST_CASE("unclosed lists close at end of input with one diagnostic each") {
    std::vector<Diagnostic> d;
    auto es = rd("(a (b (c", &d);
    REQUIRE(es.size() == 1);
    CHECK(d.size() == 3);
    for (auto& x : d) CHECK(x.id == DiagId::MissingRightParen);
    CHECK(es[0]->items.size() == 2);
}

TEST_CASE("malformed numbers and stray characters are reported") {
    std::vector<Diagnostic> d;
    rd("(p 1.2.3)", &d);
    REQUIRE(d.size() == 1);
    CHECK(d[0].id == DiagId::MalformedNumber);

    d.clear();
    rd("(p #t)", &d);
    REQUIRE(!d.empty());
    CHECK(d[0].id == DiagId::IllegalCharacter);
}

TEST_CASE("sexpr_str prints canonical one-line form") {
    auto es = rd("(AND (On ?X  B)\n (clear ?x))");
    CHECK(sexpr_str(es[0]) == "(and (on ?x b) (clear ?x))");
}

TEST_CASE("numbers keep integer identity") {
    auto es = rd("(f 7 7.0 -0)");
    auto& it = es[0]->items;
    CHECK(it[1]->num.kind == NumericValue::Kind::Int);
    CHECK(it[2]->num.kind == NumericValue::Kind::Real);
    CHECK(it[3]->num.i == 0);
    CHECK(it[1]->num == NumericValue::integer(7));
    CHECK(it[2]->num == NumericValue::integer(7));
}

TEST_CASE("structural equality ignores spans and case") {
    auto a = rd("(p Q r)");
    auto b = rd("  (P q\n  R)");
    CHECK(sexpr_equal(a[0], b[0]));
    auto c = rd("(p q r s)");
    CHECK(!sexpr_equal(a[0], c[0]));
}
