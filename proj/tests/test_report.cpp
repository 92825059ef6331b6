#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pddl/model.hpp"
#include "pddl/parser.hpp"
#include "pddl/report.hpp"
#include "pddl/sexpr.hpp"

using namespace pddl;

namespace {

const char* kRoundTrip = R"((define (domain briefcase-world)
  (:requirements :strips :equality :typing :conditional-effects)
  (:types location physob)
  (:constants b - physob)
  (:predicates (at ?x - physob ?l - location)
               (in ?x ?y - physob))
  (:action mov-b
     :parameters (?m ?l - location)
     :precondition (and (at b ?m) (not (= ?m ?l)))
     :effect (and (at b ?l) (not (at b ?m))
                  (forall (?z - physob)
                       (when (and (in ?z b) (not (= ?z b)))
                             (and (at ?z ?l) (not (at ?z ?m)))))))
  (:action put-in
     :parameters (?x - physob ?l - location)
     :precondition (not (= ?x b))
     :effect (when (and (at ?x ?l) (at b ?l))
                   (in ?x b)))
  (:action take-out
     :parameters (?x - physob)
     :precondition (not (= ?x b))
     :effect (not (in ?x b))))

(define (situation briefcase-init)
   (:domain briefcase-world)
   (:objects p d - physob)
   (:init (location home) (location office)))

(define (problem get-paid)
    (:domain briefcase-world)
    (:situation briefcase-init)
    (:init (at b home) (at p home) (at d home) (in p b))
    (:goal (and (at b office) (at d office) (at p home))))
)";

std::vector<SExprPtr> forms_of(const std::string& text) {
    std::vector<Diagnostic> diags;
    return read_sexprs(text, diags);
}

bool forms_equal(const std::vector<SExprPtr>& a, const std::vector<SExprPtr>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
        if (!sexpr_equal(a[i], b[i])) return false;
    return true;
}

size_t count_flags(const std::string& s) {
    size_t n = 0;
    for (size_t i = s.find("<<"); i != std::string::npos; i = s.find("<<", i + 2)) n++;
    return n;
}

// Parse + build, collecting the concrete forms and every diagnostic.
std::vector<Diagnostic> check_text(const std::string& text, std::vector<SExprPtr>& forms,
                                   bool strict = false) {
    ParseOptions po;
    po.strict = strict;
    ParsedFile pf = parse_file("in.pddl", text, po);
    std::vector<Diagnostic> diags = pf.diags;
    Registry reg;
    for (const auto& def : pf.defs) build_definition(def, reg, diags);
    forms = pf.toplevel;
    return diags;
}

TEST_CASE("pretty-printed forms re-parse to the same trees") {
    std::vector<SExprPtr> orig = forms_of(kRoundTrip);
    REQUIRE(orig.size() == 3);

    std::string pp = pretty_print(orig);
    CHECK(forms_equal(forms_of(pp), orig));

    // Printing is a fixpoint after one pass.
    CHECK(pretty_print(forms_of(pp)) == pp);
    // ...and deterministic.
    CHECK(pretty_print(orig) == pp);

    // Width only changes layout, never structure.
    PrintOptions narrow{40, false}, wide{100, false};
    std::string pn = pretty_print(orig, narrow);
    std::string pw = pretty_print(orig, wide);
    CHECK(pn != pw);
    CHECK(forms_equal(forms_of(pn), orig));
    CHECK(forms_equal(forms_of(pw), orig));

    // Default width is respected on this splittable input.
    std::istringstream lines(pp);
    std::string line;
    while (std::getline(lines, line)) CHECK(line.size() <= 80);
}

TEST_CASE("canonical case by default, original case on request") {
    std::vector<SExprPtr> forms = forms_of("(AT B Home)");
    CHECK(pretty_print(forms) == "(at b home)\n");
    CHECK(pretty_print(forms, PrintOptions{80, true}) == "(AT B Home)\n");
}

TEST_CASE("advice annotations survive printing") {
    std::string text =
        "(define (domain d) (:requirements :strips) (:predicates (p))\n"
        "  (:action a :parameters () :precondition (^^ (p) advisory) :effect (p)))";
    std::vector<SExprPtr> orig = forms_of(text);
    std::string pp = pretty_print(orig);
    CHECK(pp.find("(^^ (p) advisory)") != std::string::npos);
    CHECK(forms_equal(forms_of(pp), orig));
}

const char* kArityError = R"((define (domain flagd)
  (:requirements :strips :typing)
  (:types location physob)
  (:constants b - physob home office - location)
  (:predicates (at ?x - physob ?l - location))
  (:action stay
     :parameters (?x - physob ?l - location)
     :precondition (at ?x ?l)
     :effect (at ?x ?l)))
(define (problem flagp)
  (:domain flagd)
  (:init (at b home))
  (:goal (at b home office)))
)";

TEST_CASE("a chk report flags the offending subexpression in place") {
    std::vector<SExprPtr> forms;
    std::vector<Diagnostic> diags = check_text(kArityError, forms);
    REQUIRE(diags.size() == 1);

    ChkDocument doc = render_chk(forms, diags);
    CHECK(doc.text.find("<< wrong number of arguments: (at b home office) >>") !=
          std::string::npos);
    CHECK(count_flags(doc.text) == diags.size());
    CHECK(doc.errors == 1);
    CHECK(doc.warnings == 0);
    CHECK(doc.text.find(";; 1 error(s), 0 warning(s)\n") != std::string::npos);

    REQUIRE(doc.anchors.size() == 1);
    CHECK(doc.text.compare(doc.anchors[0], 2, "<<") == 0);

    // Byte-for-byte deterministic.
    CHECK(render_chk(forms, diags).text == doc.text);
}

TEST_CASE("stripping flag envelopes restores the source forms") {
    std::vector<SExprPtr> forms;
    std::vector<Diagnostic> diags = check_text(kArityError, forms);
    ChkDocument doc = render_chk(forms, diags);
    CHECK(forms_equal(forms_of(strip_flags(doc.text)), forms));
}

TEST_CASE("zero diagnostics still produce a report") {
    std::vector<SExprPtr> forms;
    std::vector<Diagnostic> diags = check_text(kRoundTrip, forms);
    REQUIRE(diags.empty());
    ChkDocument doc = render_chk(forms, diags);
    CHECK(count_flags(doc.text) == 0);
    CHECK(doc.text.find(";; 0 error(s), 0 warning(s)\n") != std::string::npos);
    CHECK(forms_equal(forms_of(doc.text), forms));
}

TEST_CASE("warnings are counted separately from errors") {
    // An undeclared supertype is auto-registered with a warning.
    std::vector<SExprPtr> forms;
    std::vector<Diagnostic> diags = check_text(
        "(define (domain warnd) (:requirements :strips :typing)"
        " (:types car - vehicle))",
        forms);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].severity == Severity::Warning);
    ChkDocument doc = render_chk(forms, diags);
    CHECK(doc.errors == 0);
    CHECK(doc.warnings == 1);
    CHECK(count_flags(doc.text) == 1);
    CHECK(doc.text.find(";; 0 error(s), 1 warning(s)\n") != std::string::npos);
}

TEST_CASE("flags nest when errors nest") {
    std::string text =
        "(define (addendum extra) (:domain somewhere)\n"
        "  (:method fix :name patch :parameters () :expansion (helper)"
        " :effect (p)))";
    ParseOptions po;
    po.strict = true;
    ParsedFile pf = parse_file("in.pddl", text, po);
    REQUIRE(pf.diags.size() == 2);

    ChkDocument doc = render_chk(pf.toplevel, pf.diags);
    size_t outer = doc.text.find("<< addenda are not allowed in strict mode:");
    size_t inner = doc.text.find("<< :effect not allowed in a method:");
    REQUIRE(outer != std::string::npos);
    REQUIRE(inner != std::string::npos);
    CHECK(outer < inner);
    CHECK(count_flags(doc.text) == 2);
    // The inner envelope closes before the outer one.
    CHECK(doc.text.rfind(" >>") > doc.text.find(" >>", inner));
}

TEST_CASE("lexer-level diagnostics appear as comment lines") {
    std::string text = "(define (domain d) (:requirements :strips)) #";
    std::vector<Diagnostic> diags;
    std::vector<SExprPtr> forms = read_sexprs(text, diags);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].id == DiagId::IllegalCharacter);

    ChkDocument doc = render_chk(forms, diags);
    CHECK(doc.text.find(";; << illegal character: #") != std::string::npos);
    CHECK(count_flags(doc.text) == 1);
    REQUIRE(doc.anchors.size() == 1);
    CHECK(doc.text.compare(doc.anchors[0], 2, "<<") == 0);
    CHECK(forms_equal(forms_of(strip_flags(doc.text)), forms));
}

TEST_CASE("chk files are named after their inputs") {
    CHECK(chk_path("a/b/briefcase.pddl") == "a/b/briefcase.chk");
    CHECK(chk_path("briefcase.pddl", "out") == "out/briefcase.chk");
    CHECK(chk_path("noext") == "noext.chk");
}

}  // namespace
