#include <algorithm>

#include "doctest.h"
#include "pddl/parser.hpp"
#include "pddl/requirements.hpp"

using namespace pddl;

namespace {

struct Ctx {
    std::vector<Diagnostic> diags;
    std::vector<ReqDemand> demands;
    ParserCtx ctx{&diags, &demands, false};

    bool demanded(Req r) const {
        return std::any_of(demands.begin(), demands.end(), [&](const ReqDemand& d) {
            return !d.warn_only && (d.any_of & req_bit(r));
        });
    }
    bool has(DiagId id) const {
        return std::any_of(diags.begin(), diags.end(),
                           [&](const Diagnostic& d) { return d.id == id; });
    }
};

SExprPtr read1(const std::string& s) {
    std::vector<Diagnostic> d;
    auto es = read_sexprs(s, d);
    REQUIRE(es.size() == 1);
    REQUIRE(d.empty());
    return es[0];
}

GdPtr gd(Ctx& c, const std::string& s) { return parse_gd(read1(s), c.ctx); }
EffectPtr eff(Ctx& c, const std::string& s) { return parse_effect(read1(s), c.ctx); }
SpecPtr spec(Ctx& c, const std::string& s) { return parse_action_spec(read1(s), c.ctx); }

}  // namespace

TEST_CASE("typed list splits groups and defaults to object") {
    Ctx c;
    auto e = read1("(?x ?y - truck ?z)");
    auto tl = parse_typed_list(e->items, 0, e->items.size(),
                               TypedItemKind::Variables, c.ctx, e);
    auto flat = tl.flat();
    REQUIRE(flat.size() == 3);
    CHECK(flat[0].first.canon == "?x");
    CHECK(flat[0].second.str() == "truck");
    CHECK(flat[1].second.str() == "truck");
    CHECK(flat[2].second.str() == "object");
    CHECK(tl.uses_minus);
    CHECK(c.diags.empty());
}

TEST_CASE("typed list error positions") {
    Ctx c;
    auto e = read1("(- truck ?x)");
    parse_typed_list(e->items, 0, e->items.size(), TypedItemKind::Variables, c.ctx, e);
    CHECK(c.has(DiagId::TypedListItem));

    Ctx c2;
    auto e2 = read1("(?x -)");
    parse_typed_list(e2->items, 0, e2->items.size(), TypedItemKind::Variables, c2.ctx, e2);
    CHECK(c2.has(DiagId::TypeMissingAfterMinus));

    Ctx c3;
    auto e3 = read1("(?x (bad) ?y)");
    parse_typed_list(e3->items, 0, e3->items.size(), TypedItemKind::Variables, c3.ctx, e3);
    CHECK(c3.has(DiagId::VariableExpected));
}

TEST_CASE("either and fluent types") {
    Ctx c;
    auto t = parse_type_expr(read1("(either truck plane)"), c.ctx);
    CHECK(t.kind == TypeExpr::Kind::Either);
    CHECK(t.str() == "(either truck plane)");

    auto f = parse_type_expr(read1("(fluent integer)"), c.ctx);
    CHECK(f.kind == TypeExpr::Kind::Fluent);
    CHECK(c.demanded(Req::Fluents));
}

TEST_CASE("negated atom is a literal; general not demands disjunction") {
    Ctx c;
    auto g = gd(c, "(not (on a b))");
    CHECK(g->kind == Gd::Kind::Not);
    CHECK(!c.demanded(Req::DisjunctivePreconditions));

    Ctx c2;
    gd(c2, "(not (and (p) (q)))");
    CHECK(c2.demanded(Req::DisjunctivePreconditions));

    Ctx c3;
    gd(c3, "(or (p) (q))");
    CHECK(c3.demanded(Req::DisjunctivePreconditions));

    Ctx c4;
    auto gi = gd(c4, "(imply (p) (q))");
    CHECK(gi->kind == Gd::Kind::Imply);
    CHECK(c4.demanded(Req::DisjunctivePreconditions));
}

TEST_CASE("quantifiers record their own flags") {
    Ctx c;
    auto g = gd(c, "(exists (?x - block) (clear ?x))");
    CHECK(g->kind == Gd::Kind::Exists);
    CHECK(c.demanded(Req::ExistentialPreconditions));
    CHECK(!c.demanded(Req::UniversalPreconditions));

    Ctx c2;
    gd(c2, "(forall (?x) (clear ?x))");
    CHECK(c2.demanded(Req::UniversalPreconditions));
}

TEST_CASE("equality atom demands :equality") {
    Ctx c;
    auto g = gd(c, "(= ?x ?y)");
    CHECK(g->kind == Gd::Kind::Atom);
    CHECK(g->pred.canon == "=");
    CHECK(c.demanded(Req::Equality));
}

TEST_CASE("evaluation-context goals parse as builtins") {
    Ctx c;
    auto g = gd(c, "(eval (+ ?x 1) ?y)");
    CHECK(g->kind == Gd::Kind::Builtin);
    REQUIRE(g->eargs.size() == 2);
    CHECK(g->eargs[0]->kind == Expr::Kind::Apply);
    CHECK(c.demanded(Req::ExpressionEvaluation));

    Ctx c2;
    gd(c2, "(fluent-test (> (fluent-eval (current-value level1 ?v)) 0))");
    CHECK(c2.demanded(Req::Fluents));

    Ctx c3;
    auto s = gd(c3, "(eval (sum (?x) (busy ?x) (weight ?x)) ?total)");
    CHECK(s->eargs[0]->kind == Expr::Kind::Sum);
    CHECK(c3.demanded(Req::Fluents));
}

TEST_CASE("effects: not means delete, connectives are rejected") {
    Ctx c;
    auto e = eff(c, "(and (at ?t ?to) (not (at ?t ?from)))");
    REQUIRE(e->kind == Effect::Kind::And);
    REQUIRE(e->children.size() == 2);
    CHECK(e->children[0]->kind == Effect::Kind::Add);
    CHECK(e->children[1]->kind == Effect::Kind::Del);
    CHECK(c.diags.empty());

    Ctx c2;
    eff(c2, "(or (p) (q))");
    CHECK(c2.has(DiagId::NotAllowedInEffect));

    Ctx c3;
    eff(c3, "(not (and (p) (q)))");
    CHECK(c3.has(DiagId::LiteralRequired));
}

TEST_CASE("when evaluates against the pre-state and demands the flag") {
    Ctx c;
    auto e = eff(c, "(when (on ?x ?y) (not (clear ?y)))");
    CHECK(e->kind == Effect::Kind::When);
    REQUIRE(e->cond);
    CHECK(c.demanded(Req::ConditionalEffects));

    Ctx c2;
    auto f = eff(c2, "(forall (?b - block) (when (on ?b ?x) (not (on ?b ?x))))");
    CHECK(f->kind == Effect::Kind::Forall);
    CHECK(c2.demanded(Req::ConditionalEffects));
}

TEST_CASE("change effects carry a fluent and an expression") {
    Ctx c;
    auto e = eff(c, "(change ?level (+ ?level 1))");
    CHECK(e->kind == Effect::Kind::Change);
    CHECK(e->fluent.is_var());
    CHECK(e->expr->kind == Expr::Kind::Apply);
    CHECK(c.demanded(Req::Fluents));
}

TEST_CASE("advice annotations are structurally transparent") {
    Ctx c;
    auto plain = gd(c, "(and (on a b) (clear a))");
    Ctx c2;
    auto advised = gd(c2, "(^^ (and (^^ (on a b) (use-hint 1)) (clear a)) (style fancy))");
    CHECK(c2.diags.empty());
    CHECK(ast_equal(strip_advice(plain), strip_advice(advised)));
    REQUIRE(advised->advice.size() == 1);
    CHECK(sexpr_str(advised->advice[0]) == "(style fancy)");

    Ctx c3;
    gd(c3, "(^^ (p))");
    CHECK(c3.has(DiagId::MalformedAdvice));
}

TEST_CASE("action specs: structural forms") {
    Ctx c;
    auto s = spec(c, "(series (go ?x) (-- ) (choice (a) (b)))");
    REQUIRE(s->kind == Spec::Kind::Series);
    REQUIRE(s->children.size() == 3);
    CHECK(s->children[1]->noop());
    CHECK(s->children[2]->kind == Spec::Kind::Choice);
    CHECK(c.diags.empty());

    Ctx c2;
    auto f = spec(c2, "(foreach (?b - bolt) (loose ?b) (tighten ?b))");
    CHECK(f->kind == Spec::Kind::Foreach);
    CHECK(c2.demanded(Req::ForeachExpansions));

    Ctx c3;
    auto fs = spec(c3, "(forsome (?t - truck) (drive ?t))");
    CHECK(fs->kind == Spec::Kind::Forsome);

    Ctx c4;
    auto ic = spec(c4, "(in-context (load ?p) :precondition (at ?p ?loc))");
    CHECK(ic->kind == Spec::Kind::InContext);
    REQUIRE(ic->conds.precondition);
    CHECK(ic->children.size() == 1);

    Ctx c5;
    auto ach = spec(c5, "(achieve (at pkg home))");
    CHECK(ach->kind == Spec::Kind::InContext);
    CHECK(ach->children[0]->noop());
    REQUIRE(ach->conds.precondition);
}

TEST_CASE("tag labels with qualifiers") {
    Ctx c;
    auto t = spec(c, "(tag start (move a b) end)");
    REQUIRE(t->kind == Spec::Kind::Tag);
    REQUIRE(t->pre_labels.size() == 1);
    REQUIRE(t->post_labels.size() == 1);
    CHECK(t->pre_labels[0].label.canon == "start");
    CHECK(t->pre_labels[0].qual == LabelTerm::Qual::Whole);
    CHECK(c.diags.empty());

    Ctx c2;
    auto t2 = spec(c2, "(tag (move a b) (< finish) (> begin-b))");
    REQUIRE(t2->post_labels.size() == 2);
    CHECK(t2->post_labels[0].qual == LabelTerm::Qual::Begin);
    CHECK(t2->post_labels[1].qual == LabelTerm::Qual::End);

    // A bare name where the action should be: treated as a no-argument action.
    Ctx c3;
    auto t3 = spec(c3, "(tag unpack (> end-a))");
    CHECK(t3->children[0]->kind == Spec::Kind::ActionTerm);
    CHECK(t3->children[0]->functor.canon == "unpack");
    CHECK(t3->pre_labels.empty());
}

TEST_CASE("constrained takes a group or a single spec plus label constraints") {
    Ctx c;
    auto s = spec(c, "(constrained ((series (a) (b)) (series (c) (d)))"
                     " (series a-label c-label))");
    REQUIRE(s->kind == Spec::Kind::Constrained);
    CHECK(s->children.size() == 2);
    REQUIRE(s->constraints.size() == 1);
    CHECK(s->constraints[0]->children[0]->kind == Spec::Kind::LabelRef);
    CHECK(c.demanded(Req::DagExpansions));

    Ctx c2;
    auto single = spec(c2, "(constrained (series (a) (b)) (series x y))");
    CHECK(single->children.size() == 1);
}

TEST_CASE("a full domain definition lands in the right fields") {
    std::string text =
        "(define (domain logistics)\n"
        "  (:requirements :strips :typing)\n"
        "  (:types truck plane - vehicle)\n"
        "  (:constants home - location)\n"
        "  (:predicates (at ?v - vehicle ?l - location) (in ?p ?v - vehicle))\n"
        "  (:action drive :parameters (?t - truck ?from ?to - location)\n"
        "    :precondition (at ?t ?from)\n"
        "    :effect (and (not (at ?t ?from)) (at ?t ?to))))";
    auto pf = parse_file("mem", text);
    REQUIRE(pf.defs.size() == 1);
    CHECK(pf.diags.empty());
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d);
    CHECK(d->name.canon == "logistics");
    REQUIRE(d->requirements.size() == 2);
    CHECK(d->types.flat().size() == 2);
    CHECK(d->constants.flat().size() == 1);
    REQUIRE(d->predicates.size() == 2);
    CHECK(d->predicates[1].params.flat().size() == 2);
    REQUIRE(d->actions.size() == 1);
    CHECK(d->actions[0].functor.canon == "drive");
    CHECK(d->actions[0].params.flat().size() == 3);
    REQUIRE(d->actions[0].body.precondition);
    REQUIRE(d->actions[0].body.effect);
}

TEST_CASE("problem definitions: goal required, repeatable goal fields") {
    std::string text =
        "(define (problem p1) (:domain logistics)\n"
        "  (:objects pkg - package)\n"
        "  (:init (at pkg home))\n"
        "  (:goal (in pkg truck1)) (:goal (at pkg home)))";
    auto pf = parse_file("mem", text);
    auto* p = std::get_if<ProblemDef>(&pf.defs[0]);
    REQUIRE(p);
    CHECK(p->goals.size() == 2);
    CHECK(p->init.size() == 1);

    auto pf2 = parse_file("mem", "(define (problem p2) (:domain d) (:init (a)))");
    REQUIRE(!pf2.diags.empty());
    CHECK(std::any_of(pf2.diags.begin(), pf2.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::GoalRequired;
    }));
}

TEST_CASE("expansion bodies may not carry an effect") {
    std::string text =
        "(define (domain d) (:requirements :action-expansions)\n"
        "  (:action task :parameters ()\n"
        "    :expansion (series (a) (b))\n"
        "    :effect (done)))";
    auto pf = parse_file("mem", text);
    CHECK(std::any_of(pf.diags.begin(), pf.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::EffectAndExpansion;
    }));
}

TEST_CASE(":expansion :methods defers to separately defined methods") {
    std::string text =
        "(define (domain d) (:requirements :action-expansions)\n"
        "  (:action task :parameters (?x) :expansion :methods))";
    auto pf = parse_file("mem", text);
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d);
    CHECK(d->actions[0].body.methods_placeholder);
    CHECK(!d->actions[0].body.expansion);
}

TEST_CASE("strict mode enforces field order and one definition per file") {
    std::string text =
        "(define (domain d)\n"
        "  (:predicates (p))\n"
        "  (:requirements :strips))";  // :requirements must precede :predicates
    ParseOptions strict;
    strict.strict = true;
    auto pf = parse_file("mem", text, strict);
    CHECK(std::any_of(pf.diags.begin(), pf.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::FieldOutOfOrder;
    }));
    auto loose = parse_file("mem", text);
    CHECK(std::none_of(loose.diags.begin(), loose.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::FieldOutOfOrder;
    }));

    std::string two = "(define (domain a)) (define (domain b))";
    auto pf2 = parse_file("mem", two, strict);
    CHECK(std::any_of(pf2.diags.begin(), pf2.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::MultipleDefinitionsPerFile;
    }));
    CHECK(parse_file("mem", two).diags.empty());

    std::string add = "(define (addendum extra) (:domain d))";
    auto pf3 = parse_file("mem", add, strict);
    CHECK(std::any_of(pf3.diags.begin(), pf3.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::AddendumNotAllowed;
    }));
}

TEST_CASE("action body field order is flexible outside strict mode") {
    std::string text =
        "(define (domain d)\n"
        "  (:action a :parameters (?x)\n"
        "    :effect (p ?x)\n"
        "    :precondition (q ?x)))";
    auto pf = parse_file("mem", text);
    CHECK(pf.diags.empty());
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d->actions[0].body.precondition);
    REQUIRE(d->actions[0].body.effect);

    ParseOptions strict;
    strict.strict = true;
    auto pf2 = parse_file("mem", text, strict);
    CHECK(std::any_of(pf2.diags.begin(), pf2.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::FieldOutOfOrder;
    }));
}

TEST_CASE("duplicate fields are reported") {
    std::string text =
        "(define (domain d)\n"
        "  (:action a :parameters (?x) :precondition (p ?x)\n"
        "    :precondition (q ?x) :effect (r ?x)))";
    auto pf = parse_file("mem", text);
    CHECK(std::any_of(pf.diags.begin(), pf.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::DuplicateField;
    }));
}

TEST_CASE("situations and addenda parse") {
    auto pf = parse_file("mem",
        "(define (situation s1) (:domain blocks)\n"
        "  (:objects a b - block) (:init (on a b) (clear a)))");
    auto* s = std::get_if<SituationDef>(&pf.defs[0]);
    REQUIRE(s);
    CHECK(s->domain.canon == "blocks");
    CHECK(s->init.size() == 2);

    auto pf2 = parse_file("mem",
        "(define (addendum more) (:domain blocks)\n"
        "  (:axiom :vars (?x) :context (on ?x table) :implies (grounded ?x)))");
    auto* a = std::get_if<AddendumDef>(&pf2.defs[0]);
    REQUIRE(a);
    CHECK(a->axioms.size() == 1);
    CHECK(a->axioms[0].implies_pred.canon == "grounded");
}

TEST_CASE("axioms parse context, vars, and a possibly negated implies") {
    auto pf = parse_file("mem",
        "(define (domain d) (:requirements :domain-axioms)\n"
        "  (:axiom :vars (?x ?y) :context (on ?x ?y) :implies (not (clear ?y))))");
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d);
    REQUIRE(d->axioms.size() == 1);
    CHECK(!d->axioms[0].implies_positive);
    CHECK(d->axioms[0].implies_pred.canon == "clear");
    CHECK(d->axioms[0].vars.flat().size() == 2);
}

TEST_CASE("unknown requirement flags are reported at parse time") {
    auto pf = parse_file("mem", "(define (domain d) (:requirements :strips :warp))");
    CHECK(std::any_of(pf.diags.begin(), pf.diags.end(), [](const Diagnostic& d) {
        return d.id == DiagId::UnknownRequirement;
    }));
}

TEST_CASE("solution files: steps then optional hints") {
    auto sol = parse_solution("((boards fred e0) (up e0 e1))\n((debark fred e1))");
    CHECK(sol.diags.empty());
    REQUIRE(sol.steps.size() == 2);
    CHECK(sol.steps[0].functor.canon == "boards");
    REQUIRE(sol.steps[0].args.size() == 2);
    REQUIRE(sol.hints.size() == 1);
    CHECK(sol.hints[0].functor.canon == "debark");

    auto empty = parse_solution("()");
    CHECK(empty.steps.empty());
    CHECK(empty.diags.empty());
}

TEST_CASE("timeless literals are ground") {
    auto pf = parse_file("mem",
        "(define (domain d) (:predicates (fragile ?x))\n"
        "  (:timeless (fragile glass) (not (fragile anvil))))");
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d);
    REQUIRE(d->timeless.size() == 2);
    CHECK(d->timeless[0].positive);
    CHECK(!d->timeless[1].positive);
}

TEST_CASE("domain variables accept initial values") {
    auto pf = parse_file("mem",
        "(define (domain d) (:requirements :expression-evaluation)\n"
        "  (:domain-variables (counter 0) limit - (fluent number)))");
    auto* d = std::get_if<DomainDef>(&pf.defs[0]);
    REQUIRE(d);
    REQUIRE(d->domain_vars.size() == 2);
    CHECK(d->domain_vars[0].name.canon == "counter");
    REQUIRE(d->domain_vars[0].initial.has_value());
    CHECK(d->domain_vars[0].initial->i == 0);
    CHECK(!d->domain_vars[1].initial.has_value());
}

TEST_CASE(":length accepts serial and parallel bounds") {
    auto pf = parse_file("mem",
        "(define (problem p) (:domain d) (:goal (g))\n"
        "  (:length (:serial 5) (:parallel 2)))");
    auto* p = std::get_if<ProblemDef>(&pf.defs[0]);
    REQUIRE(p);
    REQUIRE(p->length.has_value());
    CHECK(p->length->serial == 5);
    CHECK(p->length->parallel == 2);
}
