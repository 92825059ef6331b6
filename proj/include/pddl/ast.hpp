#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pddl/sexpr.hpp"

namespace pddl {

// Case-insensitive identifier; equality and lookups use `canon`.
struct Name {
    std::string canon;
    std::string original;
    SExprPtr src;  // atom this name came from (may be null for built-ins)

    Name() = default;
    Name(std::string c, std::string o, SExprPtr s = nullptr)
        : canon(std::move(c)), original(std::move(o)), src(std::move(s)) {}
    static Name of(const std::string& s) { return Name(to_lower(s), s); }
    bool empty() const { return canon.empty(); }
    friend bool operator==(const Name& a, const Name& b) { return a.canon == b.canon; }
    friend bool operator<(const Name& a, const Name& b) { return a.canon < b.canon; }
};

// A term in an atomic formula: constant name, variable (canon includes the
// leading '?'), or a number literal.
struct Term {
    enum class Kind { Constant, Variable, Number };
    Kind kind = Kind::Constant;
    Name name;
    NumericValue num;

    bool is_var() const { return kind == Kind::Variable; }
};

struct TypeExpr {
    enum class Kind { Atom, Either, Fluent };
    Kind kind = Kind::Atom;
    Name name;                      // Atom
    std::vector<TypeExpr> members;  // Either; Fluent uses members[0]

    static TypeExpr object() {
        TypeExpr t;
        t.name = Name::of("object");
        return t;
    }
    static TypeExpr atom(Name n) {
        TypeExpr t;
        t.name = std::move(n);
        return t;
    }
    std::string str() const;
    friend bool operator==(const TypeExpr& a, const TypeExpr& b);
};

// `x y - t u - s rest...`; items without a trailing type default to object.
struct TypedGroup {
    std::vector<Name> items;
    TypeExpr type = TypeExpr::object();
    bool explicit_type = false;
};

struct TypedList {
    std::vector<TypedGroup> groups;
    bool uses_minus = false;  // demands :typing
    SExprPtr src;

    std::vector<std::pair<Name, TypeExpr>> flat() const;
    bool empty() const { return groups.empty(); }
};

struct DomainVarDecl {
    Name name;
    std::optional<NumericValue> initial;
    TypeExpr type = TypeExpr::object();
    SExprPtr src;
};

struct Gd;
struct Expr;
using GdPtr = std::shared_ptr<const Gd>;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression in an evaluation context.  Sum is the one compound
// fluent expression; its condition is a goal description.
struct Expr {
    enum class Kind { Num, Ref, Var, Apply, Sum };
    Kind kind = Kind::Num;
    NumericValue num;            // Num
    Name name;                   // Ref (domain variable / fluent / constant), Var
    Name op;                     // Apply: + - * / (and comparison heads in test)
    std::vector<ExprPtr> args;   // Apply
    TypedList sum_vars;          // Sum
    GdPtr sum_cond;
    ExprPtr sum_body;
    SExprPtr src;
    std::vector<SExprPtr> advice;
};

// Goal description.  `Builtin` covers the evaluation-context predicates
// (eval, test, bounded-int, equation, fluent-eval, fluent-test,
// current-value) whose arguments are expressions rather than terms.
struct Gd {
    enum class Kind { Atom, Not, And, Or, Imply, Exists, Forall, Builtin };
    Kind kind = Kind::Atom;
    Name pred;               // Atom, Builtin
    std::vector<Term> args;  // Atom
    std::vector<ExprPtr> eargs;  // Builtin
    std::vector<GdPtr> children;
    TypedList vars;  // Exists / Forall
    SExprPtr src;
    std::vector<SExprPtr> advice;
};

struct Effect;
using EffectPtr = std::shared_ptr<const Effect>;

struct Effect {
    enum class Kind { Add, Del, And, Forall, When, Change };
    Kind kind = Kind::Add;
    Name pred;               // Add / Del
    std::vector<Term> args;
    std::vector<EffectPtr> children;  // And; Forall/When use children[0]
    TypedList vars;                   // Forall
    GdPtr cond;                       // When
    Term fluent;                      // Change
    ExprPtr expr;                     // Change
    SExprPtr src;
    std::vector<SExprPtr> advice;
};

struct LabelTerm {
    enum class Qual { Whole, Begin, End };
    Name label;
    Qual qual = Qual::Whole;
    SExprPtr src;
};

struct Spec;
using SpecPtr = std::shared_ptr<const Spec>;

// Conditions attachable to in-context nodes (a subset of an action-def body).
struct SpecConds {
    TypedList vars;
    GdPtr precondition;
    GdPtr maintain;
    EffectPtr effect;  // announced net effect; checked as a warning only
};

// Action specs (expansion bodies, problem :expansion, constraints).
// LabelRef occurs only in constraint position and names a tag label.
struct Spec {
    enum class Kind {
        ActionTerm,  // (functor term*) including the no-op (--)
        LabelRef,
        InContext,
        Choice,
        Forsome,
        Series,
        Parallel,
        Tag,
        Foreach,
        Constrained,
    };
    Kind kind = Kind::ActionTerm;
    Name functor;            // ActionTerm / LabelRef
    std::vector<Term> args;  // ActionTerm
    std::vector<SpecPtr> children;
    SpecConds conds;          // InContext
    TypedList vars;           // Forsome / Foreach
    GdPtr cond;               // Foreach filter
    std::vector<LabelTerm> pre_labels, post_labels;  // Tag (child = children[0])
    std::vector<SpecPtr> constraints;                // Constrained (group = children)
    SExprPtr src;
    std::vector<SExprPtr> advice;

    bool noop() const { return kind == Kind::ActionTerm && functor.canon == "--"; }
};

struct GroundLiteralAst {
    bool positive = true;
    Name pred;
    std::vector<Term> args;  // constants and numbers only
    SExprPtr src;
};

// One requirement demand recorded during parsing: the construct at `node` is
// legal only if the closed requirement set intersects `any_of`.
struct ReqDemand {
    uint32_t any_of = 0;
    SExprPtr node;
    bool warn_only = false;
    std::string flag_text;  // for the diagnostic message, e.g. ":typing"
};

struct ActionDefBody {
    TypedList vars;
    GdPtr precondition;
    SpecPtr expansion;
    bool methods_placeholder = false;  // :expansion :methods
    GdPtr maintain;
    EffectPtr effect;
    std::optional<bool> only_in_expansions;
};

struct ActionDef {
    Name functor;
    TypedList params;
    bool params_present = false;
    ActionDefBody body;
    SExprPtr src;
};

struct MethodDef {
    Name action;
    std::optional<Name> method_name;
    TypedList params;
    bool params_present = false;
    ActionDefBody body;
    SExprPtr src;
};

struct AxiomDefAst {
    TypedList vars;
    GdPtr context;
    bool implies_positive = true;
    Name implies_pred;
    std::vector<Term> implies_args;
    SExprPtr src;
};

struct PredicateDecl {
    Name name;
    TypedList params;
    SExprPtr src;
};

struct DomainDef {
    Name name;
    std::vector<Name> extends;
    std::vector<Name> requirements;  // raw flags, resolved by the model
    bool requirements_present = false;
    TypedList types;
    TypedList constants;
    std::vector<DomainVarDecl> domain_vars;
    std::vector<PredicateDecl> predicates;
    std::vector<GroundLiteralAst> timeless;
    std::vector<GdPtr> safety;
    std::vector<ActionDef> actions;
    std::vector<AxiomDefAst> axioms;
    std::vector<MethodDef> methods;
    std::vector<ReqDemand> demands;
    SExprPtr src;
};

struct LengthSpec {
    std::optional<int64_t> serial, parallel;
};

struct ProblemDef {
    Name name;
    Name domain;
    std::vector<Name> requirements;
    std::optional<Name> situation;
    TypedList objects;
    std::vector<GroundLiteralAst> init;
    std::vector<GdPtr> goals;
    std::vector<SpecPtr> expansions;
    std::optional<LengthSpec> length;
    std::vector<ReqDemand> demands;
    SExprPtr src;
};

struct SituationDef {
    Name name;
    Name domain;
    TypedList objects;
    std::vector<GroundLiteralAst> init;
    std::vector<ReqDemand> demands;
    SExprPtr src;
};

struct AddendumDef {
    Name name;
    Name domain;
    std::vector<ActionDef> actions;
    std::vector<AxiomDefAst> axioms;
    std::vector<MethodDef> methods;
    std::vector<GdPtr> safety;
    std::vector<ReqDemand> demands;
    SExprPtr src;
};

using Definition = std::variant<DomainDef, ProblemDef, SituationDef, AddendumDef>;

struct ParsedFile {
    std::string path;
    std::string text;
    std::vector<SExprPtr> toplevel;
    std::vector<Definition> defs;
    std::vector<Diagnostic> diags;
};

// --- Advice-stripping and span-insensitive structural equality (tests and
// semantic phases work on stripped trees; the printer re-emits annotations
// from the concrete syntax).
GdPtr strip_advice(const GdPtr& g);
EffectPtr strip_advice(const EffectPtr& e);
SpecPtr strip_advice(const SpecPtr& s);
ExprPtr strip_advice(const ExprPtr& e);

bool ast_equal(const GdPtr& a, const GdPtr& b);
bool ast_equal(const EffectPtr& a, const EffectPtr& b);
bool ast_equal(const SpecPtr& a, const SpecPtr& b);
bool ast_equal(const ExprPtr& a, const ExprPtr& b);
bool ast_equal(const Term& a, const Term& b);
bool ast_equal(const TypedList& a, const TypedList& b);

std::string term_str(const Term& t);

}  // namespace pddl
