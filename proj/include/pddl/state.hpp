#pragma once

#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pddl/model.hpp"

namespace pddl {

// Ground argument: an object constant (canonical name) or a number.
struct Value {
    enum class Kind { Const, Num };
    Kind kind = Kind::Const;
    std::string name;  // Const
    NumericValue num;  // Num

    static Value constant(std::string s) {
        Value v;
        v.name = std::move(s);
        return v;
    }
    static Value number(NumericValue n) {
        Value v;
        v.kind = Kind::Num;
        v.num = n;
        return v;
    }
    bool is_num() const { return kind == Kind::Num; }
    std::string str() const;

    friend bool operator==(const Value& a, const Value& b) {
        if (a.kind != b.kind) return false;
        return a.is_num() ? a.num == b.num : a.name == b.name;
    }
    friend bool operator<(const Value& a, const Value& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.is_num() ? a.num < b.num : a.name < b.name;
    }
};

struct GroundAtom {
    std::string pred;
    std::vector<Value> args;

    std::string str() const;
    friend bool operator==(const GroundAtom& a, const GroundAtom& b) {
        return a.pred == b.pred && a.args == b.args;
    }
    friend bool operator<(const GroundAtom& a, const GroundAtom& b) {
        if (a.pred != b.pred) return a.pred < b.pred;
        return a.args < b.args;
    }
};

// Constant -> declared type; shared by every state of one validation run.
using Universe = std::map<std::string, TypeExpr>;

// A situation snapshot.  Only primitive predicates are stored; derived truth
// is always computed.  Timeless literals are carried by the domain model.
struct State {
    std::set<GroundAtom> atoms;
    std::map<std::string, NumericValue> fluents;      // fluent object -> value
    std::map<std::string, NumericValue> domain_vars;  // domain variable -> value
    std::shared_ptr<const Universe> objects;
};

using Substitution = std::map<std::string, Value>;  // "?x" -> value

enum class EvalCode {
    UnboundVariable,   // expression variable with no binding
    DivisionByZero,
    FluentInEval,      // fluent reference in a plain eval context
    NoCurrentValue,    // fluent or domain variable read before any value set
    MultipleUnknowns,  // equation with two or more unbound occurrences
    UnsolvableEquation,
    Unenumerable,      // quantifier over a type with no finite extension
    DerivedConflict,   // some atom is both derivably true and derivably false
    BadEquality,       // (= a b) with both sides unbound
    NotANumber,        // name in an expression that has no numeric meaning
};
const char* eval_code_str(EvalCode c);

struct EvalError : std::exception {
    EvalCode code;
    std::string detail;
    SExprPtr at;
    mutable std::string text;

    EvalError(EvalCode c, std::string d, SExprPtr node = nullptr)
        : code(c), detail(std::move(d)), at(std::move(node)) {}
    const char* what() const noexcept override;
};

// Satisfaction and evaluation against one state.  Derived atoms are computed
// lazily (bottom-up per stratum) the first time anything needs them; the
// evaluator caches them, so keep one evaluator per state.
class Evaluator {
  public:
    Evaluator(const DomainModel& model, const State& state);

    // Every extension of sigma that satisfies g, deduplicated, in a
    // deterministic order.  Quantifiers enumerate the typed universe.
    std::vector<Substitution> satisfy(const GdPtr& g, const Substitution& sigma);
    bool holds(const GdPtr& g, const Substitution& sigma);

    // fluent_ctx selects fluent-eval semantics: fluent references are read
    // through to their current value instead of being an error.
    NumericValue eval_expr(const ExprPtr& e, const Substitution& sigma,
                           bool fluent_ctx);

    bool atom_true(const GroundAtom& a);
    bool value_has_type(const Value& v, const TypeExpr& t);
    std::vector<Value> extension(const TypeExpr& t);

    const std::set<GroundAtom>& derived_true();   // forces the closure
    const std::set<GroundAtom>& derived_false();  // negative-implies results

  private:
    const DomainModel& m_;
    const State& s_;
    std::set<GroundAtom> timeless_pos_, timeless_neg_;
    std::set<GroundAtom> dpos_, dneg_;
    bool derived_ready_ = false;
    bool computing_ = false;

    void ensure_derived();
    void run_stratum(int s);
    std::vector<Substitution> satisfy_atom(const Gd& g, const Substitution& sigma);
    std::vector<Substitution> satisfy_builtin(const Gd& g, const Substitution& sigma);
    std::vector<Substitution> satisfy_equality(const Gd& g, const Substitution& sigma);
    NumericValue sum_fluent(const Expr& e, const Substitution& sigma);
    NumericValue read_fluent(const std::string& name, bool fluent_ctx,
                             const SExprPtr& at);
    void for_each_true(const std::string& pred,
                       const std::function<void(const GroundAtom&)>& fn);
};

// State for a situation: init literals are applied in file order (positive
// adds, negated deletes; derived predicates are skipped — their truth is
// computed), current-value literals initialize fluents, domain variables take
// their declared initial values. The universe is domain constants +
// situation_objects.
State initial_state(const DomainModel& m, const SituationData& data);

// Term -> value under sigma; unbound variables yield nullopt.
std::optional<Value> term_value(const Term& t, const Substitution& sigma);

GroundAtom ground_literal_atom(const GroundLiteralAst& lit);

}  // namespace pddl
