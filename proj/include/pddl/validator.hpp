#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pddl/parser.hpp"
#include "pddl/state.hpp"

namespace pddl {

struct GroundAction {
    Name functor;
    std::vector<Value> args;
    SExprPtr src;

    std::string str() const;
};

// Net effect of one step: applied as (atoms \ dels) ∪ adds, i.e. add wins
// when the same atom is both added and deleted, plus fluent updates.
struct EffectDelta {
    std::set<GroundAtom> adds, dels;
    std::map<std::string, NumericValue> changes;

    bool empty() const { return adds.empty() && dels.empty() && changes.empty(); }
};

struct StepFailure {
    enum class Kind {
        UnknownAction,
        Nonprimitive,
        WrongArity,
        BadArgument,     // argument fails the parameter type / unknown object
        Inapplicable,    // precondition has no witness
        MultipleWitness, // more than one :vars instance satisfies
        TimelessViolation,
        ChangeConflict,  // two changes to one fluent disagree
        NotAFluent,
        Evaluation,      // expression/derivation error, detail has the code
    };
    Kind kind = Kind::Inapplicable;
    std::string detail;

    std::string str() const;
};

// Parameter substitution extended by unique :vars witnesses.  Variables the
// precondition leaves unconstrained stay unbound and act universally in the
// effect.
struct Applicability {
    bool ok = false;
    Substitution sigma;
    std::optional<StepFailure> failure;
};

Applicability applicable(const GroundAction& a, const State& s, const DomainModel& m);

// Effect evaluated wholly against the pre-state; throws StepFailure wrapped
// in ValidationError on malformed deltas.
struct ValidationError {
    StepFailure failure;
};

EffectDelta effect_delta(const ActionSchema& schema, const Substitution& sigma,
                         const State& pre, const DomainModel& m);

State apply_delta(const State& s, const EffectDelta& d, const DomainModel& m);

struct ExecOutcome {
    bool ok = false;
    std::vector<State> states;       // S_0 .. S_j for the executed prefix
    std::vector<EffectDelta> deltas; // one per executed step
    size_t failed_step = 0;          // 1-based; 0 when ok
    StepFailure failure;
};

ExecOutcome execute_plan(const std::vector<GroundAction>& steps, const State& s0,
                         const DomainModel& m);

enum class Verdict { Solves, Fails, Refused };
enum class Clause { None, Feasibility, Goal, Expansion, OnlyInExpansions, Safety };

const char* verdict_str(Verdict v);
const char* clause_str(Clause c);

struct ValidationReport {
    Verdict verdict = Verdict::Fails;
    Clause failed = Clause::None;
    std::string reason;     // first failure, human-readable
    size_t failed_step = 0; // 1-based; 0 when not step-specific
    std::vector<std::string> warnings;
    std::vector<GroundAction> steps;
    std::vector<State> states;
    std::vector<EffectDelta> deltas;
    std::vector<std::string> realization_notes;
};

struct ValidateOptions {
    bool ignore_hints = false;
    long long budget = 1000000;
};

// The three-clause solves relation plus the safety end-check.  `model` is the
// registry domain copy that carries the problem's merged situation.
ValidationReport solves(const SolutionAst& sol, const ProblemModel& prob,
                        const DomainModel& model, const ValidateOptions& opts = {});

// Ground plan steps from the parsed solution; variables are rejected.
std::optional<GroundAction> ground_step(const PlanStepAst& step,
                                        std::string* error);

}  // namespace pddl
