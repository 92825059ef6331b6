#include "pddl/validator.hpp"

#include <algorithm>
#include <sstream>

#include "pddl/expansion.hpp"

namespace pddl {

std::string GroundAction::str() const {
    std::string out = "(" + functor.canon;
    for (const Value& v : args) out += " " + v.str();
    return out + ")";
}

std::string StepFailure::str() const {
    switch (kind) {
        case Kind::UnknownAction: return "unknown action: " + detail;
        case Kind::Nonprimitive: return "action is not primitive: " + detail;
        case Kind::WrongArity: return "wrong number of arguments: " + detail;
        case Kind::BadArgument: return "bad argument: " + detail;
        case Kind::Inapplicable: return "precondition not satisfied: " + detail;
        case Kind::MultipleWitness:
            return "context variable has several possible values: " + detail;
        case Kind::TimelessViolation:
            return "effect contradicts a timeless literal: " + detail;
        case Kind::ChangeConflict:
            return "conflicting changes to a fluent: " + detail;
        case Kind::NotAFluent: return "change target is not a fluent: " + detail;
        case Kind::Evaluation: return "evaluation failed: " + detail;
    }
    return detail;
}

const char* verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Solves: return "solves";
        case Verdict::Fails: return "fails";
        case Verdict::Refused: return "refused";
    }
    return "?";
}

const char* clause_str(Clause c) {
    switch (c) {
        case Clause::None: return "none";
        case Clause::Feasibility: return "feasibility";
        case Clause::Goal: return "goal";
        case Clause::Expansion: return "expansion";
        case Clause::OnlyInExpansions: return "only-in-expansions";
        case Clause::Safety: return "safety";
    }
    return "?";
}

std::optional<GroundAction> ground_step(const PlanStepAst& step, std::string* error) {
    GroundAction g;
    g.functor = step.functor;
    g.src = step.src;
    for (const Term& t : step.args) {
        switch (t.kind) {
            case Term::Kind::Constant: g.args.push_back(Value::constant(t.name.canon)); break;
            case Term::Kind::Number: g.args.push_back(Value::number(t.num)); break;
            case Term::Kind::Variable:
                if (error)
                    *error = "plan step " + step.functor.canon +
                             " has a variable argument " + t.name.canon;
                return std::nullopt;
        }
    }
    return g;
}

namespace {

Applicability fail(StepFailure::Kind k, std::string detail) {
    Applicability a;
    a.ok = false;
    a.failure = StepFailure{k, std::move(detail)};
    return a;
}

}  // namespace

Applicability applicable(const GroundAction& a, const State& s, const DomainModel& m) {
    const ActionSchema* schema = m.find_action(a.functor.canon);
    if (!schema) return fail(StepFailure::Kind::UnknownAction, a.functor.canon);
    if (!schema->primitive())
        return fail(StepFailure::Kind::Nonprimitive, a.functor.canon);

    auto params = schema->params.flat();
    if (params.size() != a.args.size())
        return fail(StepFailure::Kind::WrongArity,
                    a.functor.canon + " expects " + std::to_string(params.size()) +
                        " argument(s), got " + std::to_string(a.args.size()));

    Evaluator ev(m, s);
    Substitution sigma;
    for (size_t i = 0; i < params.size(); i++) {
        const auto& [name, type] = params[i];
        if (!ev.value_has_type(a.args[i], type))
            return fail(StepFailure::Kind::BadArgument,
                        a.args[i].str() + " is not of type " + type.str() +
                            " (parameter " + name.canon + " of " + a.functor.canon + ")");
        sigma[name.canon] = a.args[i];
    }

    Applicability result;
    result.ok = true;
    result.sigma = sigma;
    if (!schema->body.precondition) return result;  // no precondition: always executable

    std::vector<Substitution> sols = ev.satisfy(schema->body.precondition, sigma);

    // Context variables must be bound to values of their declared types.
    auto vars = schema->body.vars.flat();
    sols.erase(std::remove_if(sols.begin(), sols.end(),
                              [&](const Substitution& sol) {
                                  for (const auto& [vn, vt] : vars) {
                                      auto it = sol.find(vn.canon);
                                      if (it != sol.end() && !ev.value_has_type(it->second, vt))
                                          return true;
                                  }
                                  return false;
                              }),
               sols.end());
    if (sols.empty())
        return fail(StepFailure::Kind::Inapplicable,
                    a.str() + " (no satisfying values for its context)");

    // Each :vars variable must have a unique witness across the solutions; a
    // variable the precondition never binds stays unbound and acts universally
    // in the effects.
    for (const auto& [vn, vt] : vars) {
        std::optional<Value> seen;
        bool conflict = false;
        for (const Substitution& sol : sols) {
            auto it = sol.find(vn.canon);
            if (it == sol.end()) continue;
            if (!seen) {
                seen = it->second;
            } else if (!(*seen == it->second)) {
                conflict = true;
                break;
            }
        }
        if (conflict)
            return fail(StepFailure::Kind::MultipleWitness,
                        vn.canon + " in " + a.str());
        if (seen) result.sigma[vn.canon] = *seen;
    }
    return result;
}

namespace {

Value require_ground(const Term& t, const Substitution& sigma) {
    switch (t.kind) {
        case Term::Kind::Constant: return Value::constant(t.name.canon);
        case Term::Kind::Number: return Value::number(t.num);
        case Term::Kind::Variable: {
            auto it = sigma.find(t.name.canon);
            if (it == sigma.end())
                throw ValidationError{StepFailure{StepFailure::Kind::Evaluation,
                                                  "unbound variable " + t.name.canon +
                                                      " in an effect"}};
            return it->second;
        }
    }
    throw ValidationError{StepFailure{StepFailure::Kind::Evaluation, "bad term"}};
}

// Walks one effect tree under a fully determined substitution.
void collect_effects(const Effect& e, const Substitution& sigma, const State& pre,
                     const DomainModel& m, Evaluator& ev, EffectDelta& out) {
    switch (e.kind) {
        case Effect::Kind::Add:
        case Effect::Kind::Del: {
            GroundAtom atom;
            atom.pred = e.pred.canon;
            for (const Term& t : e.args) atom.args.push_back(require_ground(t, sigma));
            if (e.kind == Effect::Kind::Add)
                out.adds.insert(std::move(atom));
            else
                out.dels.insert(std::move(atom));
            return;
        }
        case Effect::Kind::And:
            for (const auto& c : e.children) collect_effects(*c, sigma, pre, m, ev, out);
            return;
        case Effect::Kind::Forall: {
            std::vector<std::pair<std::string, std::vector<Value>>> ranges;
            for (const auto& [vn, vt] : e.vars.flat())
                ranges.emplace_back(vn.canon, ev.extension(vt));
            std::vector<Substitution> frontier{sigma};
            for (const auto& [vn, vals] : ranges) {
                std::vector<Substitution> next;
                for (const Substitution& base : frontier)
                    for (const Value& v : vals) {
                        Substitution ext = base;
                        ext[vn] = v;
                        next.push_back(std::move(ext));
                    }
                frontier = std::move(next);
            }
            for (const Substitution& ext : frontier)
                collect_effects(*e.children[0], ext, pre, m, ev, out);
            return;
        }
        case Effect::Kind::When:
            // The condition is judged against the pre-state: simultaneous
            // effects of the same action never enable or disable each other.
            if (ev.holds(e.cond, sigma)) collect_effects(*e.children[0], sigma, pre, m, ev, out);
            return;
        case Effect::Kind::Change: {
            Value target = require_ground(e.fluent, sigma);
            if (target.is_num())
                throw ValidationError{StepFailure{StepFailure::Kind::NotAFluent, target.str()}};
            bool known = pre.fluents.count(target.name) || pre.domain_vars.count(target.name);
            if (!known) {
                auto it = pre.objects->find(target.name);
                if (it == pre.objects->end() || it->second.kind != TypeExpr::Kind::Fluent)
                    throw ValidationError{
                        StepFailure{StepFailure::Kind::NotAFluent, target.name}};
            }
            NumericValue nv = ev.eval_expr(e.expr, sigma, /*fluent_ctx=*/true);
            auto [it, inserted] = out.changes.emplace(target.name, nv);
            if (!inserted && !(it->second == nv))
                throw ValidationError{StepFailure{StepFailure::Kind::ChangeConflict,
                                                  target.name + " set to " + it->second.str() +
                                                      " and to " + nv.str()}};
            return;
        }
    }
}

}  // namespace

EffectDelta effect_delta(const ActionSchema& schema, const Substitution& sigma,
                         const State& pre, const DomainModel& m) {
    EffectDelta out;
    if (!schema.body.effect) return out;

    Evaluator ev(m, pre);
    // A :vars variable left unbound by the precondition ranges over the whole
    // extension of its type: the effect happens for every value.
    std::vector<Substitution> frontier{sigma};
    for (const auto& [vn, vt] : schema.body.vars.flat()) {
        if (sigma.count(vn.canon)) continue;
        std::vector<Value> vals = ev.extension(vt);
        std::vector<Substitution> next;
        for (const Substitution& base : frontier)
            for (const Value& v : vals) {
                Substitution ext = base;
                ext[vn.canon] = v;
                next.push_back(std::move(ext));
            }
        frontier = std::move(next);
    }
    for (const Substitution& full : frontier)
        collect_effects(*schema.body.effect, full, pre, m, ev, out);
    return out;
}

State apply_delta(const State& s, const EffectDelta& d, const DomainModel& m) {
    // Timeless literals are outside the reach of effects: adding or deleting
    // such an atom (either polarity) is an error, not a no-op.
    auto timeless_hit = [&](const GroundAtom& a) -> bool {
        for (const GroundLiteralAst& lit : m.timeless)
            if (ground_literal_atom(lit) == a) return true;
        return false;
    };
    for (const GroundAtom& a : d.dels)
        if (timeless_hit(a))
            throw ValidationError{StepFailure{StepFailure::Kind::TimelessViolation, a.str()}};
    for (const GroundAtom& a : d.adds)
        if (timeless_hit(a))
            throw ValidationError{StepFailure{StepFailure::Kind::TimelessViolation, a.str()}};

    State next = s;
    for (const GroundAtom& a : d.dels) next.atoms.erase(a);
    for (const GroundAtom& a : d.adds) next.atoms.insert(a);  // add wins over delete
    for (const auto& [name, nv] : d.changes) {
        if (next.domain_vars.count(name))
            next.domain_vars[name] = nv;
        else
            next.fluents[name] = nv;
    }
    return next;
}

ExecOutcome execute_plan(const std::vector<GroundAction>& steps, const State& s0,
                         const DomainModel& m) {
    ExecOutcome out;
    out.states.push_back(s0);
    for (size_t i = 0; i < steps.size(); i++) {
        const State& pre = out.states.back();
        try {
            Applicability app = applicable(steps[i], pre, m);
            if (!app.ok) {
                out.ok = false;
                out.failed_step = i + 1;
                out.failure = *app.failure;
                return out;
            }
            const ActionSchema* schema = m.find_action(steps[i].functor.canon);
            EffectDelta d = effect_delta(*schema, app.sigma, pre, m);
            out.states.push_back(apply_delta(pre, d, m));
            out.deltas.push_back(std::move(d));
        } catch (const ValidationError& ve) {
            out.ok = false;
            out.failed_step = i + 1;
            out.failure = ve.failure;
            return out;
        } catch (const EvalError& ee) {
            out.ok = false;
            out.failed_step = i + 1;
            out.failure = StepFailure{StepFailure::Kind::Evaluation, ee.what()};
            return out;
        }
    }
    out.ok = true;
    return out;
}

namespace {

ValidationReport fail_report(Clause clause, std::string reason, int step = 0) {
    ValidationReport r;
    r.verdict = Verdict::Fails;
    r.failed = clause;
    r.reason = std::move(reason);
    r.failed_step = step;
    return r;
}

std::string entry_note(const std::string& what, const RealizationEntry& e) {
    std::ostringstream os;
    os << what << ": " << e.occurrence;
    if (!e.binding.empty()) os << " " << e.binding;
    os << " -> " << e.interval.str();
    return os.str();
}

}  // namespace

ValidationReport solves(const SolutionAst& sol, const ProblemModel& prob,
                        const DomainModel& model, const ValidateOptions& opts) {
    if (req_has(prob.requirements, Req::OpenWorld) ||
        req_has(prob.requirements, Req::TrueNegation)) {
        ValidationReport r;
        r.verdict = Verdict::Refused;
        r.reason = req_has(prob.requirements, Req::OpenWorld)
                       ? "open-world problems are not supported"
                       : "true-negation problems are not supported";
        return r;
    }

    ValidationReport rep;
    for (const PlanStepAst& st : sol.steps) {
        std::string err;
        std::optional<GroundAction> g = ground_step(st, &err);
        if (!g) return fail_report(Clause::Feasibility, err, int(rep.steps.size()) + 1);
        rep.steps.push_back(std::move(*g));
    }

    std::vector<GroundAction> hints;
    if (!opts.ignore_hints) {
        for (const PlanStepAst& h : sol.hints) {
            std::string err;
            std::optional<GroundAction> g = ground_step(h, &err);
            if (!g) return fail_report(Clause::Expansion, err);
            const ActionSchema* schema = model.find_action(g->functor.canon);
            if (!schema)
                return fail_report(Clause::Expansion,
                                   "hint names an unknown action: " + g->functor.canon);
            if (schema->primitive())
                return fail_report(Clause::Expansion,
                                   "hint must be a nonprimitive action: " + g->functor.canon);
            hints.push_back(std::move(*g));
        }
    }

    auto sit = model.situations.find(prob.name.canon);
    if (sit == model.situations.end())
        return fail_report(Clause::Feasibility,
                           "no initial situation recorded for " + prob.name.canon);

    State s0;
    try {
        s0 = initial_state(model, sit->second);
    } catch (const EvalError& e) {
        return fail_report(Clause::Feasibility, std::string("initial state: ") + e.what());
    }

    ExecOutcome ex = execute_plan(rep.steps, s0, model);
    rep.states = ex.states;
    rep.deltas = ex.deltas;
    if (!ex.ok) {
        ValidationReport r = fail_report(
            Clause::Feasibility,
            "step " + std::to_string(ex.failed_step) + ": " + ex.failure.str(),
            ex.failed_step);
        r.steps = rep.steps;
        r.states = rep.states;
        r.deltas = rep.deltas;
        return r;
    }

    auto fails = [&](Clause c, std::string reason, int step = 0) {
        ValidationReport r = fail_report(c, std::move(reason), step);
        r.steps = rep.steps;
        r.states = rep.states;
        r.deltas = rep.deltas;
        r.warnings = rep.warnings;
        return r;
    };

    const State& fin = rep.states.back();
    Evaluator evf(model, fin);
    for (const GdPtr& g : prob.goals) {
        try {
            if (!evf.holds(g, {}))
                return fails(Clause::Goal, "goal not satisfied in the final situation");
        } catch (const EvalError& e) {
            return fails(Clause::Goal, std::string("goal evaluation: ") + e.what());
        }
    }

    AnchoredSequence seq;
    seq.model = &model;
    seq.steps = rep.steps;
    seq.states = rep.states;

    std::set<int> covered;
    auto run_spec = [&](const SpecPtr& sp, const std::string& what,
                        std::string* why) -> bool {
        SatOutcome so = satisfies(sp, seq, opts.budget);
        for (const std::string& w : so.warnings) rep.warnings.push_back(w);
        switch (so.result) {
            case SatResult::Satisfied:
                covered.insert(so.covered.begin(), so.covered.end());
                for (const RealizationEntry& e : so.entries)
                    rep.realization_notes.push_back(entry_note(what, e));
                return true;
            case SatResult::Unsatisfiable:
                *why = what + " has no realization in this plan";
                return false;
            case SatResult::BudgetExceeded:
                *why = "realization search for " + what +
                       " exceeded its budget (result unknown)";
                return false;
            case SatResult::Error:
                *why = what + ": " + so.error;
                return false;
        }
        return false;
    };

    for (const SpecPtr& e : prob.expansions) {
        std::string why;
        if (!run_spec(e, "problem expansion", &why)) return fails(Clause::Expansion, why);
    }
    for (const GroundAction& h : hints) {
        auto sp = std::make_shared<Spec>();
        sp->kind = Spec::Kind::ActionTerm;
        sp->functor = h.functor;
        for (const Value& v : h.args) {
            Term t;
            if (v.is_num()) {
                t.kind = Term::Kind::Number;
                t.num = v.num;
            } else {
                t.kind = Term::Kind::Constant;
                t.name = Name::of(v.name);
            }
            sp->args.push_back(std::move(t));
        }
        std::string why;
        if (!run_spec(sp, "hint " + h.str(), &why)) return fails(Clause::Expansion, why);
    }

    for (size_t i = 0; i < rep.steps.size(); i++) {
        const ActionSchema* schema = model.find_action(rep.steps[i].functor.canon);
        if (schema && schema->body.only_in_expansions.value_or(false) &&
            !covered.count(int(i) + 1))
            return fails(Clause::OnlyInExpansions,
                         "step " + std::to_string(i + 1) + " (" + rep.steps[i].str() +
                             ") may only occur inside an expansion, and no checked "
                             "expansion accounts for it",
                         int(i) + 1);
    }

    for (const SafetySchema& sc : model.safety) {
        try {
            if (!evf.holds(sc.gd, {}))
                return fails(Clause::Safety,
                             "safety constraint violated in the final situation");
        } catch (const EvalError& e) {
            return fails(Clause::Safety, std::string("safety evaluation: ") + e.what());
        }
    }
    if (!model.safety.empty()) {
        for (size_t si = 0; si + 1 < rep.states.size(); si++) {
            Evaluator evi(model, rep.states[si]);
            for (const SafetySchema& sc : model.safety) {
                bool ok = true;
                try {
                    ok = evi.holds(sc.gd, {});
                } catch (const EvalError&) {
                    ok = true;  // judged only at the end; mid-plan trouble is advisory
                }
                if (!ok)
                    rep.warnings.push_back("safety constraint violated after step " +
                                           std::to_string(si) +
                                           " (restored by the end of the plan)");
            }
        }
    }

    if (prob.length && prob.length->serial &&
        int64_t(rep.steps.size()) > *prob.length->serial)
        rep.warnings.push_back("plan has " + std::to_string(rep.steps.size()) +
                               " steps; the problem suggests a serial length of " +
                               std::to_string(*prob.length->serial));

    rep.verdict = Verdict::Solves;
    return rep;
}

}  // namespace pddl
