#include "pddl/model.hpp"

#include <algorithm>
#include <functional>

namespace pddl {

namespace {

bool is_builtin_type(const std::string& s) { return s == "object" || s == "number"; }

const char* kReservedHeads[] = {
    "and", "or", "not", "imply", "exists", "forall", "when", "change",
    "eval", "test", "bounded-int", "equation", "fluent-eval", "fluent-test",
    "current-value", "sum", "achieve", "in-context", "choice", "forsome",
    "series", "parallel", "tag", "foreach", "constrained", "define",
};

bool reserved_head(const std::string& s) {
    for (const char* r : kReservedHeads)
        if (s == r) return true;
    return false;
}

}  // namespace

const char* name_kind_str(NameKind k) {
    switch (k) {
        case NameKind::Type: return "type";
        case NameKind::Constant: return "constant";
        case NameKind::DomainVariable: return "domain variable";
        case NameKind::Predicate: return "predicate";
        case NameKind::Action: return "action";
        case NameKind::Situation: return "situation";
    }
    return "?";
}

bool builtin_predicate(const std::string& canon, int* min_args, int* max_args) {
    struct Row {
        const char* name;
        int lo, hi;
    };
    static const Row rows[] = {
        {"eval", 2, 2},       {"test", 1, 1},        {"bounded-int", 3, 3},
        {"equation", 2, 2},   {"fluent-eval", 2, 2}, {"fluent-test", 1, 1},
        {"current-value", 2, 2},
    };
    for (const Row& r : rows) {
        if (canon == r.name) {
            if (min_args) *min_args = r.lo;
            if (max_args) *max_args = r.hi;
            return true;
        }
    }
    return false;
}

bool TypeHierarchy::atom_subtype(const std::string& a, const std::string& b) const {
    std::string cur = a;
    for (int guard = 0; guard < 1000; guard++) {
        if (cur == b) return true;
        auto it = supertype.find(cur);
        if (it == supertype.end() || it->second.empty()) return false;
        cur = it->second;
    }
    return false;  // cycle; reported elsewhere
}

bool subtype_of(const TypeExpr& a, const TypeExpr& b, const TypeHierarchy& h) {
    using K = TypeExpr::Kind;
    if (a.kind == K::Either) {
        return std::all_of(a.members.begin(), a.members.end(),
                           [&](const TypeExpr& m) { return subtype_of(m, b, h); });
    }
    if (b.kind == K::Either) {
        return std::any_of(b.members.begin(), b.members.end(),
                           [&](const TypeExpr& m) { return subtype_of(a, m, h); });
    }
    if (a.kind == K::Fluent || b.kind == K::Fluent) {
        if (a.kind != b.kind) return false;
        return subtype_of(a.members[0], b.members[0], h);
    }
    return h.atom_subtype(a.name.canon, b.name.canon);
}

// --- shared checking machinery ----------------------------------------------

namespace {

// Polarity-aware walk over every predicate occurrence of a GD (used by
// stratification and by the negative-implies restriction).
void walk_gd_preds(const GdPtr& g, bool positive,
                   const std::function<void(const Gd&, bool)>& fn) {
    if (!g) return;
    switch (g->kind) {
        case Gd::Kind::Atom:
            fn(*g, positive);
            break;
        case Gd::Kind::Not:
            if (!g->children.empty()) walk_gd_preds(g->children[0], !positive, fn);
            break;
        case Gd::Kind::Imply:
            if (g->children.size() == 2) {
                walk_gd_preds(g->children[0], !positive, fn);
                walk_gd_preds(g->children[1], positive, fn);
            }
            break;
        case Gd::Kind::Builtin:
            for (const auto& e : g->eargs) {
                std::function<void(const ExprPtr&)> walk_expr = [&](const ExprPtr& x) {
                    if (!x) return;
                    if (x->kind == Expr::Kind::Sum) walk_gd_preds(x->sum_cond, positive, fn);
                    for (const auto& a : x->args) walk_expr(a);
                };
                walk_expr(e);
            }
            break;
        default:
            for (const auto& c : g->children) walk_gd_preds(c, positive, fn);
    }
}

void walk_effect_atoms(const EffectPtr& e,
                       const std::function<void(const Effect&)>& fn) {
    if (!e) return;
    if (e->kind == Effect::Kind::Add || e->kind == Effect::Kind::Del) fn(*e);
    for (const auto& c : e->children) walk_effect_atoms(c, fn);
}

using Env = std::vector<std::map<std::string, TypeExpr>>;

const TypeExpr* env_lookup(const Env& env, const std::string& var) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        auto f = it->find(var);
        if (f != it->end()) return &f->second;
    }
    return nullptr;
}

struct SigChecker {
    const DomainModel& m;
    std::vector<Diagnostic>& diags;
    // Additional constants visible in this context (problem objects).
    const std::map<std::string, TypeExpr>* extra_constants = nullptr;
    bool typing = false;

    SigChecker(const DomainModel& model, std::vector<Diagnostic>& d)
        : m(model), diags(d) {
        typing = req_has(m.requirements, Req::Typing);
    }

    void diag(DiagId id, SExprPtr node, const std::string& detail = "") {
        diags.push_back(make_diag(id, std::move(node), detail));
    }

    void push_vars(Env& env, const TypedList& tl, bool warn_shadow = true) {
        env.emplace_back();
        for (const auto& [n, t] : tl.flat()) {
            if (warn_shadow && env.size() > 1) {
                Env outer(env.begin(), env.end() - 1);
                if (env_lookup(outer, n.canon))
                    diag(DiagId::ShadowedVariable, n.src ? n.src : tl.src);
            }
            env.back()[n.canon] = t;
            check_type_known(t, n.src ? n.src : tl.src);
        }
    }

    void check_type_known(const TypeExpr& t, const SExprPtr& at) {
        if (t.kind == TypeExpr::Kind::Atom) {
            if (!m.types.declared(t.name.canon))
                diag(DiagId::UndefinedType, t.name.src ? t.name.src : at, t.name.canon);
        } else {
            for (const auto& mem : t.members) check_type_known(mem, at);
        }
    }

    std::optional<TypeExpr> constant_type(const std::string& canon) const {
        if (auto it = m.constants.find(canon); it != m.constants.end())
            return it->second;
        if (extra_constants) {
            if (auto it = extra_constants->find(canon); it != extra_constants->end())
                return it->second;
        }
        return std::nullopt;
    }

    // Type compatibility for one predicate/action argument.
    void check_arg(const Term& t, const TypeExpr& want, const Env& env,
                   const SExprPtr& at) {
        if (!typing) return;
        if (t.kind == Term::Kind::Number) {
            // Numbers fit number-family parameters only.
            bool ok = want.kind == TypeExpr::Kind::Atom &&
                      (m.types.atom_subtype(want.name.canon, "number") ||
                       m.types.atom_subtype("number", want.name.canon));
            if (want.kind == TypeExpr::Kind::Either)
                ok = std::any_of(want.members.begin(), want.members.end(),
                                 [&](const TypeExpr& w) {
                                     return w.kind == TypeExpr::Kind::Atom &&
                                            (m.types.atom_subtype(w.name.canon, "number") ||
                                             m.types.atom_subtype("number", w.name.canon));
                                 });
            if (!ok) diag(DiagId::TypeMismatch, at, t.num.str());
            return;
        }
        TypeExpr have = TypeExpr::object();
        if (t.kind == Term::Kind::Variable) {
            const TypeExpr* bound = env_lookup(env, t.name.canon);
            if (!bound) return;  // unbound reported separately
            have = *bound;
        } else if (auto ct = constant_type(t.name.canon)) {
            have = *ct;
        } else {
            return;  // undeclared constant: tolerated, type unknown
        }
        if (subtype_of(have, want, m.types)) return;
        // Partially compatible Either argument: warn instead of error.
        if (have.kind == TypeExpr::Kind::Either &&
            std::any_of(have.members.begin(), have.members.end(),
                        [&](const TypeExpr& mem) { return subtype_of(mem, want, m.types); })) {
            diag(DiagId::PartialTypeCompatibility, t.name.src ? t.name.src : at);
            return;
        }
        diag(DiagId::TypeMismatch, t.name.src ? t.name.src : at,
             "(" + have.str() + " where " + want.str() + " expected)");
    }

    void check_term_bound(const Term& t, const Env& env, const SExprPtr& at) {
        if (t.kind == Term::Kind::Variable && !env_lookup(env, t.name.canon))
            diag(DiagId::UnboundVariable, t.name.src ? t.name.src : at, t.name.canon);
    }

    void check_atom(const Gd& g, const Env& env) {
        const std::string& p = g.pred.canon;
        for (const Term& t : g.args) check_term_bound(t, env, g.src);
        if (p == "=") {
            if (g.args.size() != 2) diag(DiagId::WrongArity, g.src);
            return;
        }
        auto it = m.predicates.find(p);
        if (it != m.predicates.end()) {
            auto params = it->second.params.flat();
            if (params.size() != g.args.size()) {
                diag(DiagId::WrongArity, g.src);
                return;
            }
            for (size_t i = 0; i < params.size(); i++)
                check_arg(g.args[i], params[i].second, env, g.src);
            return;
        }
        if (m.is_type_name(p)) {
            // A type name is a timeless unary predicate; any argument kind.
            if (g.args.size() != 1) diag(DiagId::WrongArity, g.src);
            return;
        }
        diag(DiagId::UnknownPredicate, g.src, p);
    }

    void check_expr(const ExprPtr& x, const Env& env) {
        if (!x) return;
        switch (x->kind) {
            case Expr::Kind::Num:
                break;
            case Expr::Kind::Var:
                if (!env_lookup(env, x->name.canon))
                    diag(DiagId::UnboundVariable, x->src, x->name.canon);
                break;
            case Expr::Kind::Ref:
                if (!m.domain_vars.count(x->name.canon) &&
                    !constant_type(x->name.canon))
                    diag(DiagId::UnknownName, x->src, x->name.canon);
                break;
            case Expr::Kind::Apply:
                for (const auto& a : x->args) check_expr(a, env);
                break;
            case Expr::Kind::Sum: {
                Env env2 = env;
                push_vars(env2, x->sum_vars);
                check_gd(x->sum_cond, env2);
                check_expr(x->sum_body, env2);
                break;
            }
        }
    }

    void check_gd(const GdPtr& g, Env& env) {
        if (!g) return;
        switch (g->kind) {
            case Gd::Kind::Atom:
                check_atom(*g, env);
                break;
            case Gd::Kind::Builtin: {
                int lo = 0, hi = 0;
                builtin_predicate(g->pred.canon, &lo, &hi);
                int n = static_cast<int>(g->eargs.size());
                if (n < lo || n > hi) diag(DiagId::WrongArity, g->src);
                for (const auto& a : g->eargs) check_expr(a, env);
                break;
            }
            case Gd::Kind::Exists:
            case Gd::Kind::Forall: {
                push_vars(env, g->vars);
                for (const auto& c : g->children) check_gd(c, env);
                env.pop_back();
                break;
            }
            default:
                for (const auto& c : g->children) check_gd(c, env);
        }
    }

    void check_effect(const EffectPtr& e, Env& env) {
        if (!e) return;
        switch (e->kind) {
            case Effect::Kind::Add:
            case Effect::Kind::Del: {
                Gd atom;
                atom.kind = Gd::Kind::Atom;
                atom.pred = e->pred;
                atom.args = e->args;
                atom.src = e->src;
                check_atom(atom, env);
                break;
            }
            case Effect::Kind::And:
                for (const auto& c : e->children) check_effect(c, env);
                break;
            case Effect::Kind::Forall:
                push_vars(env, e->vars);
                for (const auto& c : e->children) check_effect(c, env);
                env.pop_back();
                break;
            case Effect::Kind::When:
                check_gd(e->cond, env);
                for (const auto& c : e->children) check_effect(c, env);
                break;
            case Effect::Kind::Change:
                check_term_bound(e->fluent, env, e->src);
                if (typing && e->fluent.kind != Term::Kind::Number) {
                    TypeExpr have = TypeExpr::object();
                    bool known = false;
                    if (e->fluent.is_var()) {
                        if (const TypeExpr* b = env_lookup(env, e->fluent.name.canon)) {
                            have = *b;
                            known = true;
                        }
                    } else if (auto ct = constant_type(e->fluent.name.canon)) {
                        have = *ct;
                        known = true;
                    }
                    if (known && have.kind != TypeExpr::Kind::Fluent)
                        diag(DiagId::TypeMismatch, e->src, "(fluent expected)");
                }
                check_expr(e->expr, env);
                break;
        }
    }

    void check_spec(const SpecPtr& s, Env& env) {
        if (!s) return;
        switch (s->kind) {
            case Spec::Kind::ActionTerm: {
                for (const Term& t : s->args) check_term_bound(t, env, s->src);
                if (s->noop()) {
                    if (!s->args.empty()) diag(DiagId::NoArgumentsAllowed, s->src);
                    break;
                }
                const ActionSchema* a = m.find_action(s->functor.canon);
                if (!a) {
                    diag(DiagId::UndefinedAction, s->src, s->functor.canon);
                    break;
                }
                auto params = a->params.flat();
                if (params.size() != s->args.size()) {
                    diag(DiagId::WrongArity, s->src);
                    break;
                }
                for (size_t i = 0; i < params.size(); i++)
                    check_arg(s->args[i], params[i].second, env, s->src);
                break;
            }
            case Spec::Kind::LabelRef:
                break;
            case Spec::Kind::InContext: {
                // :vars are local to the whole construct, child spec included.
                push_vars(env, s->conds.vars);
                for (const auto& c : s->children) check_spec(c, env);
                check_gd(s->conds.precondition, env);
                check_gd(s->conds.maintain, env);
                check_effect(s->conds.effect, env);
                env.pop_back();
                break;
            }
            case Spec::Kind::Forsome:
            case Spec::Kind::Foreach: {
                push_vars(env, s->vars);
                check_gd(s->cond, env);
                for (const auto& c : s->children) check_spec(c, env);
                env.pop_back();
                break;
            }
            case Spec::Kind::Constrained:
                for (const auto& c : s->children) check_spec(c, env);
                for (const auto& c : s->constraints) check_spec(c, env);
                break;
            default:
                for (const auto& c : s->children) check_spec(c, env);
        }
    }

    void check_action(const ActionSchema& a) {
        Env env;
        push_vars(env, a.params, /*warn_shadow=*/false);
        push_vars(env, a.body.vars);
        check_gd(a.body.precondition, env);
        check_gd(a.body.maintain, env);
        check_effect(a.body.effect, env);
        check_spec(a.body.expansion, env);
        for (const MethodSchema& mth : a.methods) check_method(mth);
    }

    void check_method(const MethodSchema& mth) {
        Env env;
        push_vars(env, mth.params, /*warn_shadow=*/false);
        push_vars(env, mth.body.vars);
        check_gd(mth.body.precondition, env);
        check_gd(mth.body.maintain, env);
        check_spec(mth.body.expansion, env);
    }

    void check_axiom(const AxiomSchema& ax) {
        Env env;
        push_vars(env, ax.ast.vars, /*warn_shadow=*/false);
        // Free variables of context and implies must be declared in :vars.
        check_gd_axiom_vars(ax.ast.context, env, ax.ast.src);
        check_gd(ax.ast.context, env);
        Gd implies;
        implies.kind = Gd::Kind::Atom;
        implies.pred = ax.ast.implies_pred;
        implies.args = ax.ast.implies_args;
        implies.src = ax.ast.src;
        for (const Term& t : implies.args)
            if (t.is_var() && !env_lookup(env, t.name.canon))
                diag(DiagId::AxiomVariableUndeclared, t.name.src ? t.name.src : ax.ast.src,
                     t.name.canon);
        // Arity/type of the implied atom.
        Env env2 = env;
        check_atom(implies, env2);
    }

    // Flags free variables of an axiom context that are not in :vars.  Bound
    // occurrences inside quantifiers are fine.
    void check_gd_axiom_vars(const GdPtr& g, Env& env, const SExprPtr& at) {
        if (!g) return;
        switch (g->kind) {
            case Gd::Kind::Atom:
                for (const Term& t : g->args)
                    if (t.is_var() && !env_lookup(env, t.name.canon))
                        diag(DiagId::AxiomVariableUndeclared,
                             t.name.src ? t.name.src : at, t.name.canon);
                break;
            case Gd::Kind::Exists:
            case Gd::Kind::Forall: {
                env.emplace_back();
                for (const auto& [n, t] : g->vars.flat()) env.back()[n.canon] = t;
                for (const auto& c : g->children) check_gd_axiom_vars(c, env, at);
                env.pop_back();
                break;
            }
            case Gd::Kind::Builtin:
                for (const auto& e : g->eargs) {
                    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
                        if (!x) return;
                        if (x->kind == Expr::Kind::Var && !env_lookup(env, x->name.canon))
                            diag(DiagId::AxiomVariableUndeclared, x->src, x->name.canon);
                        for (const auto& a : x->args) walk(a);
                        if (x->kind == Expr::Kind::Sum) {
                            env.emplace_back();
                            for (const auto& [n, t] : x->sum_vars.flat())
                                env.back()[n.canon] = t;
                            check_gd_axiom_vars(x->sum_cond, env, at);
                            walk(x->sum_body);
                            env.pop_back();
                        }
                    };
                    walk(e);
                }
                break;
            default:
                for (const auto& c : g->children) check_gd_axiom_vars(c, env, at);
        }
    }

    void check_ground_literal(const GroundLiteralAst& lit) {
        Gd atom;
        atom.kind = Gd::Kind::Atom;
        atom.pred = lit.pred;
        atom.args = lit.args;
        atom.src = lit.src;
        Env env;
        check_atom(atom, env);
    }
};

}  // namespace

// --- stratification -----------------------------------------------------------

Stratification stratify(const std::vector<AxiomSchema>& axioms,
                        const std::set<std::string>& derived,
                        std::vector<Diagnostic>* diags) {
    Stratification out;
    for (const std::string& p : derived) out.stratum[p] = 1;
    if (derived.empty()) return out;
    int n = static_cast<int>(derived.size());
    bool changed = true;
    int rounds = 0;
    while (changed && out.stratifiable) {
        changed = false;
        rounds++;
        for (const AxiomSchema& ax : axioms) {
            const std::string& q = ax.ast.implies_pred.canon;
            auto qit = out.stratum.find(q);
            if (qit == out.stratum.end()) continue;
            walk_gd_preds(ax.ast.context, true, [&](const Gd& g, bool positive) {
                auto pit = out.stratum.find(g.pred.canon);
                if (pit == out.stratum.end()) return;  // primitive: stratum 0
                int need = positive ? pit->second : pit->second + 1;
                if (qit->second < need) {
                    qit->second = need;
                    changed = true;
                }
            });
        }
        if (rounds > n + 1) {
            // A stratum exceeded the predicate count: negation cycle.
            out.stratifiable = false;
            if (diags) {
                SExprPtr node = axioms.empty() ? nullptr : axioms.front().ast.src;
                std::string who;
                for (const auto& [p, s] : out.stratum)
                    if (s > n) who += (who.empty() ? "" : " ") + p;
                diags->push_back(make_diag(DiagId::NotStratifiable, node, who));
            }
        }
    }
    for (const auto& [p, s] : out.stratum) out.max_stratum = std::max(out.max_stratum, s);
    return out;
}

void check_signatures(const DomainModel& m, std::vector<Diagnostic>& diags) {
    SigChecker chk(m, diags);
    for (const auto& [_, a] : m.actions) chk.check_action(a);
    for (const auto& ax : m.axioms) chk.check_axiom(ax);
    for (const auto& lit : m.timeless) chk.check_ground_literal(lit);
    for (const auto& s : m.safety) {
        Env env;
        chk.check_gd(s.gd, env);
    }
}

void check_action_axiom_interaction(const DomainModel& m,
                                    std::vector<Diagnostic>& diags) {
    for (const auto& [_, a] : m.actions) {
        walk_effect_atoms(a.body.effect, [&](const Effect& e) {
            if (m.derived.count(e.pred.canon))
                diags.push_back(
                    make_diag(DiagId::EffectOnDerivedPredicate, e.src, e.pred.canon));
        });
    }
}

// --- domain building -----------------------------------------------------------

namespace {

struct ModelBuilder {
    DomainModel& m;
    std::vector<Diagnostic>& diags;

    void diag(DiagId id, SExprPtr node, const std::string& detail = "") {
        diags.push_back(make_diag(id, std::move(node), detail));
    }

    bool claim_name(const std::string& canon, NameKind kind, const SExprPtr& at) {
        if (reserved_head(canon)) {
            diag(DiagId::ReservedName, at, canon);
            return false;
        }
        auto [it, fresh] = m.name_kinds.emplace(canon, kind);
        if (!fresh && it->second != kind) {
            diag(DiagId::NameKindCollision, at,
                 "(" + canon + " already names a " + name_kind_str(it->second) + ")");
            return false;
        }
        return true;
    }

    // Types are registered in two passes so later groups can serve as
    // supertypes of earlier ones:  (:types truck - vehicle vehicle - physob).
    void declare_types(const TypedList& tl, std::set<std::string>& fresh) {
        for (const TypedGroup& g : tl.groups)
            for (const Name& n : g.items) {
                if (!claim_name(n.canon, NameKind::Type, n.src ? n.src : tl.src))
                    continue;
                if (!m.types.declared(n.canon)) {
                    m.types.supertype[n.canon] = "object";
                    fresh.insert(n.canon);
                }
            }
    }

    void assign_supertypes(const TypedList& tl, std::set<std::string>& fresh) {
        std::set<std::string> assigned;
        for (const TypedGroup& g : tl.groups) {
            std::string sup = "object";
            if (g.type.kind != TypeExpr::Kind::Atom) {
                diag(DiagId::CompoundSupertype, tl.src);
            } else {
                sup = g.type.name.canon;
                if (!m.types.declared(sup)) {
                    diag(DiagId::AssumedType,
                         g.type.name.src ? g.type.name.src : tl.src, sup);
                    claim_name(sup, NameKind::Type, tl.src);
                    m.types.supertype[sup] = "object";
                }
            }
            for (const Name& n : g.items) {
                if (m.name_kinds.count(n.canon) &&
                    m.name_kinds.at(n.canon) != NameKind::Type)
                    continue;  // collision already reported
                if (is_builtin_type(n.canon)) continue;  // roots stay roots
                bool settable = fresh.count(n.canon) && !assigned.count(n.canon);
                if (settable) {
                    m.types.supertype[n.canon] = sup;
                    assigned.insert(n.canon);
                } else if (m.types.supertype[n.canon] != sup) {
                    diag(DiagId::ConflictingType, n.src ? n.src : tl.src, n.canon);
                }
            }
        }
    }

    void add_constant(const Name& n, const TypeExpr& t, const SExprPtr& at) {
        if (!claim_name(n.canon, NameKind::Constant, n.src ? n.src : at)) return;
        auto it = m.constants.find(n.canon);
        if (it != m.constants.end()) {
            if (!(it->second == t))
                diag(DiagId::ConflictingType, n.src ? n.src : at, n.canon);
            return;
        }
        m.constants[n.canon] = t;
        m.constant_names[n.canon] = n;
    }

    void add_domain_var(const DomainVarDecl& d) {
        if (!claim_name(d.name.canon, NameKind::DomainVariable, d.src)) return;
        auto it = m.domain_vars.find(d.name.canon);
        if (it != m.domain_vars.end()) {
            // Redeclaration shadows the inherited initial value.
            it->second.type = d.type;
            if (d.initial) it->second.initial = d.initial;
            return;
        }
        m.domain_vars[d.name.canon] = DomainVarInfo{d.name, d.type, d.initial};
    }

    void add_predicate(const PredicateDecl& decl, const Name& origin) {
        if (builtin_predicate(decl.name.canon) || decl.name.canon == "sum") {
            diag(DiagId::ReservedName, decl.src, decl.name.canon);
            return;
        }
        if (!claim_name(decl.name.canon, NameKind::Predicate, decl.src)) return;
        auto it = m.predicates.find(decl.name.canon);
        if (it != m.predicates.end()) {
            if (!ast_equal(it->second.params, decl.params))
                diag(DiagId::ConflictingPredicate, decl.src, decl.name.canon);
            return;
        }
        PredicateSignature sig;
        sig.name = decl.name;
        sig.params = decl.params;
        sig.origin = origin;
        sig.src = decl.src;
        m.predicates[decl.name.canon] = std::move(sig);
    }

    void add_action(const ActionDef& def, const Name& origin,
                    const std::string& addendum) {
        if (def.functor.empty()) return;
        if (!claim_name(def.functor.canon, NameKind::Action,
                        def.functor.src ? def.functor.src : def.src))
            return;
        if (m.actions.count(def.functor.canon)) {
            diag(DiagId::DuplicateAction, def.src, def.functor.canon);
            return;
        }
        ActionSchema a;
        a.functor = def.functor;
        a.params = def.params;
        a.body = def.body;
        a.origin = origin;
        a.origin_addendum = addendum;
        a.src = def.src;
        m.actions[def.functor.canon] = std::move(a);
    }

    void add_axiom(const AxiomDefAst& ast, const Name& origin,
                   const std::string& addendum) {
        AxiomSchema ax;
        ax.ast = ast;
        ax.origin = origin;
        ax.origin_addendum = addendum;
        if (!ast.implies_pred.empty()) {
            m.derived.insert(ast.implies_pred.canon);
            if (!ast.implies_positive) m.derived_neg.insert(ast.implies_pred.canon);
        }
        m.axioms.push_back(std::move(ax));
    }

    void add_method(const MethodDef& def, const std::string& addendum) {
        auto it = m.actions.find(def.action.canon);
        if (it == m.actions.end()) {
            diag(DiagId::MethodUndefinedAction, def.src, def.action.canon);
            return;
        }
        ActionSchema& a = it->second;
        if (a.body.effect || (!a.body.expansion && !a.body.methods_placeholder))
            diag(DiagId::MethodForPrimitive, def.src, def.action.canon);
        if (def.method_name) {
            for (const MethodSchema& prev : a.methods)
                if (!prev.method_name.empty() && prev.method_name == *def.method_name)
                    diag(DiagId::DuplicateMethod, def.src, def.method_name->canon);
        }
        if (def.params.flat().size() != a.params.flat().size())
            diags.push_back(make_diag(DiagId::WrongArity, def.src,
                                      "(method parameters do not match the action)"));
        MethodSchema mth;
        mth.action = def.action;
        if (def.method_name) mth.method_name = *def.method_name;
        mth.params = def.params;
        mth.body = def.body;
        mth.origin_addendum = addendum;
        mth.src = def.src;
        a.methods.push_back(std::move(mth));
    }

    void check_demands(const std::vector<ReqDemand>& demands) {
        for (const ReqDemand& d : demands) {
            if (m.requirements & d.any_of) continue;
            if (d.warn_only)
                diags.push_back(make_diag(DiagId::VarsWithoutGate, d.node));
            else
                diags.push_back(make_diag(DiagId::RequiresFlag, d.node, d.flag_text));
        }
    }

    void finish_types() {
        // Detect supertype cycles.
        for (const auto& [t, _] : m.types.supertype) {
            std::set<std::string> seen;
            std::string cur = t;
            while (!cur.empty()) {
                if (!seen.insert(cur).second) {
                    diag(DiagId::CyclicType, nullptr, t);
                    m.types.supertype[t] = "object";
                    break;
                }
                auto it = m.types.supertype.find(cur);
                if (it == m.types.supertype.end()) break;
                cur = it->second;
            }
        }
    }
};

void merge_ancestor(DomainModel& m, const DomainModel& anc,
                    std::vector<Diagnostic>& diags, const SExprPtr& at) {
    ModelBuilder b{m, diags};
    m.requirements |= anc.requirements;
    for (const auto& [t, sup] : anc.types.supertype) {
        if (m.types.declared(t)) {
            if (m.types.supertype[t] != sup && !is_builtin_type(t))
                diags.push_back(make_diag(DiagId::ConflictingType, at, t));
        } else {
            m.types.supertype[t] = sup;
            m.name_kinds.emplace(t, NameKind::Type);
        }
    }
    for (const auto& [c, t] : anc.constants) {
        Name n = anc.constant_names.at(c);
        b.add_constant(n, t, at);
    }
    for (const auto& [_, dv] : anc.domain_vars) {
        if (!m.domain_vars.count(dv.name.canon)) {
            m.domain_vars[dv.name.canon] = dv;
            m.name_kinds.emplace(dv.name.canon, NameKind::DomainVariable);
        }
    }
    for (const auto& [p, sig] : anc.predicates) {
        auto it = m.predicates.find(p);
        if (it != m.predicates.end()) {
            if (!ast_equal(it->second.params, sig.params))
                diags.push_back(make_diag(DiagId::ConflictingPredicate, at, p));
        } else {
            m.predicates[p] = sig;
            m.name_kinds.emplace(p, NameKind::Predicate);
        }
    }
    for (const auto& lit : anc.timeless) m.timeless.push_back(lit);
    for (const auto& s : anc.safety) m.safety.push_back(s);
    for (const auto& [f, a] : anc.actions) {
        if (m.actions.count(f)) {
            diags.push_back(make_diag(DiagId::DuplicateAction, at, f));
        } else {
            m.actions[f] = a;
            m.name_kinds.emplace(f, NameKind::Action);
        }
    }
    for (const auto& ax : anc.axioms) {
        m.axioms.push_back(ax);
        m.derived.insert(ax.ast.implies_pred.canon);
        if (!ax.ast.implies_positive) m.derived_neg.insert(ax.ast.implies_pred.canon);
    }
    for (const auto& [s, data] : anc.situations) {
        m.situations.emplace(s, data);
        m.name_kinds.emplace(s, NameKind::Situation);
    }
}

}  // namespace

std::shared_ptr<const DomainModel> build_domain(const DomainDef& def, Registry& reg,
                                                std::vector<Diagnostic>& diags) {
    auto model = std::make_shared<DomainModel>();
    DomainModel& m = *model;
    m.name = def.name;
    m.extends = def.extends;
    ModelBuilder b{m, diags};

    for (const Name& anc : def.extends) {
        auto base = reg.find_domain(anc.canon);
        if (!base) {
            diags.push_back(
                make_diag(DiagId::UndefinedAncestor, anc.src ? anc.src : def.src, anc.canon));
            continue;
        }
        merge_ancestor(m, *base, diags, anc.src ? anc.src : def.src);
    }

    ReqSet declared = 0;
    for (const Name& f : def.requirements)
        if (auto r = req_from_name(f.canon)) declared |= req_bit(*r);
    if (declared == 0) declared = req_bit(Req::Strips);  // default when absent
    m.requirements = close_requirements(m.requirements | declared);

    {
        std::set<std::string> fresh;
        b.declare_types(def.types, fresh);
        b.assign_supertypes(def.types, fresh);
        b.finish_types();
    }

    for (const auto& [n, t] : def.constants.flat())
        b.add_constant(n, t, def.constants.src);
    for (const DomainVarDecl& dv : def.domain_vars) b.add_domain_var(dv);
    for (const PredicateDecl& p : def.predicates) b.add_predicate(p, def.name);
    for (const auto& lit : def.timeless) m.timeless.push_back(lit);
    for (const auto& g : def.safety) m.safety.push_back(SafetySchema{g, ""});
    for (const ActionDef& a : def.actions) b.add_action(a, def.name, "");
    for (const AxiomDefAst& ax : def.axioms) b.add_axiom(ax, def.name, "");
    for (const MethodDef& mth : def.methods) b.add_method(mth, "");

    b.check_demands(def.demands);

    // Signature checks for the domain's own content only (inherited content
    // was checked when the ancestor was built), resolved against the full
    // merged model so references to inherited names work.
    {
        SigChecker chk(m, diags);
        for (const auto& [n, t] : def.constants.flat())
            chk.check_type_known(t, n.src ? n.src : def.constants.src);
        for (const DomainVarDecl& dv : def.domain_vars)
            chk.check_type_known(dv.type, dv.src);
        for (const PredicateDecl& p : def.predicates)
            for (const auto& [n, t] : p.params.flat())
                chk.check_type_known(t, n.src ? n.src : p.src);
        std::set<std::string> own_actions;
        for (const ActionDef& a : def.actions) {
            auto it = m.actions.find(a.functor.canon);
            if (it != m.actions.end() && it->second.src == a.src) {
                chk.check_action(it->second);
                own_actions.insert(it->first);
            }
        }
        for (const MethodDef& md : def.methods) {
            auto it = m.actions.find(md.action.canon);
            if (it == m.actions.end()) continue;
            if (own_actions.count(it->first)) continue;  // covered above
            for (const MethodSchema& mth : it->second.methods)
                if (mth.src == md.src) chk.check_method(mth);
        }
        for (const AxiomSchema& ax : m.axioms)
            if (ax.origin == def.name && ax.origin_addendum.empty())
                chk.check_axiom(ax);
        for (const auto& lit : def.timeless) chk.check_ground_literal(lit);
        for (const auto& g : def.safety) {
            Env env;
            chk.check_gd(g, env);
        }
        // Effects touching derived predicates: own actions against all axioms,
        // inherited actions against axioms introduced here.
        std::set<std::string> new_derived;
        for (const AxiomDefAst& ax : def.axioms) new_derived.insert(ax.implies_pred.canon);
        for (const auto& [f, a] : m.actions) {
            bool own = own_actions.count(f) != 0;
            walk_effect_atoms(a.body.effect, [&](const Effect& e) {
                if (own ? m.derived.count(e.pred.canon) != 0
                        : new_derived.count(e.pred.canon) != 0)
                    diags.push_back(make_diag(DiagId::EffectOnDerivedPredicate, e.src,
                                              e.pred.canon));
            });
        }
    }

    m.strata = stratify(m.axioms, m.derived, &diags);
    for (const std::string& d : m.derived)
        if (auto it = m.predicates.find(d); it != m.predicates.end())
            it->second.derived = true;
    for (const auto& lit : m.timeless)
        if (auto it = m.predicates.find(lit.pred.canon); it != m.predicates.end())
            it->second.timeless = true;
    reg.domains[m.name.canon] = model;  // re-registration replaces
    return model;
}

std::map<std::string, TypeExpr> situation_objects(const DomainModel& m,
                                                  const SituationData& data) {
    std::map<std::string, TypeExpr> objs;
    for (const auto& [n, t] : data.objects) objs[n.canon] = t;
    for (const auto& lit : data.init) {
        const std::string& pr = lit.pred.canon;
        if (pr == "current-value" || builtin_predicate(pr)) continue;
        std::vector<TypeExpr> want;
        if (auto it = m.predicates.find(pr); it != m.predicates.end()) {
            for (auto& [_, t] : it->second.params.flat()) want.push_back(t);
        } else if (m.is_type_name(pr)) {
            want.push_back(TypeExpr::atom(Name::of(pr)));
        } else {
            continue;
        }
        for (size_t i = 0; i < lit.args.size() && i < want.size(); i++) {
            const Term& t = lit.args[i];
            if (t.kind != Term::Kind::Constant) continue;
            if (m.constants.count(t.name.canon) || objs.count(t.name.canon))
                continue;
            objs[t.name.canon] = want[i];
        }
    }
    return objs;
}

void build_situation(const SituationDef& def, Registry& reg,
                     std::vector<Diagnostic>& diags) {
    auto base = reg.find_domain(def.domain.canon);
    if (!base) {
        diags.push_back(make_diag(DiagId::UndefinedDomain,
                                  def.domain.src ? def.domain.src : def.src,
                                  def.domain.canon));
        return;
    }
    auto model = std::make_shared<DomainModel>(*base);
    DomainModel& m = *model;
    ModelBuilder b{m, diags};
    b.check_demands(def.demands);

    SituationData data;
    data.name = def.name;
    data.objects = def.objects.flat();
    data.init = def.init;

    SigChecker chk(m, diags);
    for (const auto& [n, t] : data.objects) chk.check_type_known(t, def.src);
    std::map<std::string, TypeExpr> objs = situation_objects(m, data);
    chk.extra_constants = &objs;
    for (const auto& lit : def.init) {
        chk.check_ground_literal(lit);
        if (lit.positive && m.derived_neg.count(lit.pred.canon))
            diags.push_back(
                make_diag(DiagId::NegativeImpliesStored, lit.src, lit.pred.canon));
        else if (m.derived.count(lit.pred.canon))
            diags.push_back(make_diag(DiagId::DerivedInInit, lit.src, lit.pred.canon));
    }

    if (m.situations.count(def.name.canon))
        diags.push_back(make_diag(DiagId::SituationShadowed,
                                  def.name.src ? def.name.src : def.src,
                                  def.name.canon));
    else
        b.claim_name(def.name.canon, NameKind::Situation,
                     def.name.src ? def.name.src : def.src);
    m.situations[def.name.canon] = std::move(data);
    reg.domains[m.name.canon] = model;
}

std::shared_ptr<const ProblemModel> build_problem(const ProblemDef& def, Registry& reg,
                                                  std::vector<Diagnostic>& diags) {
    auto problem = std::make_shared<ProblemModel>();
    ProblemModel& p = *problem;
    p.name = def.name;
    p.domain = def.domain;
    p.src = def.src;
    auto base = def.domain.empty() ? nullptr : reg.find_domain(def.domain.canon);
    if (!base) {
        diags.push_back(make_diag(DiagId::UndefinedDomain,
                                  def.domain.src ? def.domain.src : def.src,
                                  def.domain.canon));
        return nullptr;
    }
    ReqSet declared = 0;
    for (const Name& f : def.requirements)
        if (auto r = req_from_name(f.canon)) declared |= req_bit(*r);
    p.requirements = close_requirements(base->requirements | declared);
    p.objects = def.objects.flat();
    p.init = def.init;
    p.goals = def.goals;
    p.expansions = def.expansions;
    p.length = def.length;

    const SituationData* sit = nullptr;
    if (def.situation) {
        p.situation = def.situation;
        auto it = base->situations.find(def.situation->canon);
        if (it == base->situations.end())
            diags.push_back(make_diag(DiagId::UndefinedSituation,
                                      def.situation->src ? def.situation->src : def.src,
                                      def.situation->canon));
        else
            sit = &it->second;
    }

    // Requirement demands are judged against domain+problem flags.
    {
        DomainModel scratch = *base;
        scratch.requirements = p.requirements;
        ModelBuilder b{scratch, diags};
        b.check_demands(def.demands);

        // Visible objects: situation objects, own objects, then constants
        // inferred from init literal positions.
        SigChecker chk(scratch, diags);
        for (const auto& [n, t] : p.objects) chk.check_type_known(t, def.src);
        SituationData merged;
        if (sit) merged = *sit;
        for (const auto& [n, t] : p.objects) merged.objects.emplace_back(n, t);
        merged.init.insert(merged.init.end(), p.init.begin(), p.init.end());
        std::map<std::string, TypeExpr> objs = situation_objects(scratch, merged);
        chk.extra_constants = &objs;
        for (const auto& lit : p.init) {
            if (lit.pred.canon == "current-value") {
                // (current-value <fluent> <number>) initializes a fluent.
                if (lit.args.size() != 2)
                    diags.push_back(make_diag(DiagId::WrongArity, lit.src));
                continue;
            }
            chk.check_ground_literal(lit);
            if (lit.positive && scratch.derived_neg.count(lit.pred.canon))
                diags.push_back(
                    make_diag(DiagId::NegativeImpliesStored, lit.src, lit.pred.canon));
            else if (scratch.derived.count(lit.pred.canon))
                diags.push_back(
                    make_diag(DiagId::DerivedInInit, lit.src, lit.pred.canon));
            // Init must not contradict timeless literals.
            for (const auto& tl : scratch.timeless) {
                if (tl.pred == lit.pred && tl.positive != lit.positive &&
                    tl.args.size() == lit.args.size()) {
                    bool same = true;
                    for (size_t i = 0; i < tl.args.size(); i++)
                        if (!ast_equal(tl.args[i], lit.args[i])) same = false;
                    if (same)
                        diags.push_back(make_diag(DiagId::TimelessViolatedInInit, lit.src));
                }
            }
        }
        Env env;
        for (const auto& g : p.goals) chk.check_gd(g, env);
        for (const auto& s : p.expansions) {
            Env env2;
            chk.check_spec(s, env2);
        }
    }

    // Register the problem, and its initial situation under the problem name.
    reg.problems[p.name.canon] = problem;
    auto model = std::make_shared<DomainModel>(*base);
    SituationData data;
    data.name = p.name;
    if (sit) data = *sit;
    data.name = p.name;
    for (const auto& [n, t] : p.objects) data.objects.emplace_back(n, t);
    for (const auto& lit : p.init) data.init.push_back(lit);
    model->situations[p.name.canon] = std::move(data);
    model->name_kinds.emplace(p.name.canon, NameKind::Situation);
    reg.domains[model->name.canon] = model;
    return problem;
}

std::shared_ptr<const DomainModel> apply_addendum(const AddendumDef& def, Registry& reg,
                                                  std::vector<Diagnostic>& diags) {
    auto base = reg.find_domain(def.domain.canon);
    if (!base) {
        diags.push_back(make_diag(DiagId::UndefinedDomain,
                                  def.domain.src ? def.domain.src : def.src,
                                  def.domain.canon));
        return nullptr;
    }
    auto model = std::make_shared<DomainModel>(*base);
    DomainModel& m = *model;
    const std::string& who = def.name.canon;

    // Erase-then-add: redefinition replaces this addendum's prior contribution.
    for (auto it = m.actions.begin(); it != m.actions.end();) {
        if (it->second.origin_addendum == who) {
            m.name_kinds.erase(it->first);
            it = m.actions.erase(it);
        } else {
            auto& ms = it->second.methods;
            ms.erase(std::remove_if(ms.begin(), ms.end(),
                                    [&](const MethodSchema& x) {
                                        return x.origin_addendum == who;
                                    }),
                     ms.end());
            ++it;
        }
    }
    m.axioms.erase(std::remove_if(m.axioms.begin(), m.axioms.end(),
                                  [&](const AxiomSchema& ax) {
                                      return ax.origin_addendum == who;
                                  }),
                   m.axioms.end());
    m.safety.erase(std::remove_if(m.safety.begin(), m.safety.end(),
                                  [&](const SafetySchema& s) {
                                      return s.origin_addendum == who;
                                  }),
                   m.safety.end());
    m.derived.clear();
    m.derived_neg.clear();
    for (const auto& ax : m.axioms) {
        m.derived.insert(ax.ast.implies_pred.canon);
        if (!ax.ast.implies_positive) m.derived_neg.insert(ax.ast.implies_pred.canon);
    }

    ModelBuilder b{m, diags};
    for (const ActionDef& a : def.actions) b.add_action(a, m.name, who);
    for (const AxiomDefAst& ax : def.axioms) b.add_axiom(ax, m.name, who);
    for (const MethodDef& mth : def.methods) b.add_method(mth, who);
    for (const auto& g : def.safety) m.safety.push_back(SafetySchema{g, who});
    b.check_demands(def.demands);

    // Check only this addendum's contribution, against the full model.
    {
        SigChecker chk(m, diags);
        std::set<std::string> new_derived;
        for (const AxiomDefAst& ax : def.axioms) new_derived.insert(ax.implies_pred.canon);
        for (const auto& [f, a] : m.actions) {
            bool own = a.origin_addendum == who;
            if (own) {
                chk.check_action(a);
            } else {
                for (const MethodSchema& mth : a.methods)
                    if (mth.origin_addendum == who) chk.check_method(mth);
            }
            walk_effect_atoms(a.body.effect, [&](const Effect& e) {
                if (own ? m.derived.count(e.pred.canon) != 0
                        : new_derived.count(e.pred.canon) != 0)
                    diags.push_back(make_diag(DiagId::EffectOnDerivedPredicate, e.src,
                                              e.pred.canon));
            });
        }
        for (const AxiomSchema& ax : m.axioms)
            if (ax.origin_addendum == who) chk.check_axiom(ax);
        for (const SafetySchema& s : m.safety)
            if (s.origin_addendum == who) {
                Env env;
                chk.check_gd(s.gd, env);
            }
    }
    if (!def.axioms.empty()) m.strata = stratify(m.axioms, m.derived, &diags);

    reg.domains[m.name.canon] = model;
    return model;
}

void build_definition(const Definition& def, Registry& reg,
                      std::vector<Diagnostic>& diags) {
    if (auto* d = std::get_if<DomainDef>(&def)) {
        build_domain(*d, reg, diags);
    } else if (auto* p = std::get_if<ProblemDef>(&def)) {
        build_problem(*p, reg, diags);
    } else if (auto* s = std::get_if<SituationDef>(&def)) {
        build_situation(*s, reg, diags);
    } else if (auto* a = std::get_if<AddendumDef>(&def)) {
        apply_addendum(*a, reg, diags);
    }
}

}  // namespace pddl
