#include "pddl/state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pddl {

std::string Value::str() const { return is_num() ? num.str() : name; }

std::string GroundAtom::str() const {
    std::string out = "(" + pred;
    for (const Value& v : args) out += " " + v.str();
    return out + ")";
}

const char* eval_code_str(EvalCode c) {
    switch (c) {
        case EvalCode::UnboundVariable: return "unbound variable in expression";
        case EvalCode::DivisionByZero: return "division by zero";
        case EvalCode::FluentInEval: return "fluent reference in a plain eval context";
        case EvalCode::NoCurrentValue: return "no current value";
        case EvalCode::MultipleUnknowns: return "more than one unknown in equation";
        case EvalCode::UnsolvableEquation: return "cannot solve equation for unknown";
        case EvalCode::Unenumerable: return "type has no finite extension";
        case EvalCode::DerivedConflict: return "atom derived both true and false";
        case EvalCode::BadEquality: return "equality with both sides unbound";
        case EvalCode::NotANumber: return "name has no numeric value";
    }
    return "evaluation error";
}

const char* EvalError::what() const noexcept {
    text = eval_code_str(code);
    if (!detail.empty()) text += ": " + detail;
    return text.c_str();
}

std::optional<Value> term_value(const Term& t, const Substitution& sigma) {
    switch (t.kind) {
        case Term::Kind::Number: return Value::number(t.num);
        case Term::Kind::Constant: return Value::constant(t.name.canon);
        case Term::Kind::Variable: {
            auto it = sigma.find(t.name.canon);
            if (it == sigma.end()) return std::nullopt;
            return it->second;
        }
    }
    return std::nullopt;
}

State initial_state(const DomainModel& m, const SituationData& data) {
    State st;
    auto uni = std::make_shared<Universe>();
    for (const auto& [n, t] : m.constants) (*uni)[n] = t;
    for (auto& [n, t] : situation_objects(m, data)) (*uni)[n] = t;
    st.objects = std::move(uni);
    for (const auto& lit : data.init) {
        if (lit.pred.canon == "current-value") {
            if (lit.args.size() == 2 &&
                lit.args[0].kind == Term::Kind::Constant &&
                lit.args[1].kind == Term::Kind::Number)
                st.fluents[lit.args[0].name.canon] = lit.args[1].num;
            continue;
        }
        if (m.derived.count(lit.pred.canon)) continue;
        // Literals act like effects applied in file order: a positive literal
        // adds the atom, a negated one deletes it (relevant when a situation
        // is later amended by a problem's own :init).
        if (lit.positive)
            st.atoms.insert(ground_literal_atom(lit));
        else
            st.atoms.erase(ground_literal_atom(lit));
    }
    for (const auto& [n, dv] : m.domain_vars)
        if (dv.initial) st.domain_vars[n] = *dv.initial;
    return st;
}

GroundAtom ground_literal_atom(const GroundLiteralAst& lit) {
    GroundAtom a;
    a.pred = lit.pred.canon;
    for (const Term& t : lit.args) {
        Substitution none;
        if (auto v = term_value(t, none)) a.args.push_back(*v);
    }
    return a;
}

// ---------------------------------------------------------------------------

Evaluator::Evaluator(const DomainModel& model, const State& state)
    : m_(model), s_(state) {
    for (const GroundLiteralAst& lit : m_.timeless)
        (lit.positive ? timeless_pos_ : timeless_neg_).insert(ground_literal_atom(lit));
}

void Evaluator::for_each_true(const std::string& pred,
                              const std::function<void(const GroundAtom&)>& fn) {
    GroundAtom probe{pred, {}};
    auto scan = [&](const std::set<GroundAtom>& set) {
        for (auto it = set.lower_bound(probe); it != set.end() && it->pred == pred; ++it)
            fn(*it);
    };
    scan(s_.atoms);
    scan(timeless_pos_);
    scan(dpos_);
}

bool Evaluator::value_has_type(const Value& v, const TypeExpr& t) {
    switch (t.kind) {
        case TypeExpr::Kind::Either:
            return std::any_of(t.members.begin(), t.members.end(),
                               [&](const TypeExpr& u) { return value_has_type(v, u); });
        case TypeExpr::Kind::Fluent: {
            if (v.is_num()) return false;
            if (!s_.objects) return false;
            auto it = s_.objects->find(v.name);
            return it != s_.objects->end() && subtype_of(it->second, t, m_.types);
        }
        case TypeExpr::Kind::Atom:
            break;
    }
    const std::string& ty = t.name.canon;
    if (v.is_num()) {
        // Number-family types admit any number, except types whose
        // membership is defined by axioms — those hold only when derived.
        if (ty == "number") return true;
        if (!m_.derived.count(ty) && m_.types.atom_subtype(ty, "number"))
            return true;
    } else {
        if (s_.objects) {
            auto it = s_.objects->find(v.name);
            if (it != s_.objects->end() && subtype_of(it->second, t, m_.types))
                return true;
        }
    }
    // A unary type atom can assert membership directly, for the type itself
    // or any declared subtype.
    ensure_derived();
    GroundAtom probe{ty, {v}};
    if (s_.atoms.count(probe) || timeless_pos_.count(probe) || dpos_.count(probe))
        return true;
    for (const auto& [sub, _] : m_.types.supertype) {
        if (sub == ty || !m_.types.atom_subtype(sub, ty)) continue;
        probe.pred = sub;
        if (s_.atoms.count(probe) || timeless_pos_.count(probe) || dpos_.count(probe))
            return true;
    }
    return false;
}

bool Evaluator::atom_true(const GroundAtom& a) {
    ensure_derived();
    if (s_.atoms.count(a) || timeless_pos_.count(a) || dpos_.count(a)) return true;
    if (a.args.size() == 1 && m_.types.declared(a.pred))
        return value_has_type(a.args[0], TypeExpr::atom(Name::of(a.pred)));
    return false;
}

std::vector<Value> Evaluator::extension(const TypeExpr& t) {
    ensure_derived();
    std::set<Value> out;
    if (s_.objects)
        for (const auto& [name, ty] : *s_.objects)
            if (subtype_of(ty, t, m_.types)) out.insert(Value::constant(name));
    // Unary type atoms extend the enumeration (including numeric members).
    std::function<void(const TypeExpr&)> scan_atoms = [&](const TypeExpr& u) {
        switch (u.kind) {
            case TypeExpr::Kind::Either:
                for (const TypeExpr& mem : u.members) scan_atoms(mem);
                return;
            case TypeExpr::Kind::Fluent:
                return;
            case TypeExpr::Kind::Atom:
                break;
        }
        for (const auto& [sub, _] : m_.types.supertype) {
            if (!m_.types.atom_subtype(sub, u.name.canon)) continue;
            for_each_true(sub, [&](const GroundAtom& a) {
                if (a.args.size() == 1) out.insert(a.args[0]);
            });
        }
    };
    scan_atoms(t);
    if (out.empty()) {
        std::function<bool(const TypeExpr&)> numeric = [&](const TypeExpr& u) {
            switch (u.kind) {
                case TypeExpr::Kind::Either:
                    return std::any_of(u.members.begin(), u.members.end(), numeric);
                case TypeExpr::Kind::Fluent:
                    return false;
                case TypeExpr::Kind::Atom:
                    return u.name.canon == "number" ||
                           m_.types.atom_subtype(u.name.canon, "number");
            }
            return false;
        };
        if (numeric(t))
            throw EvalError(EvalCode::Unenumerable, t.str());
    }
    return std::vector<Value>(out.begin(), out.end());
}

// --- satisfaction ----------------------------------------------------------

namespace {

bool unify_term(const Term& t, const Value& v, Substitution& sigma) {
    switch (t.kind) {
        case Term::Kind::Constant:
            return !v.is_num() && v.name == t.name.canon;
        case Term::Kind::Number:
            return v.is_num() && v.num == t.num;
        case Term::Kind::Variable: {
            auto it = sigma.find(t.name.canon);
            if (it != sigma.end()) return it->second == v;
            sigma[t.name.canon] = v;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<Substitution> Evaluator::satisfy(const GdPtr& g, const Substitution& sigma) {
    if (!g) return {sigma};
    switch (g->kind) {
        case Gd::Kind::Atom:
            return satisfy_atom(*g, sigma);
        case Gd::Kind::Builtin:
            return satisfy_builtin(*g, sigma);
        case Gd::Kind::Not:
            if (g->children.empty()) return {sigma};
            return holds(g->children[0], sigma) ? std::vector<Substitution>{}
                                                : std::vector<Substitution>{sigma};
        case Gd::Kind::And: {
            std::vector<Substitution> cur{sigma};
            for (const GdPtr& c : g->children) {
                std::set<Substitution> next;
                for (const Substitution& s : cur)
                    for (Substitution& ext : satisfy(c, s)) next.insert(std::move(ext));
                cur.assign(next.begin(), next.end());
                if (cur.empty()) break;
            }
            return cur;
        }
        case Gd::Kind::Or: {
            std::set<Substitution> out;
            for (const GdPtr& c : g->children)
                for (Substitution& ext : satisfy(c, sigma)) out.insert(std::move(ext));
            return {out.begin(), out.end()};
        }
        case Gd::Kind::Imply: {
            // (imply a b) = (or (not a) b)
            std::set<Substitution> out;
            if (g->children.size() == 2) {
                if (!holds(g->children[0], sigma)) out.insert(sigma);
                for (Substitution& ext : satisfy(g->children[1], sigma))
                    out.insert(std::move(ext));
            }
            return {out.begin(), out.end()};
        }
        case Gd::Kind::Exists: {
            if (g->children.empty()) return {sigma};
            auto flat = g->vars.flat();
            std::set<Substitution> out;
            Substitution base = sigma;
            for (const auto& [n, _] : flat) base.erase(n.canon);
            std::function<void(size_t, Substitution&)> rec = [&](size_t i,
                                                                 Substitution& cur) {
                if (i == flat.size()) {
                    for (Substitution theta : satisfy(g->children[0], cur)) {
                        // Project the quantified variables back out.
                        for (const auto& [n, _] : flat) {
                            theta.erase(n.canon);
                            auto prev = sigma.find(n.canon);
                            if (prev != sigma.end()) theta[n.canon] = prev->second;
                        }
                        out.insert(std::move(theta));
                    }
                    return;
                }
                for (const Value& v : extension(flat[i].second)) {
                    cur[flat[i].first.canon] = v;
                    rec(i + 1, cur);
                }
                cur.erase(flat[i].first.canon);
            };
            rec(0, base);
            return {out.begin(), out.end()};
        }
        case Gd::Kind::Forall: {
            if (g->children.empty()) return {sigma};
            auto flat = g->vars.flat();
            Substitution base = sigma;
            for (const auto& [n, _] : flat) base.erase(n.canon);
            bool ok = true;
            std::function<void(size_t, Substitution&)> rec = [&](size_t i,
                                                                 Substitution& cur) {
                if (!ok) return;
                if (i == flat.size()) {
                    if (!holds(g->children[0], cur)) ok = false;
                    return;
                }
                for (const Value& v : extension(flat[i].second)) {
                    cur[flat[i].first.canon] = v;
                    rec(i + 1, cur);
                    if (!ok) break;
                }
                cur.erase(flat[i].first.canon);
            };
            rec(0, base);
            return ok ? std::vector<Substitution>{sigma} : std::vector<Substitution>{};
        }
    }
    return {};
}

bool Evaluator::holds(const GdPtr& g, const Substitution& sigma) {
    return !satisfy(g, sigma).empty();
}

std::vector<Substitution> Evaluator::satisfy_atom(const Gd& g, const Substitution& sigma) {
    ensure_derived();
    const std::string& p = g.pred.canon;
    if (p == "=") return satisfy_equality(g, sigma);
    if (m_.types.declared(p)) {
        if (g.args.size() != 1) return {};
        if (auto v = term_value(g.args[0], sigma))
            return value_has_type(*v, TypeExpr::atom(Name::of(p)))
                       ? std::vector<Substitution>{sigma}
                       : std::vector<Substitution>{};
        std::set<Substitution> out;
        for (const Value& v : extension(TypeExpr::atom(Name::of(p)))) {
            Substitution ext = sigma;
            ext[g.args[0].name.canon] = v;
            out.insert(std::move(ext));
        }
        return {out.begin(), out.end()};
    }
    std::set<Substitution> out;
    for_each_true(p, [&](const GroundAtom& a) {
        if (a.args.size() != g.args.size()) return;
        Substitution ext = sigma;
        for (size_t i = 0; i < a.args.size(); i++)
            if (!unify_term(g.args[i], a.args[i], ext)) return;
        out.insert(std::move(ext));
    });
    return {out.begin(), out.end()};
}

std::vector<Substitution> Evaluator::satisfy_equality(const Gd& g,
                                                      const Substitution& sigma) {
    if (g.args.size() != 2) return {};
    auto lhs = term_value(g.args[0], sigma);
    auto rhs = term_value(g.args[1], sigma);
    if (lhs && rhs)
        return *lhs == *rhs ? std::vector<Substitution>{sigma}
                            : std::vector<Substitution>{};
    if (!lhs && !rhs)
        throw EvalError(EvalCode::BadEquality,
                        g.args[0].name.canon + " " + g.args[1].name.canon, g.src);
    Substitution ext = sigma;
    if (!lhs)
        ext[g.args[0].name.canon] = *rhs;
    else
        ext[g.args[1].name.canon] = *lhs;
    return {ext};
}

// --- expressions -------------------------------------------------------------

NumericValue Evaluator::read_fluent(const std::string& name, bool fluent_ctx,
                                    const SExprPtr& at) {
    bool fluent_typed = false;
    if (s_.objects) {
        auto it = s_.objects->find(name);
        fluent_typed = it != s_.objects->end() &&
                       it->second.kind == TypeExpr::Kind::Fluent;
    }
    bool has_value = s_.fluents.count(name) != 0;
    if (!fluent_ctx && (has_value || fluent_typed))
        throw EvalError(EvalCode::FluentInEval, name, at);
    if (has_value) return s_.fluents.at(name);
    if (fluent_typed) throw EvalError(EvalCode::NoCurrentValue, name, at);
    throw EvalError(EvalCode::NotANumber, name, at);
}

NumericValue Evaluator::eval_expr(const ExprPtr& e, const Substitution& sigma,
                                  bool fluent_ctx) {
    if (!e) throw EvalError(EvalCode::NotANumber, "(missing expression)");
    switch (e->kind) {
        case Expr::Kind::Num:
            return e->num;
        case Expr::Kind::Var: {
            auto it = sigma.find(e->name.canon);
            if (it == sigma.end())
                throw EvalError(EvalCode::UnboundVariable, e->name.canon, e->src);
            if (it->second.is_num()) return it->second.num;
            return read_fluent(it->second.name, fluent_ctx, e->src);
        }
        case Expr::Kind::Ref: {
            if (auto it = s_.domain_vars.find(e->name.canon); it != s_.domain_vars.end())
                return it->second;
            if (m_.domain_vars.count(e->name.canon))
                throw EvalError(EvalCode::NoCurrentValue, e->name.canon, e->src);
            return read_fluent(e->name.canon, fluent_ctx, e->src);
        }
        case Expr::Kind::Sum:
            return sum_fluent(*e, sigma);
        case Expr::Kind::Apply:
            break;
    }
    const std::string& op = e->op.canon;
    std::vector<NumericValue> vals;
    vals.reserve(e->args.size());
    for (const ExprPtr& a : e->args) vals.push_back(eval_expr(a, sigma, fluent_ctx));
    if (vals.empty()) throw EvalError(EvalCode::NotANumber, op, e->src);
    if (op == "+") {
        NumericValue acc = vals[0];
        for (size_t i = 1; i < vals.size(); i++) acc = acc + vals[i];
        return acc;
    }
    if (op == "-") {
        if (vals.size() == 1) return vals[0].negate();
        NumericValue acc = vals[0];
        for (size_t i = 1; i < vals.size(); i++) acc = acc - vals[i];
        return acc;
    }
    if (op == "*") {
        NumericValue acc = vals[0];
        for (size_t i = 1; i < vals.size(); i++) acc = acc * vals[i];
        return acc;
    }
    if (op == "/") {
        NumericValue acc = vals[0];
        for (size_t i = 1; i < vals.size(); i++) {
            if (vals[i].is_zero())
                throw EvalError(EvalCode::DivisionByZero, "", e->src);
            acc = acc / vals[i];
        }
        return acc;
    }
    // Comparisons evaluate to 1 or 0; n-ary forms chain pairwise.
    auto chain = [&](const std::function<bool(const NumericValue&,
                                              const NumericValue&)>& cmp) {
        for (size_t i = 0; i + 1 < vals.size(); i++)
            if (!cmp(vals[i], vals[i + 1])) return NumericValue::integer(0);
        return NumericValue::integer(1);
    };
    if (op == "=")
        return chain([](const NumericValue& a, const NumericValue& b) { return a == b; });
    if (op == "<")
        return chain([](const NumericValue& a, const NumericValue& b) { return a < b; });
    if (op == ">")
        return chain([](const NumericValue& a, const NumericValue& b) { return b < a; });
    if (op == "<=")
        return chain([](const NumericValue& a, const NumericValue& b) { return a <= b; });
    if (op == ">=")
        return chain([](const NumericValue& a, const NumericValue& b) { return b <= a; });
    throw EvalError(EvalCode::NotANumber, op, e->src);
}

namespace {

// Counts unbound-variable occurrences; sum-bound variables are shadowed.
void scan_unbound(const ExprPtr& e, const Substitution& sigma,
                  std::set<std::string> shadow, int& count, std::string* var,
                  SExprPtr* where) {
    if (!e) return;
    switch (e->kind) {
        case Expr::Kind::Var:
            if (!shadow.count(e->name.canon) && !sigma.count(e->name.canon)) {
                count++;
                if (var) *var = e->name.canon;
                if (where) *where = e->src;
            }
            return;
        case Expr::Kind::Apply:
            for (const ExprPtr& a : e->args)
                scan_unbound(a, sigma, shadow, count, var, where);
            return;
        case Expr::Kind::Sum: {
            for (const auto& [n, _] : e->sum_vars.flat()) shadow.insert(n.canon);
            // Variables free in the condition or body still count.
            std::function<void(const GdPtr&)> scan_gd = [&](const GdPtr& g) {
                if (!g) return;
                for (const Term& t : g->args)
                    if (t.is_var() && !shadow.count(t.name.canon) &&
                        !sigma.count(t.name.canon))
                        count++;
                for (const ExprPtr& x : g->eargs)
                    scan_unbound(x, sigma, shadow, count, var, where);
                for (const GdPtr& c : g->children) scan_gd(c);
            };
            scan_gd(e->sum_cond);
            scan_unbound(e->sum_body, sigma, shadow, count, var, where);
            return;
        }
        default:
            return;
    }
}

bool contains_unbound(const ExprPtr& e, const Substitution& sigma) {
    int count = 0;
    scan_unbound(e, sigma, {}, count, nullptr, nullptr);
    return count > 0;
}

}  // namespace

// Inverts an expression around its single unknown: given target = value(e),
// returns the value the unknown must take.
static NumericValue invert_for(const ExprPtr& e, NumericValue target,
                               const Substitution& sigma, Evaluator& ev) {
    if (e->kind == Expr::Kind::Var && !sigma.count(e->name.canon)) return target;
    if (e->kind != Expr::Kind::Apply)
        throw EvalError(EvalCode::UnsolvableEquation, "", e ? e->src : nullptr);
    const std::string& op = e->op.canon;
    size_t hole = e->args.size();
    for (size_t i = 0; i < e->args.size(); i++)
        if (contains_unbound(e->args[i], sigma)) {
            hole = i;
            break;
        }
    if (hole == e->args.size())
        throw EvalError(EvalCode::UnsolvableEquation, "", e->src);
    auto val = [&](size_t i) { return ev.eval_expr(e->args[i], sigma, false); };
    if (op == "+") {
        NumericValue rest = NumericValue::integer(0);
        for (size_t i = 0; i < e->args.size(); i++)
            if (i != hole) rest = rest + val(i);
        return invert_for(e->args[hole], target - rest, sigma, ev);
    }
    if (op == "-") {
        if (e->args.size() == 1)
            return invert_for(e->args[0], target.negate(), sigma, ev);
        if (hole == 0) {
            NumericValue rest = NumericValue::integer(0);
            for (size_t i = 1; i < e->args.size(); i++) rest = rest + val(i);
            return invert_for(e->args[0], target + rest, sigma, ev);
        }
        // a - b - c = t  =>  b_i = (a - others) - t
        NumericValue acc = val(0);
        for (size_t i = 1; i < e->args.size(); i++)
            if (i != hole) acc = acc - val(i);
        return invert_for(e->args[hole], acc - target, sigma, ev);
    }
    if (op == "*") {
        NumericValue rest = NumericValue::integer(1);
        for (size_t i = 0; i < e->args.size(); i++)
            if (i != hole) rest = rest * val(i);
        if (rest.is_zero())
            throw EvalError(EvalCode::UnsolvableEquation, "multiplier is zero", e->src);
        return invert_for(e->args[hole], target / rest, sigma, ev);
    }
    if (op == "/") {
        if (hole == 0) {
            NumericValue rest = NumericValue::integer(1);
            for (size_t i = 1; i < e->args.size(); i++) rest = rest * val(i);
            return invert_for(e->args[0], target * rest, sigma, ev);
        }
        // a / b / c = t  =>  b_i = a / (t * others)
        if (target.is_zero())
            throw EvalError(EvalCode::UnsolvableEquation, "target is zero", e->src);
        NumericValue acc = val(0);
        NumericValue denom = target;
        for (size_t i = 1; i < e->args.size(); i++)
            if (i != hole) denom = denom * val(i);
        if (denom.is_zero())
            throw EvalError(EvalCode::UnsolvableEquation, "divide by zero", e->src);
        return invert_for(e->args[hole], acc / denom, sigma, ev);
    }
    throw EvalError(EvalCode::UnsolvableEquation, op, e->src);
}

std::vector<Substitution> Evaluator::satisfy_builtin(const Gd& g,
                                                     const Substitution& sigma) {
    const std::string& head = g.pred.canon;
    bool fl = head == "fluent-eval" || head == "fluent-test" || head == "current-value";
    auto arg = [&](size_t i) -> const ExprPtr& {
        static const ExprPtr none;
        return i < g.eargs.size() ? g.eargs[i] : none;
    };

    if (head == "eval" || head == "fluent-eval") {
        if (g.eargs.size() != 2) return {};
        NumericValue n = eval_expr(arg(0), sigma, fl);
        const ExprPtr& v = arg(1);
        if (v && v->kind == Expr::Kind::Var && !sigma.count(v->name.canon)) {
            Substitution ext = sigma;
            ext[v->name.canon] = Value::number(n);
            return {ext};
        }
        return eval_expr(v, sigma, fl) == n ? std::vector<Substitution>{sigma}
                                            : std::vector<Substitution>{};
    }
    if (head == "test" || head == "fluent-test") {
        if (g.eargs.size() != 1) return {};
        return eval_expr(arg(0), sigma, fl).is_zero() ? std::vector<Substitution>{}
                                                      : std::vector<Substitution>{sigma};
    }
    if (head == "bounded-int") {
        if (g.eargs.size() != 3) return {};
        NumericValue lo = eval_expr(arg(1), sigma, false);
        NumericValue hi = eval_expr(arg(2), sigma, false);
        const ExprPtr& iexpr = arg(0);
        if (iexpr && iexpr->kind == Expr::Kind::Var && !sigma.count(iexpr->name.canon)) {
            int64_t l = lo.is_int() ? lo.i
                                    : static_cast<int64_t>(std::ceil(lo.r));
            int64_t h = hi.is_int() ? hi.i
                                    : static_cast<int64_t>(std::floor(hi.r));
            if (h - l > 100000)
                throw EvalError(EvalCode::Unenumerable, "bounded-int range", g.src);
            std::vector<Substitution> out;
            for (int64_t k = l; k <= h; k++) {
                Substitution ext = sigma;
                ext[iexpr->name.canon] = Value::number(NumericValue::integer(k));
                out.push_back(std::move(ext));
            }
            return out;
        }
        NumericValue v = eval_expr(iexpr, sigma, false);
        return (v.integral() && lo <= v && v <= hi) ? std::vector<Substitution>{sigma}
                                                    : std::vector<Substitution>{};
    }
    if (head == "equation") {
        if (g.eargs.size() != 2) return {};
        int count = 0;
        std::string var;
        SExprPtr where;
        scan_unbound(arg(0), sigma, {}, count, &var, &where);
        scan_unbound(arg(1), sigma, {}, count, &var, &where);
        if (count == 0)
            return eval_expr(arg(0), sigma, false) == eval_expr(arg(1), sigma, false)
                       ? std::vector<Substitution>{sigma}
                       : std::vector<Substitution>{};
        if (count > 1)
            throw EvalError(EvalCode::MultipleUnknowns, var, g.src);
        bool in_left = contains_unbound(arg(0), sigma);
        NumericValue target = eval_expr(in_left ? arg(1) : arg(0), sigma, false);
        NumericValue v = invert_for(in_left ? arg(0) : arg(1), target, sigma, *this);
        Substitution ext = sigma;
        ext[var] = Value::number(v);
        // Exact verification guards against inexact inversions.
        if (eval_expr(arg(0), ext, false) == eval_expr(arg(1), ext, false)) return {ext};
        return {};
    }
    if (head == "current-value") {
        if (g.eargs.size() != 2) return {};
        const ExprPtr& f = arg(0);
        std::string name;
        if (f && f->kind == Expr::Kind::Ref) {
            name = f->name.canon;
        } else if (f && f->kind == Expr::Kind::Var) {
            auto it = sigma.find(f->name.canon);
            if (it == sigma.end())
                throw EvalError(EvalCode::UnboundVariable, f->name.canon, g.src);
            if (it->second.is_num()) return {};
            name = it->second.name;
        } else {
            throw EvalError(EvalCode::NotANumber, "(current-value)", g.src);
        }
        NumericValue val;
        if (auto it = s_.fluents.find(name); it != s_.fluents.end())
            val = it->second;
        else if (auto dv = s_.domain_vars.find(name); dv != s_.domain_vars.end())
            val = dv->second;
        else
            return {};
        const ExprPtr& v = arg(1);
        if (v && v->kind == Expr::Kind::Var && !sigma.count(v->name.canon)) {
            Substitution ext = sigma;
            ext[v->name.canon] = Value::number(val);
            return {ext};
        }
        return eval_expr(v, sigma, true) == val ? std::vector<Substitution>{sigma}
                                                : std::vector<Substitution>{};
    }
    return {};
}

NumericValue Evaluator::sum_fluent(const Expr& e, const Substitution& sigma) {
    auto flat = e.sum_vars.flat();
    Substitution base = sigma;
    for (const auto& [n, _] : flat) base.erase(n.canon);
    std::set<std::vector<Value>> tuples;
    for (const Substitution& theta : satisfy(e.sum_cond, base)) {
        // All listed variables must end up bound; extend leftovers by type.
        std::vector<size_t> open;
        for (size_t i = 0; i < flat.size(); i++)
            if (!theta.count(flat[i].first.canon)) open.push_back(i);
        std::function<void(size_t, Substitution&)> emit = [&](size_t oi,
                                                              Substitution& cur) {
            if (oi == open.size()) {
                std::vector<Value> tuple;
                for (const auto& [n, t] : flat) {
                    const Value& v = cur.at(n.canon);
                    if (!value_has_type(v, t)) return;
                    tuple.push_back(v);
                }
                tuples.insert(std::move(tuple));
                return;
            }
            size_t i = open[oi];
            for (const Value& v : extension(flat[i].second)) {
                cur[flat[i].first.canon] = v;
                emit(oi + 1, cur);
            }
            cur.erase(flat[i].first.canon);
        };
        Substitution cur = theta;
        emit(0, cur);
    }
    NumericValue total = NumericValue::integer(0);
    for (const std::vector<Value>& tuple : tuples) {
        Substitution cur = base;
        for (size_t i = 0; i < flat.size(); i++) cur[flat[i].first.canon] = tuple[i];
        total = total + eval_expr(e.sum_body, cur, true);
    }
    return total;
}

// --- derived closure -----------------------------------------------------------

const std::set<GroundAtom>& Evaluator::derived_true() {
    ensure_derived();
    return dpos_;
}

const std::set<GroundAtom>& Evaluator::derived_false() {
    ensure_derived();
    return dneg_;
}

void Evaluator::run_stratum(int s) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const AxiomSchema& ax : m_.axioms) {
            const std::string& q = ax.ast.implies_pred.canon;
            auto st = m_.strata.stratum.find(q);
            if (st == m_.strata.stratum.end() || st->second != s) continue;
            auto flat = ax.ast.vars.flat();
            // Ground the :vars eagerly so negated conjuncts in the context
            // never see unbound arguments; a variable whose type has no
            // finite extension is left for the context to bind (the
            // bounded-int counting idiom).
            std::vector<std::pair<std::string, std::optional<std::vector<Value>>>>
                ranges;
            for (const auto& [n, t] : flat) {
                try {
                    ranges.emplace_back(n.canon, extension(t));
                } catch (const EvalError& err) {
                    if (err.code != EvalCode::Unenumerable) throw;
                    ranges.emplace_back(n.canon, std::nullopt);
                }
            }
            std::vector<Substitution> grounded;
            std::function<void(size_t, Substitution&)> enum_rec =
                [&](size_t i, Substitution& cur) {
                    if (i == ranges.size()) {
                        grounded.push_back(cur);
                        return;
                    }
                    if (!ranges[i].second) {
                        enum_rec(i + 1, cur);
                        return;
                    }
                    for (const Value& v : *ranges[i].second) {
                        cur[ranges[i].first] = v;
                        enum_rec(i + 1, cur);
                    }
                    cur.erase(ranges[i].first);
                };
            Substitution seed;
            enum_rec(0, seed);
            for (const Substitution& start : grounded)
            for (const Substitution& theta : satisfy(ax.ast.context, start)) {
                // Variables used in :implies but not bound by the context are
                // extended over their declared types.
                std::vector<size_t> open;
                for (size_t i = 0; i < flat.size(); i++) {
                    bool used = std::any_of(
                        ax.ast.implies_args.begin(), ax.ast.implies_args.end(),
                        [&](const Term& t) {
                            return t.is_var() && t.name.canon == flat[i].first.canon;
                        });
                    if (used && !theta.count(flat[i].first.canon)) open.push_back(i);
                }
                std::function<void(size_t, Substitution&)> emit =
                    [&](size_t oi, Substitution& cur) {
                        if (oi == open.size()) {
                            for (const auto& [n, t] : flat) {
                                auto it = cur.find(n.canon);
                                if (it != cur.end() && !value_has_type(it->second, t))
                                    return;
                            }
                            GroundAtom atom;
                            atom.pred = q;
                            for (const Term& t : ax.ast.implies_args) {
                                auto v = term_value(t, cur);
                                if (!v) return;  // still unbound: no instance
                                atom.args.push_back(*v);
                            }
                            auto& dst = ax.ast.implies_positive ? dpos_ : dneg_;
                            if (dst.insert(std::move(atom)).second) changed = true;
                            return;
                        }
                        size_t i = open[oi];
                        for (const Value& v : extension(flat[i].second)) {
                            cur[flat[i].first.canon] = v;
                            emit(oi + 1, cur);
                        }
                        cur.erase(flat[i].first.canon);
                    };
                Substitution cur = theta;
                emit(0, cur);
            }
        }
    }
}

void Evaluator::ensure_derived() {
    if (derived_ready_ || computing_) return;
    computing_ = true;
    try {
        if (m_.strata.stratifiable)
            for (int s = 1; s <= m_.strata.max_stratum; s++) run_stratum(s);
        for (const GroundAtom& a : dneg_)
            if (s_.atoms.count(a) || timeless_pos_.count(a) || dpos_.count(a))
                throw EvalError(EvalCode::DerivedConflict, a.str());
        for (const GroundAtom& a : timeless_neg_)
            if (dpos_.count(a))
                throw EvalError(EvalCode::DerivedConflict, a.str());
    } catch (...) {
        computing_ = false;
        dpos_.clear();
        dneg_.clear();
        throw;
    }
    computing_ = false;
    derived_ready_ = true;
}

}  // namespace pddl
