#include "pddl/ast.hpp"

namespace pddl {

std::string TypeExpr::str() const {
    switch (kind) {
        case Kind::Atom: return name.canon;
        case Kind::Fluent: return "(fluent " + members[0].str() + ")";
        case Kind::Either: {
            std::string out = "(either";
            for (const auto& m : members) out += " " + m.str();
            return out + ")";
        }
    }
    return "?";
}

bool operator==(const TypeExpr& a, const TypeExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == TypeExpr::Kind::Atom) return a.name == b.name;
    if (a.members.size() != b.members.size()) return false;
    for (size_t i = 0; i < a.members.size(); i++)
        if (!(a.members[i] == b.members[i])) return false;
    return true;
}

std::vector<std::pair<Name, TypeExpr>> TypedList::flat() const {
    std::vector<std::pair<Name, TypeExpr>> out;
    for (const auto& g : groups)
        for (const auto& n : g.items) out.emplace_back(n, g.type);
    return out;
}

std::string term_str(const Term& t) {
    return t.kind == Term::Kind::Number ? t.num.str() : t.name.canon;
}

// --- strip-advice -----------------------------------------------------------

ExprPtr strip_advice(const ExprPtr& e) {
    if (!e) return e;
    auto c = std::make_shared<Expr>(*e);
    c->advice.clear();
    for (auto& a : c->args) a = strip_advice(a);
    c->sum_cond = strip_advice(c->sum_cond);
    c->sum_body = strip_advice(c->sum_body);
    return c;
}

GdPtr strip_advice(const GdPtr& g) {
    if (!g) return g;
    auto c = std::make_shared<Gd>(*g);
    c->advice.clear();
    for (auto& ch : c->children) ch = strip_advice(ch);
    for (auto& e : c->eargs) e = strip_advice(e);
    return c;
}

EffectPtr strip_advice(const EffectPtr& e) {
    if (!e) return e;
    auto c = std::make_shared<Effect>(*e);
    c->advice.clear();
    for (auto& ch : c->children) ch = strip_advice(ch);
    c->cond = strip_advice(c->cond);
    c->expr = strip_advice(c->expr);
    return c;
}

SpecPtr strip_advice(const SpecPtr& s) {
    if (!s) return s;
    auto c = std::make_shared<Spec>(*s);
    c->advice.clear();
    for (auto& ch : c->children) ch = strip_advice(ch);
    for (auto& ch : c->constraints) ch = strip_advice(ch);
    c->cond = strip_advice(c->cond);
    c->conds.precondition = strip_advice(c->conds.precondition);
    c->conds.maintain = strip_advice(c->conds.maintain);
    c->conds.effect = strip_advice(c->conds.effect);
    return c;
}

// --- structural equality (spans and advice payload spans ignored) -----------

bool ast_equal(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Term::Kind::Number) return a.num == b.num;
    return a.name == b.name;
}

static bool terms_equal(const std::vector<Term>& a, const std::vector<Term>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
        if (!ast_equal(a[i], b[i])) return false;
    return true;
}

static bool advice_equal(const std::vector<SExprPtr>& a, const std::vector<SExprPtr>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
        if (!sexpr_equal(*a[i], *b[i])) return false;
    return true;
}

bool ast_equal(const TypedList& a, const TypedList& b) {
    if (a.groups.size() != b.groups.size()) return false;
    for (size_t i = 0; i < a.groups.size(); i++) {
        const auto& ga = a.groups[i];
        const auto& gb = b.groups[i];
        if (ga.items.size() != gb.items.size()) return false;
        if (!(ga.type == gb.type)) return false;
        for (size_t j = 0; j < ga.items.size(); j++)
            if (!(ga.items[j] == gb.items[j])) return false;
    }
    return true;
}

bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || !advice_equal(a->advice, b->advice)) return false;
    switch (a->kind) {
        case Expr::Kind::Num: return a->num == b->num;
        case Expr::Kind::Ref:
        case Expr::Kind::Var: return a->name == b->name;
        case Expr::Kind::Apply: {
            if (!(a->op == b->op) || a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); i++)
                if (!ast_equal(a->args[i], b->args[i])) return false;
            return true;
        }
        case Expr::Kind::Sum:
            return ast_equal(a->sum_vars, b->sum_vars) &&
                   ast_equal(a->sum_cond, b->sum_cond) &&
                   ast_equal(a->sum_body, b->sum_body);
    }
    return false;
}

bool ast_equal(const GdPtr& a, const GdPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || !advice_equal(a->advice, b->advice)) return false;
    if (!(a->pred == b->pred)) return false;
    if (!terms_equal(a->args, b->args)) return false;
    if (a->eargs.size() != b->eargs.size()) return false;
    for (size_t i = 0; i < a->eargs.size(); i++)
        if (!ast_equal(a->eargs[i], b->eargs[i])) return false;
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); i++)
        if (!ast_equal(a->children[i], b->children[i])) return false;
    return ast_equal(a->vars, b->vars);
}

bool ast_equal(const EffectPtr& a, const EffectPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || !advice_equal(a->advice, b->advice)) return false;
    if (!(a->pred == b->pred) || !terms_equal(a->args, b->args)) return false;
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); i++)
        if (!ast_equal(a->children[i], b->children[i])) return false;
    return ast_equal(a->vars, b->vars) && ast_equal(a->cond, b->cond) &&
           ast_equal(a->fluent, b->fluent) && ast_equal(a->expr, b->expr);
}

bool ast_equal(const SpecPtr& a, const SpecPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || !advice_equal(a->advice, b->advice)) return false;
    if (!(a->functor == b->functor) || !terms_equal(a->args, b->args)) return false;
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); i++)
        if (!ast_equal(a->children[i], b->children[i])) return false;
    if (a->constraints.size() != b->constraints.size()) return false;
    for (size_t i = 0; i < a->constraints.size(); i++)
        if (!ast_equal(a->constraints[i], b->constraints[i])) return false;
    auto labels_equal = [](const std::vector<LabelTerm>& x, const std::vector<LabelTerm>& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); i++)
            if (!(x[i].label == y[i].label) || x[i].qual != y[i].qual) return false;
        return true;
    };
    return labels_equal(a->pre_labels, b->pre_labels) &&
           labels_equal(a->post_labels, b->post_labels) &&
           ast_equal(a->vars, b->vars) && ast_equal(a->cond, b->cond) &&
           ast_equal(a->conds.vars, b->conds.vars) &&
           ast_equal(a->conds.precondition, b->conds.precondition) &&
           ast_equal(a->conds.maintain, b->conds.maintain) &&
           ast_equal(a->conds.effect, b->conds.effect);
}

}  // namespace pddl
