#include "pddl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pddl/requirements.hpp"

namespace pddl {

namespace {

bool name_shaped(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            return false;
    return true;
}

Name atom_name(const SExprPtr& e) { return Name(e->canon, e->text, e); }

// Heads that can never start an atomic formula.
bool connective_head(const std::string& s) {
    return s == "and" || s == "or" || s == "not" || s == "imply" || s == "exists" ||
           s == "forall" || s == "when" || s == "change";
}

// (^^ e a): returns the wrapped payload and appends the annotation.
SExprPtr unwrap_advice(SExprPtr e, std::vector<SExprPtr>& advice, ParserCtx& ctx) {
    while (e && e->list && !e->items.empty() && e->items[0]->is_sym("^^")) {
        if (e->items.size() != 3) {
            ctx.diag(DiagId::MalformedAdvice, e);
            if (e->items.size() < 2) return nullptr;
        }
        if (e->items.size() >= 3) advice.push_back(e->items[2]);
        e = e->items[1];
    }
    return e;
}

std::optional<Name> expect_name(const SExprPtr& e, ParserCtx& ctx) {
    if (e->atom() && e->kind == AtomKind::Symbol && name_shaped(e->canon))
        return atom_name(e);
    ctx.diag(DiagId::NameExpected, e);
    return std::nullopt;
}

constexpr uint32_t bit(Req r) { return req_bit(r); }

}  // namespace

std::optional<Term> parse_term(const SExprPtr& raw, ParserCtx& ctx) {
    std::vector<SExprPtr> advice;
    SExprPtr e = unwrap_advice(raw, advice, ctx);
    if (!e) return std::nullopt;
    Term t;
    if (e->list) {
        ctx.diag(DiagId::TermExpected, e);
        return std::nullopt;
    }
    switch (e->kind) {
        case AtomKind::Variable:
            t.kind = Term::Kind::Variable;
            t.name = atom_name(e);
            return t;
        case AtomKind::Number:
            t.kind = Term::Kind::Number;
            t.num = e->num;
            t.name = atom_name(e);
            return t;
        case AtomKind::Symbol:
            if (!name_shaped(e->canon)) break;
            t.kind = Term::Kind::Constant;
            t.name = atom_name(e);
            return t;
        default:
            break;
    }
    ctx.diag(DiagId::TermExpected, e);
    return std::nullopt;
}

TypeExpr parse_type_expr(const SExprPtr& raw, ParserCtx& ctx) {
    std::vector<SExprPtr> advice;
    SExprPtr e = unwrap_advice(raw, advice, ctx);
    if (!e) return TypeExpr::object();
    if (e->atom()) {
        if (auto n = expect_name(e, ctx)) return TypeExpr::atom(*n);
        return TypeExpr::object();
    }
    if (!e->items.empty() && e->items[0]->is_sym("either") && e->items.size() >= 2) {
        TypeExpr t;
        t.kind = TypeExpr::Kind::Either;
        for (size_t i = 1; i < e->items.size(); i++)
            t.members.push_back(parse_type_expr(e->items[i], ctx));
        return t;
    }
    if (!e->items.empty() && e->items[0]->is_sym("fluent") && e->items.size() == 2) {
        TypeExpr t;
        t.kind = TypeExpr::Kind::Fluent;
        t.members.push_back(parse_type_expr(e->items[1], ctx));
        ctx.demand(bit(Req::Fluents), ":fluents", e);
        if (t.members[0].kind == TypeExpr::Kind::Fluent)
            ctx.diag(DiagId::NestedFluentType, e);
        return t;
    }
    ctx.diag(DiagId::MalformedExpression, e);
    return TypeExpr::object();
}

TypedList parse_typed_list(const std::vector<SExprPtr>& items, size_t begin,
                           size_t end, TypedItemKind kind, ParserCtx& ctx,
                           SExprPtr src) {
    TypedList tl;
    tl.src = std::move(src);
    TypedGroup cur;
    for (size_t i = begin; i < end; i++) {
        std::vector<SExprPtr> advice;
        SExprPtr e = unwrap_advice(items[i], advice, ctx);
        if (!e) continue;
        if (e->is_sym("-")) {
            tl.uses_minus = true;
            ctx.demand(bit(Req::Typing), ":typing", e);
            if (cur.items.empty()) {
                ctx.diag(DiagId::TypedListItem, e);
            }
            if (i + 1 >= end) {
                ctx.diag(DiagId::TypeMissingAfterMinus, e);
                break;
            }
            cur.type = parse_type_expr(items[++i], ctx);
            cur.explicit_type = true;
            if (!cur.items.empty()) tl.groups.push_back(std::move(cur));
            cur = TypedGroup{};
            continue;
        }
        bool ok = e->atom() &&
                  (kind == TypedItemKind::Variables
                       ? e->kind == AtomKind::Variable && name_shaped(e->canon.substr(1))
                       : e->kind == AtomKind::Symbol && name_shaped(e->canon));
        if (!ok) {
            ctx.diag(kind == TypedItemKind::Variables ? DiagId::VariableExpected
                                                      : DiagId::TypedListItem,
                     e);
            continue;
        }
        cur.items.push_back(atom_name(e));
    }
    if (!cur.items.empty()) tl.groups.push_back(std::move(cur));
    return tl;
}

// --- expressions -------------------------------------------------------------

ExprPtr parse_expr(const SExprPtr& raw, ParserCtx& ctx) {
    auto node = std::make_shared<Expr>();
    SExprPtr e = unwrap_advice(raw, node->advice, ctx);
    if (!e) return nullptr;
    node->src = e;
    if (e->atom()) {
        switch (e->kind) {
            case AtomKind::Number:
                node->kind = Expr::Kind::Num;
                node->num = e->num;
                return node;
            case AtomKind::Variable:
                node->kind = Expr::Kind::Var;
                node->name = atom_name(e);
                return node;
            case AtomKind::Symbol:
                if (name_shaped(e->canon)) {
                    node->kind = Expr::Kind::Ref;
                    node->name = atom_name(e);
                    return node;
                }
                break;
            default:
                break;
        }
        ctx.diag(DiagId::MalformedExpression, e);
        return nullptr;
    }
    if (e->items.empty() || !e->items[0]->atom()) {
        ctx.diag(DiagId::MalformedExpression, e);
        return nullptr;
    }
    const std::string& head = e->items[0]->canon;
    if (head == "+" || head == "-" || head == "*" || head == "/" || head == "=" ||
        head == "<" || head == ">" || head == "<=" || head == ">=") {
        if (e->items.size() < 2) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->kind = Expr::Kind::Apply;
        node->op = atom_name(e->items[0]);
        for (size_t i = 1; i < e->items.size(); i++)
            if (auto a = parse_expr(e->items[i], ctx)) node->args.push_back(a);
        return node;
    }
    if (head == "sum") {
        // (sum (<typed list(variable)>) <GD> <expression>)
        if (e->items.size() != 4 || !e->items[1]->list) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        ctx.demand(bit(Req::Fluents), ":fluents", e);
        node->kind = Expr::Kind::Sum;
        node->sum_vars = parse_typed_list(e->items[1]->items, 0, e->items[1]->items.size(),
                                          TypedItemKind::Variables, ctx, e->items[1]);
        node->sum_cond = parse_gd(e->items[2], ctx);
        node->sum_body = parse_expr(e->items[3], ctx);
        return node;
    }
    ctx.diag(DiagId::MalformedExpression, e);
    return nullptr;
}

// --- goal descriptions -------------------------------------------------------

namespace {

bool eval_builtin_head(const std::string& head) {
    return head == "eval" || head == "test" || head == "bounded-int" ||
           head == "equation";
}
bool fluent_builtin_head(const std::string& head) {
    return head == "fluent-eval" || head == "fluent-test" || head == "current-value";
}

GdPtr parse_atomic_gd(const SExprPtr& e, std::shared_ptr<Gd> node, ParserCtx& ctx) {
    // e is a nonempty list whose head is an atom.
    const SExprPtr& head = e->items[0];
    node->kind = Gd::Kind::Atom;
    node->src = e;
    if (head->is_sym("=")) {
        node->pred = atom_name(head);
        ctx.demand(bit(Req::Equality), ":equality", e);
    } else if (head->kind == AtomKind::Symbol && name_shaped(head->canon)) {
        node->pred = atom_name(head);
    } else {
        ctx.diag(DiagId::NameExpected, head);
        return nullptr;
    }
    for (size_t i = 1; i < e->items.size(); i++)
        if (auto t = parse_term(e->items[i], ctx)) node->args.push_back(*t);
    return node;
}

}  // namespace

GdPtr parse_gd(const SExprPtr& raw, ParserCtx& ctx) {
    auto node = std::make_shared<Gd>();
    SExprPtr e = unwrap_advice(raw, node->advice, ctx);
    if (!e) return nullptr;
    node->src = e;
    if (e->atom()) {
        ctx.diag(DiagId::MalformedExpression, e);
        return nullptr;
    }
    if (e->items.empty()) {
        ctx.diag(DiagId::EmptyExpression, e);
        return nullptr;
    }
    if (!e->items[0]->atom()) {
        ctx.diag(DiagId::MalformedExpression, e->items[0]);
        return nullptr;
    }
    const std::string& head = e->items[0]->canon;
    auto children = [&](size_t from) {
        for (size_t i = from; i < e->items.size(); i++)
            if (auto c = parse_gd(e->items[i], ctx)) node->children.push_back(c);
    };
    if (head == "and") {
        node->kind = Gd::Kind::And;
        children(1);
        return node;
    }
    if (head == "or") {
        node->kind = Gd::Kind::Or;
        ctx.demand(bit(Req::DisjunctivePreconditions), ":disjunctive-preconditions", e);
        children(1);
        return node;
    }
    if (head == "imply") {
        node->kind = Gd::Kind::Imply;
        ctx.demand(bit(Req::DisjunctivePreconditions), ":disjunctive-preconditions", e);
        if (e->items.size() != 3) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        children(1);
        return node;
    }
    if (head == "not") {
        node->kind = Gd::Kind::Not;
        if (e->items.size() != 2) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        children(1);
        // A negated atomic formula is a literal; anything else is general
        // negation and needs :disjunctive-preconditions.
        if (!(node->children.size() == 1 &&
              node->children[0]->kind == Gd::Kind::Atom))
            ctx.demand(bit(Req::DisjunctivePreconditions),
                       ":disjunctive-preconditions", e);
        return node;
    }
    if (head == "exists" || head == "forall") {
        node->kind = head == "exists" ? Gd::Kind::Exists : Gd::Kind::Forall;
        ctx.demand(head == "exists" ? bit(Req::ExistentialPreconditions)
                                    : bit(Req::UniversalPreconditions),
                   head == "exists" ? ":existential-preconditions"
                                    : ":universal-preconditions",
                   e);
        if (e->items.size() != 3 || !e->items[1]->list) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->vars = parse_typed_list(e->items[1]->items, 0, e->items[1]->items.size(),
                                      TypedItemKind::Variables, ctx, e->items[1]);
        children(2);
        return node;
    }
    if (eval_builtin_head(head) || fluent_builtin_head(head)) {
        node->kind = Gd::Kind::Builtin;
        node->pred = atom_name(e->items[0]);
        ctx.demand(eval_builtin_head(head) ? bit(Req::ExpressionEvaluation)
                                           : bit(Req::Fluents),
                   eval_builtin_head(head) ? ":expression-evaluation" : ":fluents", e);
        for (size_t i = 1; i < e->items.size(); i++)
            if (auto a = parse_expr(e->items[i], ctx)) node->eargs.push_back(a);
        return node;
    }
    return parse_atomic_gd(e, node, ctx);
}

// --- effects -----------------------------------------------------------------

EffectPtr parse_effect(const SExprPtr& raw, ParserCtx& ctx) {
    auto node = std::make_shared<Effect>();
    SExprPtr e = unwrap_advice(raw, node->advice, ctx);
    if (!e) return nullptr;
    node->src = e;
    if (e->atom() || e->items.empty() || !e->items[0]->atom()) {
        ctx.diag(e && e->list && e->items.empty() ? DiagId::EmptyExpression
                                                  : DiagId::MalformedExpression,
                 e);
        return nullptr;
    }
    const std::string& head = e->items[0]->canon;
    if (head == "and") {
        node->kind = Effect::Kind::And;
        for (size_t i = 1; i < e->items.size(); i++)
            if (auto c = parse_effect(e->items[i], ctx)) node->children.push_back(c);
        return node;
    }
    if (head == "forall") {
        node->kind = Effect::Kind::Forall;
        ctx.demand(bit(Req::ConditionalEffects), ":conditional-effects", e);
        if (e->items.size() != 3 || !e->items[1]->list) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->vars = parse_typed_list(e->items[1]->items, 0, e->items[1]->items.size(),
                                      TypedItemKind::Variables, ctx, e->items[1]);
        if (auto c = parse_effect(e->items[2], ctx)) node->children.push_back(c);
        return node;
    }
    if (head == "when") {
        node->kind = Effect::Kind::When;
        ctx.demand(bit(Req::ConditionalEffects), ":conditional-effects", e);
        if (e->items.size() != 3) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->cond = parse_gd(e->items[1], ctx);
        if (auto c = parse_effect(e->items[2], ctx)) node->children.push_back(c);
        return node;
    }
    if (head == "change") {
        node->kind = Effect::Kind::Change;
        ctx.demand(bit(Req::Fluents), ":fluents", e);
        if (e->items.size() != 3) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        if (auto t = parse_term(e->items[1], ctx)) node->fluent = *t;
        node->expr = parse_expr(e->items[2], ctx);
        return node;
    }
    if (head == "or" || head == "imply" || head == "exists") {
        ctx.diag(DiagId::NotAllowedInEffect, e);
        return nullptr;
    }
    if (head == "not") {
        node->kind = Effect::Kind::Del;
        if (e->items.size() != 2 || !e->items[1]->list) {
            ctx.diag(DiagId::LiteralRequired, e);
            return nullptr;
        }
        std::vector<SExprPtr> advice;
        SExprPtr inner = unwrap_advice(e->items[1], advice, ctx);
        node->advice.insert(node->advice.end(), advice.begin(), advice.end());
        if (!inner || !inner->list || inner->items.empty() || !inner->items[0]->atom() ||
            !name_shaped(inner->items[0]->canon) ||
            connective_head(inner->items[0]->canon)) {
            ctx.diag(DiagId::LiteralRequired, e);
            return nullptr;
        }
        node->pred = atom_name(inner->items[0]);
        for (size_t i = 1; i < inner->items.size(); i++)
            if (auto t = parse_term(inner->items[i], ctx)) node->args.push_back(*t);
        return node;
    }
    // Plain atomic formula: an added atom.
    if (!(e->items[0]->kind == AtomKind::Symbol && name_shaped(head))) {
        ctx.diag(DiagId::NameExpected, e->items[0]);
        return nullptr;
    }
    node->kind = Effect::Kind::Add;
    node->pred = atom_name(e->items[0]);
    for (size_t i = 1; i < e->items.size(); i++)
        if (auto t = parse_term(e->items[i], ctx)) node->args.push_back(*t);
    return node;
}

// --- action specs ------------------------------------------------------------

namespace {

// Recognizes (< name) / (> name); returns nullopt otherwise.
std::optional<LabelTerm> parse_label_form(const SExprPtr& e, ParserCtx& ctx) {
    if (e->atom()) {
        if (e->kind == AtomKind::Symbol && name_shaped(e->canon)) {
            LabelTerm lt;
            lt.label = atom_name(e);
            lt.qual = LabelTerm::Qual::Whole;
            lt.src = e;
            return lt;
        }
        return std::nullopt;
    }
    if (e->items.size() == 2 && e->items[0]->atom() &&
        (e->items[0]->canon == "<" || e->items[0]->canon == ">")) {
        LabelTerm lt;
        lt.qual = e->items[0]->canon == "<" ? LabelTerm::Qual::Begin
                                            : LabelTerm::Qual::End;
        lt.src = e;
        if (auto n = expect_name(e->items[1], ctx)) {
            lt.label = *n;
            return lt;
        }
    }
    return std::nullopt;
}

// Keyword fields of an action-def body usable inside in-context.
void parse_spec_conds(const SExprPtr& e, size_t from, SpecConds& out, ParserCtx& ctx);

}  // namespace

SpecPtr parse_action_spec(const SExprPtr& raw, ParserCtx& ctx, bool constraint_pos) {
    auto node = std::make_shared<Spec>();
    SExprPtr e = unwrap_advice(raw, node->advice, ctx);
    if (!e) return nullptr;
    node->src = e;
    if (e->atom()) {
        if (constraint_pos && e->kind == AtomKind::Symbol && name_shaped(e->canon)) {
            node->kind = Spec::Kind::LabelRef;
            node->functor = atom_name(e);
            return node;
        }
        ctx.diag(DiagId::ActionSpecExpected, e);
        return nullptr;
    }
    if (e->items.empty() || !e->items[0]->atom()) {
        ctx.diag(e->items.empty() ? DiagId::EmptyExpression : DiagId::ActionSpecExpected, e);
        return nullptr;
    }
    const std::string& head = e->items[0]->canon;
    auto child_specs = [&](size_t from) {
        for (size_t i = from; i < e->items.size(); i++)
            if (auto c = parse_action_spec(e->items[i], ctx, constraint_pos))
                node->children.push_back(c);
    };
    if (head == "choice") {
        node->kind = Spec::Kind::Choice;
        child_specs(1);
        return node;
    }
    if (head == "series") {
        node->kind = Spec::Kind::Series;
        child_specs(1);
        return node;
    }
    if (head == "parallel") {
        node->kind = Spec::Kind::Parallel;
        child_specs(1);
        return node;
    }
    if (head == "forsome") {
        node->kind = Spec::Kind::Forsome;
        if (e->items.size() != 3 || !e->items[1]->list) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->vars = parse_typed_list(e->items[1]->items, 0, e->items[1]->items.size(),
                                      TypedItemKind::Variables, ctx, e->items[1]);
        child_specs(2);
        return node;
    }
    if (head == "foreach") {
        node->kind = Spec::Kind::Foreach;
        ctx.demand(bit(Req::ForeachExpansions), ":foreach-expansions", e);
        if (e->items.size() != 4 || !e->items[1]->list) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->vars = parse_typed_list(e->items[1]->items, 0, e->items[1]->items.size(),
                                      TypedItemKind::Variables, ctx, e->items[1]);
        node->cond = parse_gd(e->items[2], ctx);
        child_specs(3);
        return node;
    }
    if (head == "in-context") {
        node->kind = Spec::Kind::InContext;
        if (e->items.size() < 2) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        if (auto c = parse_action_spec(e->items[1], ctx, constraint_pos))
            node->children.push_back(c);
        parse_spec_conds(e, 2, node->conds, ctx);
        return node;
    }
    if (head == "tag") {
        node->kind = Spec::Kind::Tag;
        // Locate the child spec: the first element that is not label-shaped,
        // or failing that the first bare name (the classical listings write
        // (tag A (> end-a)) meaning a no-argument action A).
        auto label_shape = [](const SExprPtr& it) {
            if (it->atom())
                return it->kind == AtomKind::Symbol && name_shaped(it->canon);
            return it->items.size() == 2 && it->items[0]->atom() &&
                   (it->items[0]->canon == "<" || it->items[0]->canon == ">");
        };
        size_t spec_idx = 0;
        for (size_t i = 1; i < e->items.size(); i++)
            if (!label_shape(e->items[i])) {
                spec_idx = i;
                break;
            }
        if (!spec_idx)
            for (size_t i = 1; i < e->items.size(); i++)
                if (e->items[i]->atom()) {
                    spec_idx = i;
                    break;
                }
        if (!spec_idx) {
            ctx.diag(DiagId::ActionSpecExpected, e);
            return nullptr;
        }
        for (size_t i = 1; i < e->items.size(); i++) {
            const SExprPtr& it = e->items[i];
            if (i == spec_idx) {
                SpecPtr child;
                if (it->atom()) {
                    auto at = std::make_shared<Spec>();
                    at->kind = Spec::Kind::ActionTerm;
                    at->functor = atom_name(it);
                    at->src = it;
                    child = at;
                } else {
                    child = parse_action_spec(it, ctx, constraint_pos);
                }
                if (child) node->children.push_back(child);
                continue;
            }
            if (auto lt = parse_label_form(it, ctx))
                (i < spec_idx ? node->pre_labels : node->post_labels).push_back(*lt);
            else
                ctx.diag(DiagId::MalformedExpression, it);
        }
        if (node->children.empty()) return nullptr;
        return node;
    }
    if (head == "constrained") {
        node->kind = Spec::Kind::Constrained;
        ctx.demand(bit(Req::DagExpansions), ":dag-expansions", e);
        if (e->items.size() < 2 || !e->items[1]->list || e->items[1]->items.empty()) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        const SExprPtr& group = e->items[1];
        if (group->items[0]->list) {
            for (const auto& g : group->items)
                if (auto c = parse_action_spec(g, ctx, false))
                    node->children.push_back(c);
        } else if (auto c = parse_action_spec(group, ctx, false)) {
            node->children.push_back(c);
        }
        for (size_t i = 2; i < e->items.size(); i++)
            if (auto c = parse_action_spec(e->items[i], ctx, true))
                node->constraints.push_back(c);
        return node;
    }
    if (head == "achieve") {
        // (achieve P) is shorthand for (in-context (--) :precondition P).
        if (e->items.size() != 2) {
            ctx.diag(DiagId::MalformedExpression, e);
            return nullptr;
        }
        node->kind = Spec::Kind::InContext;
        auto noop = std::make_shared<Spec>();
        noop->kind = Spec::Kind::ActionTerm;
        noop->functor = Name("--", "--", e->items[0]);
        noop->src = e->items[0];
        node->children.push_back(noop);
        node->conds.precondition = parse_gd(e->items[1], ctx);
        return node;
    }
    if (head == "--") {
        node->kind = Spec::Kind::ActionTerm;
        node->functor = atom_name(e->items[0]);
        if (e->items.size() != 1) ctx.diag(DiagId::NoArgumentsAllowed, e);
        return node;
    }
    // Plain action term.
    if (!(e->items[0]->kind == AtomKind::Symbol && name_shaped(head))) {
        ctx.diag(DiagId::ActionSpecExpected, e);
        return nullptr;
    }
    node->kind = Spec::Kind::ActionTerm;
    node->functor = atom_name(e->items[0]);
    for (size_t i = 1; i < e->items.size(); i++)
        if (auto t = parse_term(e->items[i], ctx)) node->args.push_back(*t);
    return node;
}

// --- action-def bodies -------------------------------------------------------

namespace {

struct BodyField {
    const char* key;
    int rank;
};

// Canonical order of action-def body fields, used under strict mode.
const BodyField kBodyFields[] = {
    {":vars", 1},      {":precondition", 2}, {":expansion", 3},
    {":maintain", 4},  {":effect", 5},       {":only-in-expansions", 6},
};

int body_rank(const std::string& key) {
    for (const auto& f : kBodyFields)
        if (key == f.key) return f.rank;
    return -1;
}

// Parses keyword/value fields of an action-def body starting at items[from].
// `allow` restricts which fields are legal in this position (e.g. methods may
// not carry :effect).  Returns true if :parameters was seen (callers that
// require it check the flag).
struct BodyParse {
    TypedList params;
    bool params_present = false;
    ActionDefBody body;
};

void body_fields(const SExprPtr& e, size_t from, BodyParse& out, ParserCtx& ctx,
                 bool allow_params, bool method_restrictions) {
    int max_rank = 0;
    std::unordered_set<std::string> seen;
    size_t i = from;
    auto next_value = [&](const char* /*key*/) -> SExprPtr {
        if (i < e->items.size() && !(e->items[i]->atom() &&
                                     e->items[i]->kind == AtomKind::Keyword))
            return e->items[i++];
        return nullptr;
    };
    while (i < e->items.size()) {
        const SExprPtr& kw = e->items[i];
        if (!(kw->atom() && kw->kind == AtomKind::Keyword)) {
            ctx.diag(DiagId::MalformedField, kw);
            i++;
            continue;
        }
        std::string key = kw->canon;
        i++;
        int rank = key == ":parameters" ? 0 : body_rank(key);
        if (rank < 0) {
            ctx.diag(DiagId::UnknownField, kw);
            while (i < e->items.size() && !(e->items[i]->atom() &&
                                            e->items[i]->kind == AtomKind::Keyword))
                i++;
            continue;
        }
        if (!seen.insert(key).second) ctx.diag(DiagId::DuplicateField, kw);
        if (ctx.strict && rank < max_rank) ctx.diag(DiagId::FieldOutOfOrder, kw);
        max_rank = std::max(max_rank, rank);
        if (key == ":parameters") {
            SExprPtr v = next_value(":parameters");
            if (!allow_params) {
                ctx.diag(DiagId::UnknownField, kw);
                continue;
            }
            out.params_present = true;
            if (v && v->list)
                out.params = parse_typed_list(v->items, 0, v->items.size(),
                                              TypedItemKind::Variables, ctx, v);
            else
                ctx.diag(DiagId::MalformedField, v ? v : kw);
        } else if (key == ":vars") {
            SExprPtr v = next_value(":vars");
            if (v && v->list) {
                out.body.vars = parse_typed_list(v->items, 0, v->items.size(),
                                                 TypedItemKind::Variables, ctx, v);
                ctx.demand(bit(Req::ExistentialPreconditions) |
                               bit(Req::ConditionalEffects),
                           ":existential-preconditions or :conditional-effects", v,
                           /*warn_only=*/true);
            } else {
                ctx.diag(DiagId::MalformedField, v ? v : kw);
            }
        } else if (key == ":precondition") {
            if (SExprPtr v = next_value(":precondition"))
                out.body.precondition = parse_gd(v, ctx);
            else
                ctx.diag(DiagId::MalformedField, kw);
        } else if (key == ":expansion") {
            ctx.demand(bit(Req::ActionExpansions), ":action-expansions", kw);
            // ":methods" is a keyword, so grab it before next_value skips it.
            if (i < e->items.size() && e->items[i]->atom() &&
                e->items[i]->canon == ":methods") {
                out.body.methods_placeholder = true;
                i++;
            } else if (SExprPtr v = next_value(":expansion")) {
                out.body.expansion = parse_action_spec(v, ctx);
            } else {
                ctx.diag(DiagId::MalformedField, kw);
            }
        } else if (key == ":maintain") {
            ctx.demand(bit(Req::ActionExpansions), ":action-expansions", kw);
            if (SExprPtr v = next_value(":maintain"))
                out.body.maintain = parse_gd(v, ctx);
            else
                ctx.diag(DiagId::MalformedField, kw);
        } else if (key == ":effect") {
            SExprPtr v = next_value(":effect");
            if (method_restrictions) {
                ctx.diag(DiagId::EffectInMethod, kw);
                continue;
            }
            if (v)
                out.body.effect = parse_effect(v, ctx);
            else
                ctx.diag(DiagId::MalformedField, kw);
        } else if (key == ":only-in-expansions") {
            ctx.demand(bit(Req::ActionExpansions), ":action-expansions", kw);
            SExprPtr v = next_value(":only-in-expansions");
            if (method_restrictions) {
                ctx.diag(DiagId::OnlyInExpansionsInMethod, kw);
                continue;
            }
            if (v && v->is_sym("t"))
                out.body.only_in_expansions = true;
            else if (v && v->is_sym("nil"))
                out.body.only_in_expansions = false;
            else
                ctx.diag(DiagId::BooleanExpected, v ? v : kw);
        }
    }
    if (out.body.effect && (out.body.expansion || out.body.methods_placeholder))
        ctx.diag(DiagId::EffectAndExpansion, e);
}

void parse_spec_conds_impl(const SExprPtr& e, size_t from, SpecConds& out,
                           ParserCtx& ctx) {
    BodyParse bp;
    body_fields(e, from, bp, ctx, /*allow_params=*/false, /*method_restrictions=*/false);
    out.vars = bp.body.vars;
    out.precondition = bp.body.precondition;
    out.maintain = bp.body.maintain;
    out.effect = bp.body.effect;
    if (bp.body.expansion || bp.body.methods_placeholder)
        ctx.diag(DiagId::UnknownField, e);
}

void parse_spec_conds(const SExprPtr& e, size_t from, SpecConds& out, ParserCtx& ctx) {
    parse_spec_conds_impl(e, from, out, ctx);
}

}  // namespace

// --- definitions -------------------------------------------------------------

namespace {

std::optional<GroundLiteralAst> parse_ground_literal(const SExprPtr& raw, ParserCtx& ctx) {
    std::vector<SExprPtr> advice;
    SExprPtr e = unwrap_advice(raw, advice, ctx);
    if (!e) return std::nullopt;
    GroundLiteralAst lit;
    lit.src = e;
    SExprPtr atom = e;
    if (e->list && !e->items.empty() && e->items[0]->is_sym("not")) {
        if (e->items.size() != 2) {
            ctx.diag(DiagId::LiteralRequired, e);
            return std::nullopt;
        }
        lit.positive = false;
        atom = unwrap_advice(e->items[1], advice, ctx);
    }
    if (!atom || !atom->list || atom->items.empty() || !atom->items[0]->atom() ||
        !name_shaped(atom->items[0]->canon)) {
        ctx.diag(DiagId::LiteralRequired, e);
        return std::nullopt;
    }
    lit.pred = atom_name(atom->items[0]);
    for (size_t i = 1; i < atom->items.size(); i++) {
        auto t = parse_term(atom->items[i], ctx);
        if (!t) continue;
        if (t->is_var()) {
            ctx.diag(DiagId::TermExpected, atom->items[i], "(ground term required)");
            continue;
        }
        lit.args.push_back(*t);
    }
    return lit;
}

struct FieldCursor {
    int max_rank = 0;
    std::unordered_set<std::string> seen;

    // Returns false if this is an unwanted duplicate.
    bool note(const std::string& key, int rank, bool repeatable, const SExprPtr& kw,
              ParserCtx& ctx) {
        if (!repeatable && !seen.insert(key).second) {
            ctx.diag(DiagId::DuplicateField, kw);
            return false;
        }
        if (ctx.strict && rank < max_rank) ctx.diag(DiagId::FieldOutOfOrder, kw);
        max_rank = std::max(max_rank, rank);
        return true;
    }
};

ActionDef parse_action_def(const SExprPtr& e, ParserCtx& ctx) {
    ActionDef def;
    def.src = e;
    if (e->items.size() >= 2) {
        if (auto n = expect_name(e->items[1], ctx)) def.functor = *n;
    } else {
        ctx.diag(DiagId::MalformedDefinition, e);
    }
    BodyParse bp;
    body_fields(e, 2, bp, ctx, /*allow_params=*/true, /*method_restrictions=*/false);
    def.params = bp.params;
    def.params_present = bp.params_present;
    def.body = bp.body;
    if (!def.params_present) ctx.diag(DiagId::MissingParameters, e);
    return def;
}

MethodDef parse_method_def(const SExprPtr& e, ParserCtx& ctx) {
    MethodDef def;
    def.src = e;
    ctx.demand(bit(Req::ActionExpansions), ":action-expansions", e);
    size_t i = 1;
    if (i < e->items.size()) {
        if (auto n = expect_name(e->items[i], ctx)) def.action = *n;
        i++;
    } else {
        ctx.diag(DiagId::MalformedDefinition, e);
    }
    if (i + 1 < e->items.size() && e->items[i]->atom() &&
        e->items[i]->canon == ":name") {
        if (auto n = expect_name(e->items[i + 1], ctx)) def.method_name = *n;
        i += 2;
    }
    BodyParse bp;
    body_fields(e, i, bp, ctx, /*allow_params=*/true, /*method_restrictions=*/true);
    def.params = bp.params;
    def.params_present = bp.params_present;
    def.body = bp.body;
    return def;
}

AxiomDefAst parse_axiom_def(const SExprPtr& e, ParserCtx& ctx) {
    AxiomDefAst def;
    def.src = e;
    ctx.demand(bit(Req::DomainAxioms), ":domain-axioms", e);
    size_t i = 1;
    while (i < e->items.size()) {
        const SExprPtr& kw = e->items[i];
        if (!(kw->atom() && kw->kind == AtomKind::Keyword)) {
            ctx.diag(DiagId::MalformedField, kw);
            i++;
            continue;
        }
        std::string key = kw->canon;
        SExprPtr v = (i + 1 < e->items.size()) ? e->items[i + 1] : nullptr;
        i += 2;
        if (key == ":vars") {
            if (v && v->list)
                def.vars = parse_typed_list(v->items, 0, v->items.size(),
                                            TypedItemKind::Variables, ctx, v);
            else
                ctx.diag(DiagId::MalformedField, kw);
        } else if (key == ":context") {
            if (v)
                def.context = parse_gd(v, ctx);
            else
                ctx.diag(DiagId::MalformedField, kw);
        } else if (key == ":implies") {
            if (!v) {
                ctx.diag(DiagId::MalformedField, kw);
                continue;
            }
            std::vector<SExprPtr> advice;
            SExprPtr lit = unwrap_advice(v, advice, ctx);
            if (lit && lit->list && !lit->items.empty() && lit->items[0]->is_sym("not") &&
                lit->items.size() == 2) {
                def.implies_positive = false;
                lit = unwrap_advice(lit->items[1], advice, ctx);
            }
            if (lit && lit->list && !lit->items.empty() &&
                name_shaped(lit->items[0]->canon)) {
                def.implies_pred = atom_name(lit->items[0]);
                for (size_t k = 1; k < lit->items.size(); k++)
                    if (auto t = parse_term(lit->items[k], ctx))
                        def.implies_args.push_back(*t);
            } else {
                ctx.diag(DiagId::LiteralRequired, v);
            }
        } else {
            ctx.diag(DiagId::UnknownField, kw);
            i--;  // value not consumed
        }
    }
    return def;
}

std::vector<DomainVarDecl> parse_domain_vars(const SExprPtr& field, ParserCtx& ctx) {
    // Typed list whose items are <name> or (<name> <number>).
    std::vector<DomainVarDecl> out;
    std::vector<size_t> group_start;  // indexes into `out` awaiting a type
    size_t open = 0;
    for (size_t i = 1; i < field->items.size(); i++) {
        std::vector<SExprPtr> advice;
        SExprPtr e = unwrap_advice(field->items[i], advice, ctx);
        if (!e) continue;
        if (e->is_sym("-")) {
            ctx.demand(bit(Req::Typing), ":typing", e);
            if (i + 1 >= field->items.size()) {
                ctx.diag(DiagId::TypeMissingAfterMinus, e);
                break;
            }
            TypeExpr t = parse_type_expr(field->items[++i], ctx);
            for (size_t k = open; k < out.size(); k++) out[k].type = t;
            open = out.size();
            continue;
        }
        DomainVarDecl d;
        d.src = e;
        if (e->atom()) {
            if (auto n = expect_name(e, ctx))
                d.name = *n;
            else
                continue;
        } else if (e->items.size() == 2 && e->items[0]->atom()) {
            auto n = expect_name(e->items[0], ctx);
            if (!n) continue;
            d.name = *n;
            if (e->items[1]->atom() && e->items[1]->kind == AtomKind::Number)
                d.initial = e->items[1]->num;
            else
                ctx.diag(DiagId::NumericInitialExpected, e->items[1]);
        } else {
            ctx.diag(DiagId::TypedListItem, e);
            continue;
        }
        out.push_back(std::move(d));
    }
    return out;
}

Definition parse_domain(const SExprPtr& e, const Name& name, ParserCtx& ctx) {
    DomainDef def;
    def.name = name;
    def.src = e;
    FieldCursor cursor;
    for (size_t i = 2; i < e->items.size(); i++) {
        const SExprPtr& f = e->items[i];
        if (f->synthetic) continue;
        if (!f->list || f->items.empty() || !f->items[0]->atom()) {
            ctx.diag(DiagId::MalformedField, f);
            continue;
        }
        const SExprPtr& kw = f->items[0];
        const std::string& key = kw->canon;
        if (key == ":extends") {
            if (!cursor.note(key, 0, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto n = expect_name(f->items[k], ctx)) def.extends.push_back(*n);
        } else if (key == ":requirements") {
            if (!cursor.note(key, 1, false, kw, ctx)) continue;
            def.requirements_present = true;
            for (size_t k = 1; k < f->items.size(); k++) {
                const SExprPtr& flag = f->items[k];
                if (flag->atom() && flag->kind == AtomKind::Keyword) {
                    if (!req_from_name(flag->canon))
                        ctx.diag(DiagId::UnknownRequirement, flag);
                    def.requirements.push_back(atom_name(flag));
                } else {
                    ctx.diag(DiagId::MalformedField, flag);
                }
            }
        } else if (key == ":types") {
            if (!cursor.note(key, 2, false, kw, ctx)) continue;
            ctx.demand(bit(Req::Typing), ":typing", f);
            def.types = parse_typed_list(f->items, 1, f->items.size(),
                                         TypedItemKind::Names, ctx, f);
        } else if (key == ":constants") {
            if (!cursor.note(key, 3, false, kw, ctx)) continue;
            def.constants = parse_typed_list(f->items, 1, f->items.size(),
                                             TypedItemKind::Names, ctx, f);
        } else if (key == ":domain-variables") {
            if (!cursor.note(key, 4, false, kw, ctx)) continue;
            ctx.demand(bit(Req::ExpressionEvaluation), ":expression-evaluation", f);
            def.domain_vars = parse_domain_vars(f, ctx);
        } else if (key == ":predicates") {
            if (!cursor.note(key, 5, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++) {
                std::vector<SExprPtr> advice;
                SExprPtr p = unwrap_advice(f->items[k], advice, ctx);
                if (!p) continue;
                if (!p->list || p->items.empty() || !p->items[0]->atom() ||
                    !name_shaped(p->items[0]->canon)) {
                    ctx.diag(DiagId::MalformedField, p);
                    continue;
                }
                PredicateDecl decl;
                decl.name = atom_name(p->items[0]);
                decl.src = p;
                decl.params = parse_typed_list(p->items, 1, p->items.size(),
                                               TypedItemKind::Variables, ctx, p);
                def.predicates.push_back(std::move(decl));
            }
        } else if (key == ":timeless") {
            if (!cursor.note(key, 6, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto lit = parse_ground_literal(f->items[k], ctx))
                    def.timeless.push_back(std::move(*lit));
        } else if (key == ":safety") {
            if (!cursor.note(key, 7, false, kw, ctx)) continue;
            ctx.demand(bit(Req::SafetyConstraints), ":safety-constraints", f);
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto g = parse_gd(f->items[k], ctx)) def.safety.push_back(g);
        } else if (key == ":action") {
            cursor.note(key, 8, true, kw, ctx);
            def.actions.push_back(parse_action_def(f, ctx));
        } else if (key == ":axiom") {
            cursor.note(key, 8, true, kw, ctx);
            def.axioms.push_back(parse_axiom_def(f, ctx));
        } else if (key == ":method") {
            cursor.note(key, 8, true, kw, ctx);
            def.methods.push_back(parse_method_def(f, ctx));
        } else {
            ctx.diag(DiagId::UnknownField, f);
        }
    }
    return def;
}

Definition parse_problem(const SExprPtr& e, const Name& name, ParserCtx& ctx) {
    ProblemDef def;
    def.name = name;
    def.src = e;
    FieldCursor cursor;
    for (size_t i = 2; i < e->items.size(); i++) {
        const SExprPtr& f = e->items[i];
        if (f->synthetic) continue;
        if (!f->list || f->items.empty() || !f->items[0]->atom()) {
            ctx.diag(DiagId::MalformedField, f);
            continue;
        }
        const SExprPtr& kw = f->items[0];
        const std::string& key = kw->canon;
        if (key == ":domain") {
            if (!cursor.note(key, 0, false, kw, ctx)) continue;
            if (f->items.size() == 2) {
                if (auto n = expect_name(f->items[1], ctx)) def.domain = *n;
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":requirements") {
            if (!cursor.note(key, 1, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++) {
                const SExprPtr& flag = f->items[k];
                if (flag->atom() && flag->kind == AtomKind::Keyword) {
                    if (!req_from_name(flag->canon))
                        ctx.diag(DiagId::UnknownRequirement, flag);
                    def.requirements.push_back(atom_name(flag));
                } else {
                    ctx.diag(DiagId::MalformedField, flag);
                }
            }
        } else if (key == ":situation") {
            if (!cursor.note(key, 2, false, kw, ctx)) continue;
            if (f->items.size() == 2) {
                if (auto n = expect_name(f->items[1], ctx)) def.situation = *n;
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":objects") {
            if (!cursor.note(key, 3, false, kw, ctx)) continue;
            def.objects = parse_typed_list(f->items, 1, f->items.size(),
                                           TypedItemKind::Names, ctx, f);
        } else if (key == ":init") {
            if (!cursor.note(key, 4, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto lit = parse_ground_literal(f->items[k], ctx))
                    def.init.push_back(std::move(*lit));
        } else if (key == ":goal") {
            cursor.note(key, 5, true, kw, ctx);
            if (f->items.size() == 2) {
                if (auto g = parse_gd(f->items[1], ctx)) def.goals.push_back(g);
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":expansion") {
            cursor.note(key, 5, true, kw, ctx);
            ctx.demand(bit(Req::ActionExpansions), ":action-expansions", f);
            if (f->items.size() == 2) {
                if (auto s = parse_action_spec(f->items[1], ctx))
                    def.expansions.push_back(s);
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":length") {
            if (!cursor.note(key, 6, false, kw, ctx)) continue;
            LengthSpec ls;
            for (size_t k = 1; k < f->items.size(); k++) {
                const SExprPtr& spec = f->items[k];
                if (spec->list && spec->items.size() == 2 && spec->items[0]->atom() &&
                    spec->items[1]->atom() &&
                    spec->items[1]->kind == AtomKind::Number &&
                    spec->items[1]->num.is_int()) {
                    if (spec->items[0]->canon == ":serial") {
                        ls.serial = spec->items[1]->num.i;
                        continue;
                    }
                    if (spec->items[0]->canon == ":parallel") {
                        ls.parallel = spec->items[1]->num.i;
                        continue;
                    }
                }
                ctx.diag(DiagId::MalformedField, spec);
            }
            def.length = ls;
        } else {
            ctx.diag(DiagId::UnknownField, f);
        }
    }
    if (def.domain.empty())
        ctx.diag(DiagId::MalformedDefinition, e, "(missing :domain)");
    if (def.goals.empty() && def.expansions.empty())
        ctx.diag(DiagId::GoalRequired, e);
    return def;
}

Definition parse_situation(const SExprPtr& e, const Name& name, ParserCtx& ctx) {
    SituationDef def;
    def.name = name;
    def.src = e;
    FieldCursor cursor;
    for (size_t i = 2; i < e->items.size(); i++) {
        const SExprPtr& f = e->items[i];
        if (f->synthetic) continue;
        if (!f->list || f->items.empty() || !f->items[0]->atom()) {
            ctx.diag(DiagId::MalformedField, f);
            continue;
        }
        const SExprPtr& kw = f->items[0];
        const std::string& key = kw->canon;
        if (key == ":domain") {
            if (!cursor.note(key, 0, false, kw, ctx)) continue;
            if (f->items.size() == 2) {
                if (auto n = expect_name(f->items[1], ctx)) def.domain = *n;
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":objects") {
            if (!cursor.note(key, 1, false, kw, ctx)) continue;
            def.objects = parse_typed_list(f->items, 1, f->items.size(),
                                           TypedItemKind::Names, ctx, f);
        } else if (key == ":init") {
            if (!cursor.note(key, 2, false, kw, ctx)) continue;
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto lit = parse_ground_literal(f->items[k], ctx))
                    def.init.push_back(std::move(*lit));
        } else {
            ctx.diag(DiagId::UnknownField, f);
        }
    }
    if (def.domain.empty())
        ctx.diag(DiagId::MalformedDefinition, e, "(missing :domain)");
    return def;
}

Definition parse_addendum(const SExprPtr& e, const Name& name, ParserCtx& ctx) {
    AddendumDef def;
    def.name = name;
    def.src = e;
    FieldCursor cursor;
    for (size_t i = 2; i < e->items.size(); i++) {
        const SExprPtr& f = e->items[i];
        if (f->synthetic) continue;
        if (!f->list || f->items.empty() || !f->items[0]->atom()) {
            ctx.diag(DiagId::MalformedField, f);
            continue;
        }
        const SExprPtr& kw = f->items[0];
        const std::string& key = kw->canon;
        if (key == ":domain") {
            if (!cursor.note(key, 0, false, kw, ctx)) continue;
            if (f->items.size() == 2) {
                if (auto n = expect_name(f->items[1], ctx)) def.domain = *n;
            } else {
                ctx.diag(DiagId::MalformedField, f);
            }
        } else if (key == ":action") {
            cursor.note(key, 1, true, kw, ctx);
            def.actions.push_back(parse_action_def(f, ctx));
        } else if (key == ":axiom") {
            cursor.note(key, 1, true, kw, ctx);
            def.axioms.push_back(parse_axiom_def(f, ctx));
        } else if (key == ":method") {
            cursor.note(key, 1, true, kw, ctx);
            def.methods.push_back(parse_method_def(f, ctx));
        } else if (key == ":safety") {
            cursor.note(key, 1, true, kw, ctx);
            ctx.demand(bit(Req::SafetyConstraints), ":safety-constraints", f);
            for (size_t k = 1; k < f->items.size(); k++)
                if (auto g = parse_gd(f->items[k], ctx)) def.safety.push_back(g);
        } else {
            ctx.diag(DiagId::UnknownField, f);
        }
    }
    if (def.domain.empty())
        ctx.diag(DiagId::MalformedDefinition, e, "(missing :domain)");
    return def;
}

}  // namespace

std::optional<Definition> parse_definition(const SExprPtr& e,
                                           std::vector<Diagnostic>& diags,
                                           const ParseOptions& opts) {
    std::vector<ReqDemand> demands;
    ParserCtx ctx{&diags, &demands, opts.strict};
    if (!e->list || e->items.empty() || !e->items[0]->is_sym("define")) {
        ctx.diag(DiagId::NotADefinition, e);
        return std::nullopt;
    }
    if (e->items.size() < 2 || !e->items[1]->list || e->items[1]->items.size() != 2 ||
        !e->items[1]->items[0]->atom()) {
        ctx.diag(DiagId::MalformedDefinition, e);
        return std::nullopt;
    }
    const std::string& kind = e->items[1]->items[0]->canon;
    Name name;
    if (auto n = expect_name(e->items[1]->items[1], ctx))
        name = *n;
    else
        return std::nullopt;
    std::optional<Definition> result;
    if (kind == "domain")
        result = parse_domain(e, name, ctx);
    else if (kind == "problem")
        result = parse_problem(e, name, ctx);
    else if (kind == "situation")
        result = parse_situation(e, name, ctx);
    else if (kind == "addendum") {
        if (opts.strict) ctx.diag(DiagId::AddendumNotAllowed, e);
        result = parse_addendum(e, name, ctx);
    } else {
        ctx.diag(DiagId::UnknownDefinitionKind, e->items[1]->items[0]);
        return std::nullopt;
    }
    // Attach collected demands to the definition.
    std::visit([&](auto& d) { d.demands = std::move(demands); }, *result);
    return result;
}

ParsedFile parse_file(std::string path, std::string text, const ParseOptions& opts) {
    ParsedFile out;
    out.path = std::move(path);
    out.text = std::move(text);
    out.toplevel = read_sexprs(out.text, out.diags);
    size_t defs_seen = 0;
    for (const auto& top : out.toplevel) {
        if (top->synthetic) continue;  // already flagged by the reader
        if (!top->list || top->items.empty() || !top->items[0]->is_sym("define")) {
            out.diags.push_back(make_diag(DiagId::NotADefinition, top));
            continue;
        }
        if (opts.strict && defs_seen == 1)
            out.diags.push_back(make_diag(DiagId::MultipleDefinitionsPerFile, top));
        defs_seen++;
        if (auto def = parse_definition(top, out.diags, opts))
            out.defs.push_back(std::move(*def));
    }
    return out;
}

ParsedFile parse_file_from_disk(const std::string& path, const ParseOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_file(path, ss.str(), opts);
}

SolutionAst parse_solution(const std::string& text) {
    SolutionAst out;
    std::vector<SExprPtr> tops = read_sexprs(text, out.diags);
    std::vector<ReqDemand> demands;
    ParserCtx ctx{&out.diags, &demands, false};
    auto parse_steps = [&](const SExprPtr& lst, std::vector<PlanStepAst>& dst) {
        for (const auto& s : lst->items) {
            if (!s->list || s->items.empty() || !s->items[0]->atom() ||
                !name_shaped(s->items[0]->canon)) {
                ctx.diag(DiagId::MalformedField, s);
                continue;
            }
            PlanStepAst step;
            step.functor = atom_name(s->items[0]);
            step.src = s;
            for (size_t i = 1; i < s->items.size(); i++) {
                auto t = parse_term(s->items[i], ctx);
                if (!t) continue;
                if (t->is_var()) {
                    ctx.diag(DiagId::TermExpected, s->items[i], "(ground term required)");
                    continue;
                }
                step.args.push_back(*t);
            }
            dst.push_back(std::move(step));
        }
    };
    size_t list_no = 0;
    for (const auto& top : tops) {
        if (top->synthetic) continue;
        if (!top->list) {
            ctx.diag(DiagId::MalformedField, top);
            continue;
        }
        if (list_no == 0)
            parse_steps(top, out.steps);
        else if (list_no == 1)
            parse_steps(top, out.hints);
        else
            ctx.diag(DiagId::MalformedField, top);
        list_no++;
    }
    return out;
}

}  // namespace pddl
