#include "pddl/expansion.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <set>

namespace pddl {

void IntervalUnion::merge(const IntervalUnion& o) {
    std::vector<std::pair<int, int>> all = iv;
    all.insert(all.end(), o.iv.begin(), o.iv.end());
    std::sort(all.begin(), all.end());
    iv.clear();
    for (const auto& p : all) {
        // Closed intervals touching at a point coalesce; a gap stays a gap.
        if (!iv.empty() && p.first <= iv.back().second)
            iv.back().second = std::max(iv.back().second, p.second);
        else
            iv.push_back(p);
    }
}

bool IntervalUnion::subset_of(const IntervalUnion& o) const {
    // Normalized unions are gap-separated, so each of our intervals must fit
    // inside a single interval of the other union.
    size_t j = 0;
    for (const auto& [l, h] : iv) {
        while (j < o.iv.size() && o.iv[j].second < l) j++;
        if (j == o.iv.size() || o.iv[j].first > l || h > o.iv[j].second) return false;
    }
    return true;
}

std::string IntervalUnion::str() const {
    if (iv.empty()) return "{}";
    std::string out;
    for (const auto& [l, h] : iv) {
        if (!out.empty()) out += " u ";
        out += "[" + std::to_string(l) + "," + std::to_string(h) + "]";
    }
    return out;
}

namespace {

struct BudgetUp {};
struct SolveErr {
    std::string msg;
};

std::optional<Value> ground_term(const Term& t, const Substitution& sigma) {
    switch (t.kind) {
        case Term::Kind::Constant: return Value::constant(t.name.canon);
        case Term::Kind::Number: return Value::number(t.num);
        case Term::Kind::Variable: {
            auto it = sigma.find(t.name.canon);
            if (it == sigma.end()) return std::nullopt;
            return it->second;
        }
    }
    return std::nullopt;
}

std::string render_sigma(const Substitution& s) {
    if (s.empty()) return "";
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : s) {
        if (!first) out += " ";
        first = false;
        out += k + "=" + v.str();
    }
    return out + "}";
}

std::string desc(const Spec& sp) {
    switch (sp.kind) {
        case Spec::Kind::ActionTerm: {
            std::string s = "(" + sp.functor.canon;
            for (const Term& t : sp.args)
                s += " " + (t.kind == Term::Kind::Number ? t.num.str() : t.name.canon);
            return s + ")";
        }
        case Spec::Kind::LabelRef: return sp.functor.canon;
        case Spec::Kind::InContext: return "in-context";
        case Spec::Kind::Choice: return "choice";
        case Spec::Kind::Forsome: return "forsome";
        case Spec::Kind::Series: return "series";
        case Spec::Kind::Parallel: return "parallel";
        case Spec::Kind::Tag: return "tag";
        case Spec::Kind::Foreach: return "foreach";
        case Spec::Kind::Constrained: return "constrained";
    }
    return "?";
}

struct TrailRec {
    std::string occurrence;
    std::string binding;
    IntervalUnion u;
    int covered_step = 0;  // 1-based step index realized by a primitive occurrence
};

// Backtracking realization search.  Continuations receive the union assigned
// to the node just satisfied and return false to ask for another realization.
class Solver {
  public:
    Solver(const AnchoredSequence& seq, long long budget)
        : seq_(seq), m_(*seq.model), budget_(budget), evals_(seq.states.size()) {}

    SatOutcome run(const SpecPtr& spec) {
        SatOutcome out;
        try {
            bool ok = sat(*spec, "e", Substitution{},
                          [](const IntervalUnion&) { return true; });
            if (ok) {
                out.result = SatResult::Satisfied;
                for (const TrailRec& t : trail_) {
                    out.entries.push_back({t.occurrence, t.binding, t.u});
                    if (t.covered_step > 0) out.covered.insert(t.covered_step);
                }
                out.warnings = warnings_;
            } else {
                out.result = SatResult::Unsatisfiable;
            }
        } catch (const BudgetUp&) {
            out.result = SatResult::BudgetExceeded;
        } catch (const SolveErr& e) {
            out.result = SatResult::Error;
            out.error = e.msg;
        } catch (const EvalError& e) {
            out.result = SatResult::Error;
            out.error = e.what();
        }
        return out;
    }

  private:
    using Cont = std::function<bool(const IntervalUnion&)>;
    using Cont2 = std::function<bool(const IntervalUnion&, const Substitution&)>;

    struct LabelRec {
        int scope;
        std::string name;
        Substitution sigma;
        IntervalUnion u;
    };

    struct DepthGuard {
        int& d;
        explicit DepthGuard(int& dd) : d(dd) { ++d; }
        ~DepthGuard() { --d; }
    };

    const AnchoredSequence& seq_;
    const DomainModel& m_;
    long long budget_;
    int depth_ = 0;
    std::vector<std::unique_ptr<Evaluator>> evals_;
    std::vector<TrailRec> trail_;
    std::vector<LabelRec> labels_;
    std::vector<int> scope_stack_{0};
    int scope_counter_ = 0;
    std::vector<std::string> warnings_;

    Evaluator& eval_at(int s) {
        if (!evals_[s]) evals_[s] = std::make_unique<Evaluator>(m_, seq_.states[s]);
        return *evals_[s];
    }

    bool emit(const std::string& path, const Spec& sp, const Substitution& sigma,
              const IntervalUnion& u, int covered_step, const Cont& k) {
        trail_.push_back({path + " " + desc(sp), render_sigma(sigma), u, covered_step});
        bool ok = k(u);
        if (!ok) trail_.pop_back();
        return ok;
    }

    // Every binding of the record must be present (and equal) in the query.
    static bool sigma_covers(const Substitution& query, const Substitution& record) {
        for (const auto& [k, v] : record) {
            auto it = query.find(k);
            if (it == query.end() || !(it->second == v)) return false;
        }
        return true;
    }

    // A label names every point bound to it in the current realization scope
    // under a substitution no more specific than the reference's own; a label
    // bound nowhere — or only under extra bindings the reference does not
    // carry, e.g. inside a forsome referenced from outside — denotes the
    // empty union and constrains nothing.
    IntervalUnion lookup_label(const std::string& name, const Substitution& sigma) {
        IntervalUnion u;
        for (const LabelRec& r : labels_)
            if (r.scope == scope_stack_.back() && r.name == name &&
                sigma_covers(sigma, r.sigma))
                u.merge(r.u);
        return u;
    }

    std::vector<Value> union_extension(const TypeExpr& t) {
        std::set<Value> acc;
        for (int s = 0; s <= seq_.k(); s++)
            for (const Value& v : eval_at(s).extension(t)) acc.insert(v);
        return {acc.begin(), acc.end()};
    }

    // Announced effects are descriptions, not instructions: verify them
    // against the realized interval and complain, but never fail the search.
    void ann_check(const Effect& e, const Substitution& sigma, int L, int H) {
        switch (e.kind) {
            case Effect::Kind::Add:
            case Effect::Kind::Del: {
                GroundAtom a;
                a.pred = e.pred.canon;
                for (const Term& t : e.args) {
                    auto v = ground_term(t, sigma);
                    if (!v) {
                        warnings_.push_back("announced effect of " + e.pred.canon +
                                            " mentions unbound " + t.name.canon);
                        return;
                    }
                    a.args.push_back(*v);
                }
                bool truth = eval_at(H).atom_true(a);
                if (e.kind == Effect::Kind::Add && !truth)
                    warnings_.push_back("announced effect " + a.str() +
                                        " does not hold at the end of its interval");
                if (e.kind == Effect::Kind::Del && truth)
                    warnings_.push_back("announced deletion of " + a.str() +
                                        " is not reflected at the end of its interval");
                return;
            }
            case Effect::Kind::And:
                for (const auto& c : e.children) ann_check(*c, sigma, L, H);
                return;
            case Effect::Kind::Forall: {
                auto vars = e.vars.flat();
                Substitution cur = sigma;
                std::function<void(size_t)> go = [&](size_t vi) {
                    if (vi == vars.size()) {
                        ann_check(*e.children[0], cur, L, H);
                        return;
                    }
                    for (const Value& v : eval_at(L).extension(vars[vi].second)) {
                        cur[vars[vi].first.canon] = v;
                        go(vi + 1);
                    }
                    cur.erase(vars[vi].first.canon);
                };
                go(0);
                return;
            }
            case Effect::Kind::When:
                if (eval_at(L).holds(e.cond, sigma)) ann_check(*e.children[0], sigma, L, H);
                return;
            case Effect::Kind::Change: {
                auto tv = ground_term(e.fluent, sigma);
                if (!tv || tv->is_num()) {
                    warnings_.push_back("announced change has no fluent target");
                    return;
                }
                NumericValue want = eval_at(L).eval_expr(e.expr, sigma, true);
                const State& sh = seq_.states[H];
                const NumericValue* got = nullptr;
                if (auto it = sh.fluents.find(tv->name); it != sh.fluents.end())
                    got = &it->second;
                else if (auto it2 = sh.domain_vars.find(tv->name);
                         it2 != sh.domain_vars.end())
                    got = &it2->second;
                if (!got)
                    warnings_.push_back("announced change target " + tv->name +
                                        " has no value at the end of its interval");
                else if (!(*got == want))
                    warnings_.push_back("announced change of " + tv->name + " to " +
                                        want.str() + " is not reflected (actual " +
                                        got->str() + ")");
                return;
            }
        }
    }

    // Satisfy `child` under in-context conditions: enumerate any :vars over
    // their type extensions, and once the child realizes a non-empty union
    // [L,H], require the precondition at S_L and :maintain at every integer
    // point of [L,H] (gaps in the union included).  An empty realization makes
    // the conditions vacuous.
    bool sat_in_context(const Spec& child, const SpecConds& conds, const std::string& path,
                        const Substitution& sigma, const Cont2& cont) {
        auto vars = conds.vars.flat();
        auto attempt = [&](const Substitution& sg) -> bool {
            return sat(child, path + ".0", sg, [&](const IntervalUnion& u) {
                if (!u.empty()) {
                    int L = u.min(), H = u.max();
                    Evaluator& el = eval_at(L);
                    for (const auto& [vn, vt] : vars) {
                        auto it = sg.find(vn.canon);
                        if (it != sg.end() && !el.value_has_type(it->second, vt))
                            return false;
                    }
                    if (conds.precondition && !el.holds(conds.precondition, sg))
                        return false;
                    if (conds.maintain)
                        for (int s = L; s <= H; s++)
                            if (!eval_at(s).holds(conds.maintain, sg)) return false;
                }
                size_t wmark = warnings_.size();
                if (conds.effect && !u.empty()) {
                    try {
                        ann_check(*conds.effect, sg, u.min(), u.max());
                    } catch (const EvalError& e) {
                        warnings_.push_back(
                            std::string("announced effect could not be checked: ") +
                            e.what());
                    }
                }
                bool r = cont(u, sg);
                if (!r) warnings_.resize(wmark);
                return r;
            });
        };
        if (vars.empty()) return attempt(sigma);

        std::vector<std::pair<std::string, std::vector<Value>>> ranges;
        for (const auto& [vn, vt] : vars) ranges.emplace_back(vn.canon, union_extension(vt));
        Substitution cur = sigma;
        std::function<bool(size_t)> assign = [&](size_t vi) -> bool {
            if (vi == ranges.size()) return attempt(cur);
            auto prev = cur.find(ranges[vi].first);
            std::optional<Value> old;
            if (prev != cur.end()) old = prev->second;
            for (const Value& v : ranges[vi].second) {
                cur[ranges[vi].first] = v;
                if (assign(vi + 1)) return true;
            }
            if (old)
                cur[ranges[vi].first] = *old;
            else
                cur.erase(ranges[vi].first);
            return false;
        };
        return assign(0);
    }

    bool sat(const Spec& sp, const std::string& path, const Substitution& sigma,
             const Cont& k) {
        if (--budget_ < 0) throw BudgetUp{};
        DepthGuard dg(depth_);
        if (depth_ > 2000) throw BudgetUp{};

        switch (sp.kind) {
            case Spec::Kind::ActionTerm: {
                if (sp.noop()) {
                    // A no-op sits at any single point of the sequence.
                    for (int i = 0; i <= seq_.k(); i++)
                        if (emit(path, sp, sigma, IntervalUnion::single(i, i), 0, k))
                            return true;
                    return false;
                }
                const ActionSchema* schema = m_.find_action(sp.functor.canon);
                if (!schema)
                    throw SolveErr{"spec names an unknown action: " + sp.functor.canon};
                if (schema->primitive()) {
                    // The instantiated term must literally be one of the steps.
                    std::vector<Value> args;
                    for (const Term& t : sp.args) {
                        auto v = ground_term(t, sigma);
                        if (!v)
                            throw SolveErr{"unbound variable " + t.name.canon +
                                           " in action term of " + sp.functor.canon};
                        args.push_back(*v);
                    }
                    for (int i = 1; i <= seq_.k(); i++) {
                        const GroundAction& q = seq_.steps[i - 1];
                        if (q.functor.canon != sp.functor.canon ||
                            q.args.size() != args.size())
                            continue;
                        if (!std::equal(args.begin(), args.end(), q.args.begin()))
                            continue;
                        if (emit(path, sp, sigma, IntervalUnion::single(i - 1, i), i, k))
                            return true;
                    }
                    return false;
                }
                // Nonprimitive: realize one of its expansions — the action's
                // own :expansion or any method body — with parameters bound
                // positionally by the term's arguments.  Labels bound inside
                // stay local to this realization.
                struct Cand {
                    const TypedList* params;
                    const ActionDefBody* body;
                    std::string tag;
                };
                std::vector<Cand> cands;
                if (schema->body.expansion)
                    cands.push_back({&schema->params, &schema->body, "x"});
                for (size_t mi = 0; mi < schema->methods.size(); mi++)
                    if (schema->methods[mi].body.expansion)
                        cands.push_back({&schema->methods[mi].params,
                                         &schema->methods[mi].body,
                                         "m" + std::to_string(mi)});
                for (const Cand& c : cands) {
                    auto params = c.params->flat();
                    if (params.size() != sp.args.size()) continue;
                    Substitution inner;
                    for (size_t pi = 0; pi < params.size(); pi++) {
                        auto v = ground_term(sp.args[pi], sigma);
                        if (!v)
                            throw SolveErr{"unbound variable " +
                                           sp.args[pi].name.canon +
                                           " in action term of " + sp.functor.canon};
                        inner[params[pi].first.canon] = *v;
                    }
                    SpecConds conds;
                    conds.vars = c.body->vars;
                    conds.precondition = c.body->precondition;
                    conds.maintain = c.body->maintain;
                    conds.effect = c.body->effect;
                    int id = ++scope_counter_;
                    scope_stack_.push_back(id);
                    bool ok = sat_in_context(
                        *c.body->expansion, conds, path + "." + c.tag, inner,
                        [&](const IntervalUnion& u, const Substitution&) {
                            scope_stack_.pop_back();
                            bool r = emit(path, sp, sigma, u, 0, k);
                            if (!r) scope_stack_.push_back(id);
                            return r;
                        });
                    if (ok) return true;
                    scope_stack_.pop_back();
                }
                return false;
            }

            case Spec::Kind::LabelRef:
                // Vacuously satisfied; its union is whatever the label names.
                return emit(path, sp, sigma, lookup_label(sp.functor.canon, sigma), 0, k);

            case Spec::Kind::InContext:
                return sat_in_context(*sp.children[0], sp.conds, path, sigma,
                                      [&](const IntervalUnion& u, const Substitution& sg) {
                                          return emit(path, sp, sg, u, 0, k);
                                      });

            case Spec::Kind::Choice: {
                for (size_t i = 0; i < sp.children.size(); i++) {
                    bool ok = sat(*sp.children[i], path + "." + std::to_string(i), sigma,
                                  [&](const IntervalUnion& u) {
                                      return emit(path, sp, sigma, u, 0, k);
                                  });
                    if (ok) return true;
                }
                return false;
            }

            case Spec::Kind::Forsome: {
                auto vars = sp.vars.flat();
                std::vector<std::pair<std::string, std::vector<Value>>> ranges;
                for (const auto& [vn, vt] : vars)
                    ranges.emplace_back(vn.canon, union_extension(vt));
                Substitution cur = sigma;
                std::function<bool(size_t)> assign = [&](size_t vi) -> bool {
                    if (vi == ranges.size())
                        return sat(*sp.children[0], path + ".0", cur,
                                   [&](const IntervalUnion& u) {
                                       return emit(path, sp, cur, u, 0, k);
                                   });
                    auto prev = cur.find(ranges[vi].first);
                    std::optional<Value> old;
                    if (prev != cur.end()) old = prev->second;
                    for (const Value& v : ranges[vi].second) {
                        cur[ranges[vi].first] = v;
                        if (assign(vi + 1)) return true;
                    }
                    if (old)
                        cur[ranges[vi].first] = *old;
                    else
                        cur.erase(ranges[vi].first);
                    return false;
                };
                return assign(0);
            }

            case Spec::Kind::Series: {
                size_t n = sp.children.size();
                bool pure_labels =
                    n > 0 && std::all_of(sp.children.begin(), sp.children.end(),
                                         [](const SpecPtr& c) {
                                             return c->kind == Spec::Kind::LabelRef;
                                         });
                if (pure_labels) {
                    // Ordering over named time points: consecutive realized
                    // labels must be in order; an unrealized label constrains
                    // nothing.
                    std::vector<IntervalUnion> us;
                    std::function<bool(size_t, IntervalUnion)> go =
                        [&](size_t i, IntervalUnion acc) -> bool {
                        if (i == n) {
                            for (size_t j = 0; j + 1 < us.size(); j++)
                                if (!us[j].empty() && !us[j + 1].empty() &&
                                    us[j].max() > us[j + 1].min())
                                    return false;
                            return emit(path, sp, sigma, acc, 0, k);
                        }
                        return sat(*sp.children[i], path + "." + std::to_string(i), sigma,
                                   [&, i](const IntervalUnion& u) {
                                       IntervalUnion a2 = acc;
                                       a2.merge(u);
                                       us.push_back(u);
                                       bool r = go(i + 1, a2);
                                       if (!r) us.pop_back();
                                       return r;
                                   });
                    };
                    return go(0, {});
                }
                // Every point of an earlier child precedes every point of a
                // later one; children realizing nothing don't constrain.
                std::function<bool(size_t, std::optional<int>, IntervalUnion)> go =
                    [&](size_t i, std::optional<int> hi, IntervalUnion acc) -> bool {
                    if (i == n) return emit(path, sp, sigma, acc, 0, k);
                    return sat(*sp.children[i], path + "." + std::to_string(i), sigma,
                               [&, i](const IntervalUnion& u) {
                                   std::optional<int> nhi = hi;
                                   if (!u.empty()) {
                                       if (hi && u.min() < *hi) return false;
                                       nhi = std::max(hi.value_or(u.max()), u.max());
                                   }
                                   IntervalUnion a2 = acc;
                                   a2.merge(u);
                                   return go(i + 1, nhi, a2);
                               });
                };
                return go(0, std::nullopt, {});
            }

            case Spec::Kind::Parallel: {
                size_t n = sp.children.size();
                std::function<bool(size_t, IntervalUnion)> go =
                    [&](size_t i, IntervalUnion acc) -> bool {
                    if (i == n) return emit(path, sp, sigma, acc, 0, k);
                    return sat(*sp.children[i], path + "." + std::to_string(i), sigma,
                               [&, i](const IntervalUnion& u) {
                                   IntervalUnion a2 = acc;
                                   a2.merge(u);
                                   return go(i + 1, a2);
                               });
                };
                return go(0, {});
            }

            case Spec::Kind::Tag:
                return sat(*sp.children[0], path + ".0", sigma,
                           [&](const IntervalUnion& u) {
                               size_t lmark = labels_.size(), tmark = trail_.size();
                               auto bind = [&](const LabelTerm& lt) {
                                   IntervalUnion lu;
                                   if (!u.empty()) {
                                       switch (lt.qual) {
                                           case LabelTerm::Qual::Begin:
                                               lu = IntervalUnion::single(u.min(), u.min());
                                               break;
                                           case LabelTerm::Qual::End:
                                               lu = IntervalUnion::single(u.max(), u.max());
                                               break;
                                           case LabelTerm::Qual::Whole:
                                               lu = IntervalUnion::single(u.min(), u.max());
                                               break;
                                       }
                                   }
                                   labels_.push_back({scope_stack_.back(),
                                                      lt.label.canon, sigma, lu});
                                   trail_.push_back({path + " label " + lt.label.canon,
                                                     render_sigma(sigma), lu, 0});
                               };
                               for (const LabelTerm& lt : sp.pre_labels) bind(lt);
                               for (const LabelTerm& lt : sp.post_labels) bind(lt);
                               bool r = emit(path, sp, sigma, u, 0, k);
                               if (!r) {
                                   labels_.resize(lmark);
                                   trail_.resize(tmark);
                               }
                               return r;
                           });

            case Spec::Kind::Foreach: {
                auto vars = sp.vars.flat();
                // Search for an anchor point: the filter picks the instance
                // set there, every instance must realize the body, and a
                // non-empty combined union must begin at the anchor.
                for (int L = 0; L <= seq_.k(); L++) {
                    if (--budget_ < 0) throw BudgetUp{};
                    Evaluator& el = eval_at(L);
                    std::vector<Substitution> inst;
                    Substitution cur = sigma;
                    std::function<void(size_t)> build = [&](size_t vi) {
                        if (vi == vars.size()) {
                            if (!sp.cond || el.holds(sp.cond, cur)) inst.push_back(cur);
                            return;
                        }
                        for (const Value& v : el.extension(vars[vi].second)) {
                            cur[vars[vi].first.canon] = v;
                            build(vi + 1);
                        }
                        cur.erase(vars[vi].first.canon);
                    };
                    build(0);
                    std::function<bool(size_t, IntervalUnion)> go =
                        [&](size_t j, IntervalUnion acc) -> bool {
                        if (j == inst.size()) {
                            if (!acc.empty() && acc.min() != L) return false;
                            return emit(path, sp, sigma, acc, 0, k);
                        }
                        return sat(*sp.children[0], path + ".0", inst[j],
                                   [&, j](const IntervalUnion& u) {
                                       IntervalUnion a2 = acc;
                                       a2.merge(u);
                                       return go(j + 1, a2);
                                   });
                    };
                    if (go(0, {})) return true;
                }
                return false;
            }

            case Spec::Kind::Constrained: {
                // The group runs as a parallel composition; each constraint
                // must then be satisfiable inside the group's union, with the
                // group's labels in scope.
                size_t n = sp.children.size();
                std::function<bool(size_t, IntervalUnion)> grp =
                    [&](size_t i, IntervalUnion acc) -> bool {
                    if (i == n) {
                        std::function<bool(size_t)> con = [&](size_t j) -> bool {
                            if (j == sp.constraints.size())
                                return emit(path, sp, sigma, acc, 0, k);
                            return sat(*sp.constraints[j],
                                       path + ".c" + std::to_string(j), sigma,
                                       [&, j](const IntervalUnion& cu) {
                                           if (!cu.subset_of(acc)) return false;
                                           return con(j + 1);
                                       });
                        };
                        return con(0);
                    }
                    return sat(*sp.children[i], path + "." + std::to_string(i), sigma,
                               [&, i](const IntervalUnion& u) {
                                   IntervalUnion a2 = acc;
                                   a2.merge(u);
                                   return grp(i + 1, a2);
                               });
                };
                return grp(0, {});
            }
        }
        return false;
    }
};

}  // namespace

SatOutcome satisfies(const SpecPtr& spec, const AnchoredSequence& seq, long long budget) {
    Solver solver(seq, budget);
    return solver.run(spec);
}

}  // namespace pddl
