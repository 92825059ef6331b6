#include "pddl/requirements.hpp"

#include <algorithm>
#include <cstring>

namespace pddl {

const char* req_name(Req r) {
    switch (r) {
        case Req::Strips: return ":strips";
        case Req::Typing: return ":typing";
        case Req::DisjunctivePreconditions: return ":disjunctive-preconditions";
        case Req::Equality: return ":equality";
        case Req::ExistentialPreconditions: return ":existential-preconditions";
        case Req::UniversalPreconditions: return ":universal-preconditions";
        case Req::QuantifiedPreconditions: return ":quantified-preconditions";
        case Req::ConditionalEffects: return ":conditional-effects";
        case Req::ActionExpansions: return ":action-expansions";
        case Req::ForeachExpansions: return ":foreach-expansions";
        case Req::DagExpansions: return ":dag-expansions";
        case Req::DomainAxioms: return ":domain-axioms";
        case Req::SubgoalThroughAxioms: return ":subgoal-through-axioms";
        case Req::SafetyConstraints: return ":safety-constraints";
        case Req::ExpressionEvaluation: return ":expression-evaluation";
        case Req::Fluents: return ":fluents";
        case Req::OpenWorld: return ":open-world";
        case Req::TrueNegation: return ":true-negation";
        case Req::Adl: return ":adl";
        case Req::Ucpop: return ":ucpop";
        case Req::COUNT: break;
    }
    return "";
}

std::optional<Req> req_from_name(const std::string& s) {
    for (int i = 0; i < kNumReqs; i++) {
        Req r = static_cast<Req>(i);
        if (s == req_name(r)) return r;
    }
    return std::nullopt;
}

ReqSet close_requirements(ReqSet declared) {
    if (declared == 0) return req_bit(Req::Strips);
    struct Rule {
        Req from;
        std::initializer_list<Req> to;
    };
    static const Rule rules[] = {
        {Req::QuantifiedPreconditions,
         {Req::ExistentialPreconditions, Req::UniversalPreconditions}},
        {Req::ForeachExpansions, {Req::ActionExpansions}},
        {Req::DagExpansions, {Req::ActionExpansions}},
        {Req::ExpressionEvaluation, {Req::DomainAxioms}},
        {Req::Fluents, {Req::ExpressionEvaluation}},
        {Req::TrueNegation, {Req::OpenWorld}},
        {Req::Adl,
         {Req::Strips, Req::Typing, Req::DisjunctivePreconditions, Req::Equality,
          Req::QuantifiedPreconditions, Req::ConditionalEffects}},
        {Req::Ucpop, {Req::Adl, Req::DomainAxioms, Req::SafetyConstraints}},
    };
    ReqSet s = declared;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& rule : rules) {
            if (!req_has(s, rule.from)) continue;
            for (Req t : rule.to) {
                if (!req_has(s, t)) {
                    s |= req_bit(t);
                    changed = true;
                }
            }
        }
    }
    return s;
}

std::vector<Req> req_sorted(ReqSet s) {
    std::vector<Req> out;
    for (int i = 0; i < kNumReqs; i++)
        if (s & (ReqSet{1} << i)) out.push_back(static_cast<Req>(i));
    std::sort(out.begin(), out.end(), [](Req a, Req b) {
        return std::strcmp(req_name(a), req_name(b)) < 0;
    });
    return out;
}

}  // namespace pddl
