#pragma once

#include <set>
#include <string>
#include <vector>

#include "pddl/validator.hpp"

namespace pddl {

// Union of closed integer intervals inside [0,k]; kept normalized.
struct IntervalUnion {
    std::vector<std::pair<int, int>> iv;

    static IntervalUnion single(int l, int h) {
        IntervalUnion u;
        u.iv.push_back({l, h});
        return u;
    }
    bool empty() const { return iv.empty(); }
    int min() const { return iv.front().first; }
    int max() const { return iv.back().second; }
    void merge(const IntervalUnion& o);
    bool subset_of(const IntervalUnion& o) const;
    std::string str() const;
    friend bool operator==(const IntervalUnion& a, const IntervalUnion& b) {
        return a.iv == b.iv;
    }
};

// A feasible executed plan: situations S_0..S_k around steps q_1..q_k.
struct AnchoredSequence {
    const DomainModel* model = nullptr;
    std::vector<GroundAction> steps;
    std::vector<State> states;

    int k() const { return static_cast<int>(steps.size()); }
};

enum class SatResult { Satisfied, Unsatisfiable, BudgetExceeded, Error };

struct RealizationEntry {
    std::string occurrence;  // tree path of the subexpression or label
    std::string binding;     // rendered substitution, "" when empty
    IntervalUnion interval;
};

struct SatOutcome {
    SatResult result = SatResult::Unsatisfiable;
    std::vector<RealizationEntry> entries;  // only when Satisfied
    std::vector<std::string> warnings;      // announced-effect mismatches
    std::set<int> covered;                  // step indices realized by a primitive
    std::string error;                      // when result == Error
};

// Appendix-style realization search: does the anchored sequence carry out the
// spec?  Budget counts search nodes; exhaustion is distinct from failure.
SatOutcome satisfies(const SpecPtr& spec, const AnchoredSequence& seq,
                     long long budget = 1000000);

}  // namespace pddl
