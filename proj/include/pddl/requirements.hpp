#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pddl {

// Requirement flags.  :adl and :ucpop are
// abbreviations that imply whole groups.
enum class Req : uint8_t {
    Strips,
    Typing,
    DisjunctivePreconditions,
    Equality,
    ExistentialPreconditions,
    UniversalPreconditions,
    QuantifiedPreconditions,
    ConditionalEffects,
    ActionExpansions,
    ForeachExpansions,
    DagExpansions,
    DomainAxioms,
    SubgoalThroughAxioms,
    SafetyConstraints,
    ExpressionEvaluation,
    Fluents,
    OpenWorld,
    TrueNegation,
    Adl,
    Ucpop,
    COUNT,
};

inline constexpr int kNumReqs = static_cast<int>(Req::COUNT);

using ReqSet = uint32_t;  // bitmask over Req

inline constexpr ReqSet req_bit(Req r) { return ReqSet{1} << static_cast<int>(r); }
inline bool req_has(ReqSet s, Req r) { return s & req_bit(r); }

// Flag name including the leading colon, e.g. ":strips".
const char* req_name(Req r);
std::optional<Req> req_from_name(const std::string& canonical_with_colon);

// Implication closure.  The empty set closes to {:strips}; nonempty sets
// close to their least fixpoint under the implication rules.
ReqSet close_requirements(ReqSet declared);

std::vector<Req> req_sorted(ReqSet s);  // ascending by flag name

}  // namespace pddl
