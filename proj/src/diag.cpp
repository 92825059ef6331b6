#include "pddl/diag.hpp"

#include "pddl/sexpr.hpp"

namespace pddl {

namespace {

struct Entry {
    const char* text;
    Severity sev;
};

Entry entry(DiagId id) {
    switch (id) {
        case DiagId::IllegalCharacter: return {"illegal character", Severity::Error};
        case DiagId::MalformedNumber: return {"malformed number", Severity::Error};
        case DiagId::MissingRightParen: return {"missing right parenthesis", Severity::Error};
        case DiagId::UnmatchedRightParen: return {"unmatched right parenthesis", Severity::Error};
        case DiagId::NotADefinition: return {"not a definition", Severity::Error};
        case DiagId::MalformedDefinition: return {"malformed definition", Severity::Error};
        case DiagId::UnknownDefinitionKind: return {"unknown definition kind", Severity::Error};
        case DiagId::MalformedField: return {"malformed field", Severity::Error};
        case DiagId::UnknownField: return {"unknown field", Severity::Error};
        case DiagId::DuplicateField: return {"duplicate field", Severity::Error};
        case DiagId::FieldOutOfOrder: return {"field out of canonical order", Severity::Error};
        case DiagId::MultipleDefinitionsPerFile: return {"more than one definition per file", Severity::Error};
        case DiagId::AddendumNotAllowed: return {"addenda are not allowed in strict mode", Severity::Error};
        case DiagId::NameExpected: return {"name expected", Severity::Error};
        case DiagId::VariableExpected: return {"variable expected", Severity::Error};
        case DiagId::TermExpected: return {"term expected", Severity::Error};
        case DiagId::TypedListItem: return {"misplaced item in typed list", Severity::Error};
        case DiagId::TypeMissingAfterMinus: return {"type missing after -", Severity::Error};
        case DiagId::EmptyExpression: return {"empty expression", Severity::Error};
        case DiagId::MalformedExpression: return {"malformed expression", Severity::Error};
        case DiagId::NotAllowedInEffect: return {"not allowed in an effect", Severity::Error};
        case DiagId::LiteralRequired: return {"literal required", Severity::Error};
        case DiagId::MalformedAdvice: return {"malformed advice annotation", Severity::Error};
        case DiagId::BooleanExpected: return {"t or nil expected", Severity::Error};
        case DiagId::NumberExpected: return {"number expected", Severity::Error};
        case DiagId::MissingParameters: return {"missing :parameters", Severity::Error};
        case DiagId::EffectAndExpansion: return {":effect and :expansion are mutually exclusive", Severity::Error};
        case DiagId::EffectInMethod: return {":effect not allowed in a method", Severity::Error};
        case DiagId::OnlyInExpansionsInMethod: return {":only-in-expansions not allowed in a method", Severity::Error};
        case DiagId::ActionSpecExpected: return {"action spec expected", Severity::Error};
        case DiagId::NoArgumentsAllowed: return {"no arguments allowed", Severity::Error};
        case DiagId::UnknownRequirement: return {"unknown requirement flag", Severity::Error};
        case DiagId::RequiresFlag: return {"requires", Severity::Error};
        case DiagId::UndefinedDomain: return {"undefined domain", Severity::Error};
        case DiagId::UndefinedAncestor: return {"undefined ancestor domain", Severity::Error};
        case DiagId::UndefinedType: return {"undefined type", Severity::Error};
        case DiagId::AssumedType: return {"type not declared", Severity::Warning};
        case DiagId::CyclicType: return {"cyclic type declaration", Severity::Error};
        case DiagId::CompoundSupertype: return {"supertype must be a simple type name", Severity::Error};
        case DiagId::ConflictingType: return {"conflicting type declaration", Severity::Error};
        case DiagId::UnknownPredicate: return {"unknown predicate", Severity::Error};
        case DiagId::UnknownName: return {"unknown name", Severity::Error};
        case DiagId::WrongArity: return {"wrong number of arguments", Severity::Error};
        case DiagId::TypeMismatch: return {"argument type mismatch", Severity::Error};
        case DiagId::PartialTypeCompatibility: return {"argument type only partially compatible", Severity::Warning};
        case DiagId::UnboundVariable: return {"unbound variable", Severity::Error};
        case DiagId::ConflictingPredicate: return {"conflicting predicate declaration", Severity::Error};
        case DiagId::NameKindCollision: return {"name already used for a different kind of entity", Severity::Error};
        case DiagId::ReservedName: return {"reserved name", Severity::Error};
        case DiagId::DuplicateAction: return {"duplicate action", Severity::Error};
        case DiagId::DuplicateMethod: return {"duplicate method name", Severity::Error};
        case DiagId::MethodUndefinedAction: return {"method for an undefined action", Severity::Error};
        case DiagId::MethodForPrimitive: return {"method for a primitive action", Severity::Error};
        case DiagId::UndefinedAction: return {"undefined action", Severity::Error};
        case DiagId::AxiomVariableUndeclared: return {"variable not declared in :vars", Severity::Error};
        case DiagId::ShadowedVariable: return {"variable shadows an outer binding", Severity::Warning};
        case DiagId::EffectOnDerivedPredicate: return {"action effect mentions a derived predicate", Severity::Error};
        case DiagId::NegativeImpliesStored: return {"negatively derived predicate also stored", Severity::Error};
        case DiagId::DerivedInInit: return {"initial state asserts a derived predicate", Severity::Error};
        case DiagId::NotStratifiable: return {"axiom set is not stratifiable", Severity::Error};
        case DiagId::UndefinedSituation: return {"undefined initial situation", Severity::Error};
        case DiagId::SituationShadowed: return {"situation name shadows an inherited one", Severity::Warning};
        case DiagId::VarsWithoutGate: return {":vars without :existential-preconditions or :conditional-effects", Severity::Warning};
        case DiagId::NestedFluentType: return {"nested fluent type", Severity::Warning};
        case DiagId::NumericInitialExpected: return {"numeric initial value expected", Severity::Error};
        case DiagId::GoalRequired: return {"at least one :goal or :expansion required", Severity::Error};
        case DiagId::TimelessViolatedInInit: return {"initial state contradicts a timeless literal", Severity::Error};
    }
    return {"unknown diagnostic", Severity::Error};
}

}  // namespace

const char* diag_text(DiagId id) { return entry(id).text; }
Severity diag_severity(DiagId id) { return entry(id).sev; }

Diagnostic make_diag(DiagId id, SExprPtr node, const std::string& detail) {
    Diagnostic d;
    d.id = id;
    d.severity = diag_severity(id);
    d.message = entry(id).text;
    if (!detail.empty()) {
        d.message += " ";
        d.message += detail;
    }
    d.node = std::move(node);
    return d;
}

}  // namespace pddl
