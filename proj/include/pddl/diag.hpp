#pragma once

#include <memory>
#include <string>
#include <vector>

namespace pddl {

struct SExpr;
using SExprPtr = std::shared_ptr<SExpr>;

enum class Severity { Error, Warning };

// Fixed diagnostic catalog.  The description strings are part of the .chk
// golden-file contract; change them only together with the corpus goldens.
enum class DiagId {
    IllegalCharacter,
    MalformedNumber,
    MissingRightParen,
    UnmatchedRightParen,
    NotADefinition,
    MalformedDefinition,
    UnknownDefinitionKind,
    MalformedField,
    UnknownField,
    DuplicateField,
    FieldOutOfOrder,
    MultipleDefinitionsPerFile,
    AddendumNotAllowed,
    NameExpected,
    VariableExpected,
    TermExpected,
    TypedListItem,
    TypeMissingAfterMinus,
    EmptyExpression,
    MalformedExpression,
    NotAllowedInEffect,
    LiteralRequired,
    MalformedAdvice,
    BooleanExpected,
    NumberExpected,
    MissingParameters,
    EffectAndExpansion,
    EffectInMethod,
    OnlyInExpansionsInMethod,
    ActionSpecExpected,
    NoArgumentsAllowed,
    UnknownRequirement,
    RequiresFlag,
    UndefinedDomain,
    UndefinedAncestor,
    UndefinedType,
    AssumedType,
    CyclicType,
    CompoundSupertype,
    ConflictingType,
    UnknownPredicate,
    UnknownName,
    WrongArity,
    TypeMismatch,
    PartialTypeCompatibility,
    UnboundVariable,
    ConflictingPredicate,
    NameKindCollision,
    ReservedName,
    DuplicateAction,
    DuplicateMethod,
    MethodUndefinedAction,
    MethodForPrimitive,
    UndefinedAction,
    AxiomVariableUndeclared,
    ShadowedVariable,
    EffectOnDerivedPredicate,
    NegativeImpliesStored,
    DerivedInInit,
    NotStratifiable,
    UndefinedSituation,
    SituationShadowed,
    VarsWithoutGate,
    NestedFluentType,
    NumericInitialExpected,
    GoalRequired,
    TimelessViolatedInInit,
};

const char* diag_text(DiagId id);
Severity diag_severity(DiagId id);

struct Diagnostic {
    DiagId id;
    Severity severity;
    std::string message;  // catalog text, possibly with a specific detail
    SExprPtr node;        // offending subexpression (never null)
};

// Helper used by all phases: message defaults to the catalog text.
Diagnostic make_diag(DiagId id, SExprPtr node, const std::string& detail = "");

}  // namespace pddl
