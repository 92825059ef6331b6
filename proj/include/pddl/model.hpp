#pragma once

#include <map>
#include <memory>
#include <set>

#include "pddl/ast.hpp"
#include "pddl/requirements.hpp"

namespace pddl {

// Type atoms plus a supertype map.  object and number are built-in roots;
// number is not a subtype of object.
struct TypeHierarchy {
    std::map<std::string, std::string> supertype;  // "" for roots

    TypeHierarchy() {
        supertype["object"] = "";
        supertype["number"] = "";
    }
    bool declared(const std::string& atom) const { return supertype.count(atom); }
    bool atom_subtype(const std::string& a, const std::string& b) const;
};

// Compound-type subtyping: Either(ts) <= u iff every member is; t <= Either(us)
// iff t fits some member; (fluent t) <= (fluent u) iff t <= u; fluent and
// non-fluent types are incomparable.
bool subtype_of(const TypeExpr& a, const TypeExpr& b, const TypeHierarchy& h);

struct PredicateSignature {
    Name name;
    TypedList params;
    Name origin;  // defining domain
    bool timeless = false;
    bool derived = false;
    SExprPtr src;
};

struct MethodSchema {
    Name action;
    Name method_name;  // may be empty
    TypedList params;
    ActionDefBody body;
    std::string origin_addendum;  // "" when declared in the domain itself
    SExprPtr src;
};

struct ActionSchema {
    Name functor;
    TypedList params;
    ActionDefBody body;
    Name origin;
    std::string origin_addendum;
    std::vector<MethodSchema> methods;
    SExprPtr src;

    bool primitive() const {
        return !body.expansion && !body.methods_placeholder && methods.empty();
    }
};

struct AxiomSchema {
    AxiomDefAst ast;
    Name origin;
    std::string origin_addendum;
};

struct SafetySchema {
    GdPtr gd;
    std::string origin_addendum;
};

// Absolute object/init contents of a named initial situation (problems also
// register one under their own name).
struct SituationData {
    Name name;
    std::vector<std::pair<Name, TypeExpr>> objects;
    std::vector<GroundLiteralAst> init;
};

struct DomainModel;

// Objects visible in a situation beyond the domain constants: declared
// :objects plus constants inferred from init literal argument positions
// (typed by the predicate parameter, or by the type for type-name atoms).
std::map<std::string, TypeExpr> situation_objects(const DomainModel& m,
                                                  const SituationData& data);

struct Stratification {
    std::map<std::string, int> stratum;  // derived predicates only, >= 1
    int max_stratum = 0;
    bool stratifiable = true;
};

struct DomainVarInfo {
    Name name;
    TypeExpr type;
    std::optional<NumericValue> initial;
};

enum class NameKind { Type, Constant, DomainVariable, Predicate, Action, Situation };
const char* name_kind_str(NameKind k);

struct DomainModel {
    Name name;
    std::vector<Name> extends;
    ReqSet requirements = 0;  // closed
    TypeHierarchy types;
    std::map<std::string, TypeExpr> constants;
    std::map<std::string, Name> constant_names;
    std::map<std::string, DomainVarInfo> domain_vars;
    std::map<std::string, PredicateSignature> predicates;
    std::vector<GroundLiteralAst> timeless;
    std::vector<SafetySchema> safety;
    std::map<std::string, ActionSchema> actions;
    std::vector<AxiomSchema> axioms;
    std::map<std::string, SituationData> situations;
    std::set<std::string> derived;      // predicates defined by some axiom
    std::set<std::string> derived_neg;  // predicates with a negative :implies
    Stratification strata;
    std::map<std::string, NameKind> name_kinds;

    bool is_type_name(const std::string& canon) const { return types.declared(canon); }
    const ActionSchema* find_action(const std::string& canon) const {
        auto it = actions.find(canon);
        return it == actions.end() ? nullptr : &it->second;
    }
};

struct ProblemModel {
    Name name;
    Name domain;
    ReqSet requirements = 0;  // domain requirements plus own, closed
    std::optional<Name> situation;
    std::vector<std::pair<Name, TypeExpr>> objects;  // own declarations only
    std::vector<GroundLiteralAst> init;              // own literals only
    std::vector<GdPtr> goals;
    std::vector<SpecPtr> expansions;
    std::optional<LengthSpec> length;
    SExprPtr src;
};

// Process-wide table of domains and problems, keyed by canonical name.
// Re-registration replaces the previous entry.  Models are immutable once
// registered; updates (addenda, situations) swap in a modified copy.
struct Registry {
    std::map<std::string, std::shared_ptr<const DomainModel>> domains;
    std::map<std::string, std::shared_ptr<const ProblemModel>> problems;

    std::shared_ptr<const DomainModel> find_domain(const std::string& canon) const {
        auto it = domains.find(canon);
        return it == domains.end() ? nullptr : it->second;
    }
    std::shared_ptr<const ProblemModel> find_problem(const std::string& canon) const {
        auto it = problems.find(canon);
        return it == problems.end() ? nullptr : it->second;
    }
};

std::shared_ptr<const DomainModel> build_domain(const DomainDef& def, Registry& reg,
                                                std::vector<Diagnostic>& diags);
std::shared_ptr<const ProblemModel> build_problem(const ProblemDef& def, Registry& reg,
                                                  std::vector<Diagnostic>& diags);
void build_situation(const SituationDef& def, Registry& reg,
                     std::vector<Diagnostic>& diags);
std::shared_ptr<const DomainModel> apply_addendum(const AddendumDef& def, Registry& reg,
                                                  std::vector<Diagnostic>& diags);

// Runs whichever builder matches; returns diagnostics count delta via `diags`.
void build_definition(const Definition& def, Registry& reg,
                      std::vector<Diagnostic>& diags);

// Exposed for tests.
Stratification stratify(const std::vector<AxiomSchema>& axioms,
                        const std::set<std::string>& derived,
                        std::vector<Diagnostic>* diags);
void check_signatures(const DomainModel& m, std::vector<Diagnostic>& diags);
void check_action_axiom_interaction(const DomainModel& m,
                                    std::vector<Diagnostic>& diags);

// Evaluation-context predicate heads and their arities.
bool builtin_predicate(const std::string& canon, int* min_args = nullptr,
                       int* max_args = nullptr);

}  // namespace pddl
