#pragma once

#include <optional>

#include "pddl/ast.hpp"

namespace pddl {

struct ParseOptions {
    // Canonical field order, one definition per file, no addenda.
    bool strict = false;
};

// Context shared by the recursive-descent routines: diagnostics and the
// requirement demands of the definition being parsed.
struct ParserCtx {
    std::vector<Diagnostic>* diags;
    std::vector<ReqDemand>* demands;
    bool strict = false;

    void diag(DiagId id, SExprPtr node, const std::string& detail = "") {
        diags->push_back(make_diag(id, std::move(node), detail));
    }
    void demand(uint32_t any_of, const char* flag_text, SExprPtr node,
                bool warn_only = false) {
        demands->push_back(ReqDemand{any_of, std::move(node), warn_only, flag_text});
    }
};

// Typed lists come in two flavors; both accept `- <type>` group separators.
enum class TypedItemKind { Names, Variables };

TypedList parse_typed_list(const std::vector<SExprPtr>& items, size_t begin,
                           size_t end, TypedItemKind kind, ParserCtx& ctx,
                           SExprPtr src);
TypeExpr parse_type_expr(const SExprPtr& e, ParserCtx& ctx);
std::optional<Term> parse_term(const SExprPtr& e, ParserCtx& ctx);

GdPtr parse_gd(const SExprPtr& e, ParserCtx& ctx);
EffectPtr parse_effect(const SExprPtr& e, ParserCtx& ctx);
ExprPtr parse_expr(const SExprPtr& e, ParserCtx& ctx);
SpecPtr parse_action_spec(const SExprPtr& e, ParserCtx& ctx,
                          bool constraint_pos = false);

// `e` must be a (define ...) form; diagnostics go into the per-definition
// vectors inside the result.  Returns nullopt when nothing salvageable.
std::optional<Definition> parse_definition(const SExprPtr& e,
                                           std::vector<Diagnostic>& diags,
                                           const ParseOptions& opts);

ParsedFile parse_file(std::string path, std::string text,
                      const ParseOptions& opts = {});
ParsedFile parse_file_from_disk(const std::string& path,
                                const ParseOptions& opts = {});

// Ground plan steps: "(functor arg*)" with constant/number args.
struct PlanStepAst {
    Name functor;
    std::vector<Term> args;
    SExprPtr src;
};
struct SolutionAst {
    std::vector<PlanStepAst> steps;
    std::vector<PlanStepAst> hints;
    std::vector<Diagnostic> diags;
};
// A solution file holds one list of steps and an optional list of hints.
SolutionAst parse_solution(const std::string& text);

}  // namespace pddl
