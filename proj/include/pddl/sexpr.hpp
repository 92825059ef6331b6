#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pddl/diag.hpp"
#include "pddl/numeric.hpp"

namespace pddl {

struct SourceSpan {
    size_t begin = 0;  // byte offsets into the source text, [begin,end)
    size_t end = 0;
    int line = 1;  // 1-based position of begin
    int col = 1;
};

enum class AtomKind { Symbol, Keyword, Variable, Number };

// Concrete syntax tree.  Atoms keep both the original spelling and the
// canonical (lower-cased) form; names are case-insensitive in this language.
struct SExpr {
    SourceSpan span;
    bool list = false;
    // Atom payload.
    AtomKind kind = AtomKind::Symbol;
    std::string text;   // original spelling
    std::string canon;  // lower-cased
    NumericValue num;   // valid when kind == Number
    // List payload.
    std::vector<SExprPtr> items;
    // Reader-generated placeholder (e.g. a stray right paren); parsers skip
    // these silently since the reader already flagged them.
    bool synthetic = false;

    bool atom() const { return !list; }
    bool is_sym(const char* s) const {
        return !list && kind != AtomKind::Number && canon == s;
    }
};

std::string to_lower(std::string_view s);

SExprPtr make_atom(AtomKind kind, std::string text, SourceSpan span = {});
SExprPtr make_list(std::vector<SExprPtr> items, SourceSpan span = {});

struct Token {
    AtomKind kind = AtomKind::Symbol;
    bool lparen = false, rparen = false;
    std::string text;
    SourceSpan span;
    NumericValue num;
};

// Comments (';' to end of line) behave like a single space.  Illegal
// characters are flagged and skipped; tokenization always continues.
std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags);

// Balanced-list reader.  Unclosed lists are closed at end of input (one
// diagnostic each); stray right parens become flagged synthetic atoms so the
// .chk printer can show them in place.
std::vector<SExprPtr> read_sexprs(std::string_view text, std::vector<Diagnostic>& diags);

// Compact one-line rendering (canonical case), used in diagnostics and tests.
std::string sexpr_str(const SExpr& e);
inline std::string sexpr_str(const SExprPtr& e) { return e ? sexpr_str(*e) : ""; }

// Structural equality on canonical atoms, ignoring spans.
bool sexpr_equal(const SExpr& a, const SExpr& b);
inline bool sexpr_equal(const SExprPtr& a, const SExprPtr& b) {
    if (!a || !b) return a == b;
    return sexpr_equal(*a, *b);
}

}  // namespace pddl
