#pragma once

#include <string>
#include <vector>

#include "pddl/diag.hpp"
#include "pddl/sexpr.hpp"

namespace pddl {

struct PrintOptions {
    int width = 80;             // lines kept within this where splittable
    bool preserve_case = false; // emit original spellings instead of canonical
};

// Deterministic layout: forms that fit are printed flat; otherwise fields go
// on their own lines, indented 3 spaces under a keyword head and 2 elsewhere.
std::string pretty_print(const SExprPtr& form, const PrintOptions& opts = {});
std::string pretty_print(const std::vector<SExprPtr>& forms,
                         const PrintOptions& opts = {});

struct ChkDocument {
    std::string text;  // whole document, trailer line included
    size_t errors = 0;
    size_t warnings = 0;
    // Offset of each diagnostic's `<<` in text, parallel to the input list.
    std::vector<size_t> anchors;
};

// The whole input re-printed with every diagnostic flagged in place as
// `<< description: thing >>`.  Diagnostics anchored to nodes that are not
// part of the printed tree (lexer-level ones) become comment lines before
// the trailer `;; N error(s), M warning(s)`.
ChkDocument render_chk(const std::vector<SExprPtr>& forms,
                       const std::vector<Diagnostic>& diags,
                       const PrintOptions& opts = {});

// briefcase.pddl -> briefcase.chk, placed next to the input or in out_dir.
std::string chk_path(const std::string& input_path, const std::string& out_dir = "");

// Removes every flag envelope, leaving the flagged subexpressions in place.
std::string strip_flags(const std::string& chk_text);

}  // namespace pddl
