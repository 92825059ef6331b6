#include "pddl/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace pddl {

std::string NumericValue::str() const {
    if (is_int()) return std::to_string(i);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

SExprPtr make_atom(AtomKind kind, std::string text, SourceSpan span) {
    auto e = std::make_shared<SExpr>();
    e->span = span;
    e->kind = kind;
    e->canon = to_lower(text);
    e->text = std::move(text);
    return e;
}

SExprPtr make_list(std::vector<SExprPtr> items, SourceSpan span) {
    auto e = std::make_shared<SExpr>();
    e->span = span;
    e->list = true;
    e->items = std::move(items);
    return e;
}

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

bool name_shaped(std::string_view s) {
    if (s.empty() || !name_start(s[0])) return false;
    for (char c : s.substr(1))
        if (!name_char(c)) return false;
    return true;
}

// Operator atoms that are legal outside of names.
bool operator_atom(std::string_view s) {
    return s == "-" || s == "--" || s == "=" || s == "<" || s == ">" ||
           s == "<=" || s == ">=" || s == "+" || s == "*" || s == "/" ||
           s == "^^";
}

// sign? digits ('.' digits)?
bool number_shaped(std::string_view s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) i++;
    size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) i++, digits++;
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '.') return false;
    i++;
    size_t frac = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) i++, frac++;
    return frac > 0 && i == s.size();
}

bool numberish(std::string_view s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) i++;
    return i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.');
}

NumericValue parse_number(std::string_view s) {
    if (s.find('.') == std::string_view::npos) {
        int64_t v = 0;
        auto first = s.data();
        if (!s.empty() && s[0] == '+') first++;  // from_chars rejects '+'
        auto res = std::from_chars(first, s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size())
            return NumericValue::integer(v);
    }
    return NumericValue::real(std::strtod(std::string(s).c_str(), nullptr));
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags) {
    std::vector<Token> toks;
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; k++) {
            if (text[i + k] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ';') {  // comment to end of line, acts as whitespace
            size_t j = i;
            while (j < text.size() && text[j] != '\n') j++;
            advance(j - i);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        SourceSpan span{i, i + 1, line, col};
        if (c == '(' || c == ')') {
            Token t;
            t.span = span;
            t.text = c;
            (c == '(' ? t.lparen : t.rparen) = true;
            toks.push_back(std::move(t));
            advance(1);
            continue;
        }
        // Accumulate an atom.
        size_t j = i;
        while (j < text.size() && text[j] != '(' && text[j] != ')' &&
               text[j] != ';' && !std::isspace(static_cast<unsigned char>(text[j])))
            j++;
        std::string_view word = text.substr(i, j - i);
        span.end = j;
        Token t;
        t.span = span;
        t.text = word;
        if (word[0] == ':') {
            t.kind = AtomKind::Keyword;
            if (!name_shaped(word.substr(1)))
                diags.push_back(make_diag(DiagId::IllegalCharacter,
                                          make_atom(AtomKind::Keyword, t.text, span)));
        } else if (word[0] == '?') {
            t.kind = AtomKind::Variable;
            if (!name_shaped(word.substr(1)))
                diags.push_back(make_diag(DiagId::IllegalCharacter,
                                          make_atom(AtomKind::Variable, t.text, span)));
        } else if (number_shaped(word)) {
            t.kind = AtomKind::Number;
            t.num = parse_number(word);
        } else if (operator_atom(word) || name_shaped(word)) {
            t.kind = AtomKind::Symbol;
        } else if (numberish(word)) {
            t.kind = AtomKind::Symbol;
            diags.push_back(make_diag(DiagId::MalformedNumber,
                                      make_atom(AtomKind::Symbol, t.text, span)));
        } else {
            t.kind = AtomKind::Symbol;
            diags.push_back(make_diag(DiagId::IllegalCharacter,
                                      make_atom(AtomKind::Symbol, t.text, span)));
        }
        toks.push_back(std::move(t));
        advance(j - i);
    }
    return toks;
}

std::vector<SExprPtr> read_sexprs(std::string_view text, std::vector<Diagnostic>& diags) {
    std::vector<Token> toks = tokenize(text, diags);
    std::vector<SExprPtr> top;
    // Stack of open lists (their items and opening span).
    struct Open {
        std::vector<SExprPtr> items;
        SourceSpan span;
    };
    std::vector<Open> stack;
    auto emit = [&](SExprPtr e) {
        if (stack.empty())
            top.push_back(std::move(e));
        else
            stack.back().items.push_back(std::move(e));
    };
    for (const Token& t : toks) {
        if (t.lparen) {
            stack.push_back(Open{{}, t.span});
        } else if (t.rparen) {
            if (stack.empty()) {
                auto stray = make_atom(AtomKind::Symbol, ")", t.span);
                stray->synthetic = true;
                diags.push_back(make_diag(DiagId::UnmatchedRightParen, stray));
                top.push_back(stray);
            } else {
                Open open = std::move(stack.back());
                stack.pop_back();
                SourceSpan span = open.span;
                span.end = t.span.end;
                emit(make_list(std::move(open.items), span));
            }
        } else {
            auto a = make_atom(t.kind, t.text, t.span);
            a->num = t.num;
            emit(std::move(a));
        }
    }
    // Close unclosed lists at end of input, one diagnostic each.
    while (!stack.empty()) {
        Open open = std::move(stack.back());
        stack.pop_back();
        SourceSpan span = open.span;
        span.end = text.size();
        auto lst = make_list(std::move(open.items), span);
        diags.push_back(make_diag(DiagId::MissingRightParen, lst));
        if (stack.empty())
            top.push_back(std::move(lst));
        else
            stack.back().items.push_back(std::move(lst));
    }
    return top;
}

std::string sexpr_str(const SExpr& e) {
    if (!e.list) return e.kind == AtomKind::Number ? e.text : e.canon;
    std::string out = "(";
    for (size_t i = 0; i < e.items.size(); i++) {
        if (i) out += " ";
        out += sexpr_str(*e.items[i]);
    }
    out += ")";
    return out;
}

bool sexpr_equal(const SExpr& a, const SExpr& b) {
    if (a.list != b.list) return false;
    if (!a.list) {
        if (a.kind != b.kind) return false;
        if (a.kind == AtomKind::Number) return a.num == b.num;
        return a.canon == b.canon;
    }
    if (a.items.size() != b.items.size()) return false;
    for (size_t i = 0; i < a.items.size(); i++)
        if (!sexpr_equal(*a.items[i], *b.items[i])) return false;
    return true;
}

}  // namespace pddl
