#include "pddl/report.hpp"

#include <filesystem>
#include <map>
#include <set>

namespace pddl {

namespace {

void collect_nodes(const SExprPtr& e, std::set<const SExpr*>& out) {
    if (!e) return;
    out.insert(e.get());
    for (const SExprPtr& c : e->items) collect_nodes(c, out);
}

struct Renderer {
    int width = 80;
    bool preserve = false;
    const std::vector<Diagnostic>* diags = nullptr;
    // Node -> indices into *diags, in input order.
    std::map<const SExpr*, std::vector<size_t>> flags;
    std::string out;
    std::vector<std::pair<size_t, size_t>> anchors;  // (diagnostic index, offset)

    int col() const {
        size_t nl = out.rfind('\n');
        return int(nl == std::string::npos ? out.size() : out.size() - nl - 1);
    }

    std::string atom_text(const SExpr& e) const {
        if (e.kind == AtomKind::Number) return e.text;
        return preserve ? e.text : e.canon;
    }

    const std::vector<size_t>* flags_for(const SExpr& e) const {
        auto it = flags.find(&e);
        return it == flags.end() ? nullptr : &it->second;
    }

    // Measurement-only single-line form, flag envelopes included.
    void flat_into(const SExpr& e, std::string& s) const {
        const auto* fl = flags_for(e);
        if (fl)
            for (size_t idx : *fl) {
                s += "<< ";
                s += (*diags)[idx].message;
                s += ": ";
            }
        if (e.atom()) {
            s += atom_text(e);
        } else {
            s += "(";
            for (size_t i = 0; i < e.items.size(); i++) {
                if (i) s += " ";
                flat_into(*e.items[i], s);
            }
            s += ")";
        }
        if (fl)
            for (size_t i = 0; i < fl->size(); i++) s += " >>";
    }
    std::string flat(const SExpr& e) const {
        std::string s;
        flat_into(e, s);
        return s;
    }

    void open_flags(const SExpr& e) {
        const auto* fl = flags_for(e);
        if (!fl) return;
        for (size_t idx : *fl) {
            anchors.push_back({idx, out.size()});
            out += "<< ";
            out += (*diags)[idx].message;
            out += ": ";
        }
    }
    void close_flags(const SExpr& e) {
        const auto* fl = flags_for(e);
        if (!fl) return;
        for (size_t i = 0; i < fl->size(); i++) out += " >>";
    }

    void emit_flat(const SExpr& e) {
        open_flags(e);
        if (e.atom()) {
            out += atom_text(e);
        } else {
            out += "(";
            for (size_t i = 0; i < e.items.size(); i++) {
                if (i) out += " ";
                emit_flat(*e.items[i]);
            }
            out += ")";
        }
        close_flags(e);
    }

    void emit(const SExpr& e) {
        if (e.atom() || col() + int(flat(e).size()) <= width) {
            emit_flat(e);
            return;
        }
        emit_broken(e);
    }

    void newline(int indent) {
        out += "\n";
        out.append(size_t(indent), ' ');
    }

    void emit_broken(const SExpr& e) {
        open_flags(e);
        int base = col();
        bool kw_head = !e.items.empty() && e.items[0]->atom() &&
                       e.items[0]->kind == AtomKind::Keyword;
        int ind = base + (kw_head ? 3 : 2);
        out += "(";
        bool after_kw = false;  // current line ends with a field keyword
        for (size_t i = 0; i < e.items.size(); i++) {
            const SExpr& it = *e.items[i];
            bool kw_atom = it.atom() && it.kind == AtomKind::Keyword;
            if (i == 0) {
                emit(it);
                after_kw = kw_atom;
                continue;
            }
            if (it.atom()) {
                bool fits = col() + 1 + int(flat(it).size()) <= width;
                // Field keywords start their own line unless they are the
                // value of the previous keyword (e.g. requirement flags).
                if (fits && (!kw_atom || after_kw)) {
                    out += " ";
                    emit_flat(it);
                } else {
                    newline(ind);
                    emit_flat(it);
                }
                after_kw = kw_atom;
                continue;
            }
            bool attach =
                after_kw || (i == 1 && e.items[0]->atom() && !kw_head &&
                             col() + 1 + int(flat(it).size()) <= width);
            if (attach) {
                out += " ";
            } else {
                newline(ind);
            }
            emit(it);
            after_kw = false;
        }
        out += ")";
        close_flags(e);
    }
};

}  // namespace

std::string pretty_print(const SExprPtr& form, const PrintOptions& opts) {
    if (!form) return "";
    Renderer r;
    r.width = opts.width;
    r.preserve = opts.preserve_case;
    r.emit(*form);
    return r.out;
}

std::string pretty_print(const std::vector<SExprPtr>& forms, const PrintOptions& opts) {
    Renderer r;
    r.width = opts.width;
    r.preserve = opts.preserve_case;
    for (size_t i = 0; i < forms.size(); i++) {
        if (i) r.out += "\n\n";
        if (forms[i]) r.emit(*forms[i]);
    }
    r.out += "\n";
    return r.out;
}

ChkDocument render_chk(const std::vector<SExprPtr>& forms,
                       const std::vector<Diagnostic>& diags,
                       const PrintOptions& opts) {
    std::set<const SExpr*> in_tree;
    for (const SExprPtr& f : forms) collect_nodes(f, in_tree);

    Renderer r;
    r.width = opts.width;
    r.preserve = opts.preserve_case;
    r.diags = &diags;
    std::vector<size_t> orphans;
    for (size_t i = 0; i < diags.size(); i++) {
        const SExpr* n = diags[i].node.get();
        if (n && in_tree.count(n))
            r.flags[n].push_back(i);
        else
            orphans.push_back(i);
    }

    for (const SExprPtr& f : forms) {
        if (!f) continue;
        r.emit(*f);
        r.out += "\n\n";
    }
    for (size_t idx : orphans) {
        r.out += ";; ";
        r.anchors.push_back({idx, r.out.size()});
        r.out += "<< ";
        r.out += diags[idx].message;
        r.out += ": ";
        r.out += diags[idx].node ? sexpr_str(diags[idx].node) : "?";
        r.out += " >>\n";
    }

    ChkDocument doc;
    for (const Diagnostic& d : diags)
        (d.severity == Severity::Error ? doc.errors : doc.warnings)++;
    r.out += ";; " + std::to_string(doc.errors) + " error(s), " +
             std::to_string(doc.warnings) + " warning(s)\n";

    doc.text = std::move(r.out);
    doc.anchors.assign(diags.size(), std::string::npos);
    for (const auto& [idx, off] : r.anchors) doc.anchors[idx] = off;
    return doc;
}

std::string chk_path(const std::string& input_path, const std::string& out_dir) {
    std::filesystem::path p(input_path);
    p.replace_extension(".chk");
    if (!out_dir.empty()) return (std::filesystem::path(out_dir) / p.filename()).string();
    return p.string();
}

std::string strip_flags(const std::string& chk_text) {
    std::string out;
    size_t i = 0;
    while (i < chk_text.size()) {
        if (chk_text.compare(i, 3, "<< ") == 0) {
            size_t c = chk_text.find(": ", i + 3);
            if (c != std::string::npos) {
                i = c + 2;
                continue;
            }
        }
        if (chk_text.compare(i, 3, " >>") == 0) {
            i += 3;
            continue;
        }
        out += chk_text[i++];
    }
    return out;
}

}  // namespace pddl
