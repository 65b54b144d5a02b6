// Parser for the site description language. See docs/site-format.md.

#include <fstream>
#include <sstream>

#include "cobord/error.hpp"
#include "cobord/site.hpp"
#include "lexer.hpp"

namespace cobord {

namespace {

enum class Section { None, Objects, Morphisms, Composites, Squares, Bundles, Pullbacks, Tensors, IsoClasses, Sections, Resolutions };

struct Statement {
    Section section;
    std::vector<Token> tokens;
    int line;
};

Section section_from(const std::string& n) {
    if (n == "objects") return Section::Objects;
    if (n == "morphisms") return Section::Morphisms;
    if (n == "composites") return Section::Composites;
    if (n == "squares") return Section::Squares;
    if (n == "bundles") return Section::Bundles;
    if (n == "pullbacks") return Section::Pullbacks;
    if (n == "tensors") return Section::Tensors;
    if (n == "isoclasses") return Section::IsoClasses;
    if (n == "sections") return Section::Sections;
    if (n == "resolutions") return Section::Resolutions;
    return Section::None;
}

const char* keyword_for(Section s) {
    switch (s) {
        case Section::Objects: return "object";
        case Section::Morphisms: return "morphism";
        case Section::Composites: return "composite";
        case Section::Squares: return "square";
        case Section::Bundles: return "bundle";
        case Section::Pullbacks: return "pullback";
        case Section::Tensors: return "tensor";
        case Section::IsoClasses: return "iso";
        case Section::Sections: return "section";
        case Section::Resolutions: return "resolution";
        case Section::None: break;
    }
    return "";
}

class Builder {
public:
    explicit Builder(Site& site) : site_(site) {}

    ObjectId object(const Token& t) const {
        if (auto id = site_.find_object(t.text)) return *id;
        throw unknown(t, "object");
    }
    MorphismId morphism(const Token& t) const {
        if (auto id = site_.find_morphism(t.text)) return *id;
        throw unknown(t, "morphism");
    }
    BundleId bundle(const Token& t) const {
        if (auto id = site_.find_bundle(t.text)) return *id;
        throw unknown(t, "bundle");
    }

private:
    static ValidationError unknown(const Token& t, const std::string& kind) {
        return ValidationError("V016", t.line,
                               "column " + std::to_string(t.column) + ": unknown " + kind + " '" + t.text + "'");
    }
    Site& site_;
};

int parse_int(const Token& t) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(t.text, &pos);
        if (pos != t.text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(t.line, t.column, "P007", "invalid integer '" + t.text + "'");
    }
}

}  // namespace

Site parse_site(std::string_view text, Validation mode) {
    std::vector<Statement> statements;
    Section current = Section::None;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize_line(line, line_no);
        if (tokens.empty()) continue;
        TokenCursor cur(tokens, line_no, static_cast<int>(line.size()) + 1);
        if (cur.peek_sym("[")) {
            cur.next();
            const Token& name = cur.expect_ident("section name");
            cur.expect_sym("]");
            cur.expect_end();
            current = section_from(name.text);
            if (current == Section::None)
                throw ParseError(name.line, name.column, "P002", "unknown section [" + name.text + "]");
            continue;
        }
        if (current == Section::None)
            throw ParseError(line_no, tokens.front().column, "P003", "statement outside of any section");
        const Token& kw = tokens.front();
        if (kw.kind != TokenKind::Ident || kw.text != keyword_for(current))
            throw ParseError(kw.line, kw.column, "P004",
                             "expected '" + std::string(keyword_for(current)) + "' in this section, found '" + kw.text +
                                 "'");
        statements.push_back({current, std::move(tokens), line_no});
    }

    Site site;
    Builder b(site);
    auto pass = [&](Section s, auto&& handle) {
        for (const auto& st : statements)
            if (st.section == s) {
                TokenCursor cur(st.tokens, st.line, 0);
                cur.next();  // keyword
                handle(cur, st.line);
            }
    };

    pass(Section::Objects, [&](TokenCursor& cur, int line) {
        SiteObject o;
        o.name = cur.expect_ident("object name").text;
        o.line = line;
        bool have_dim = false;
        while (!cur.at_end()) {
            const Token& key = cur.expect_ident("attribute");
            if (key.text == "dim") {
                if (have_dim) throw ParseError(key.line, key.column, "P006", "duplicate key 'dim'");
                cur.expect_sym("=");
                o.dim = parse_int(cur.expect_int("dimension"));
                have_dim = true;
            } else if (key.text == "smooth") {
                if (o.smooth) throw ParseError(key.line, key.column, "P006", "duplicate flag 'smooth'");
                o.smooth = true;
            } else {
                throw ParseError(key.line, key.column, "P005", "unknown key '" + key.text + "' for object");
            }
        }
        if (!have_dim) throw ParseError(line, cur.column(), "P001", "object needs dim=");
        site.add_object(std::move(o));
    });

    pass(Section::Morphisms, [&](TokenCursor& cur, int line) {
        Morphism m;
        m.name = cur.expect_ident("morphism name").text;
        m.line = line;
        cur.expect_sym(":");
        m.source = b.object(cur.expect_ident("source object"));
        cur.expect_sym("->");
        m.target = b.object(cur.expect_ident("target object"));
        bool seen_proper = false, seen_smooth = false;
        while (!cur.at_end()) {
            const Token& key = cur.expect_ident("flag");
            if (key.text == "proper") {
                if (seen_proper) throw ParseError(key.line, key.column, "P006", "duplicate flag 'proper'");
                seen_proper = m.proper = true;
            } else if (key.text == "smooth") {
                if (seen_smooth) throw ParseError(key.line, key.column, "P006", "duplicate flag 'smooth'");
                seen_smooth = m.smooth = true;
            } else if (key.text == "reldim") {
                if (m.rel_dim) throw ParseError(key.line, key.column, "P006", "duplicate key 'reldim'");
                cur.expect_sym("=");
                m.rel_dim = parse_int(cur.expect_int("relative dimension"));
            } else {
                throw ParseError(key.line, key.column, "P005", "unknown key '" + key.text + "' for morphism");
            }
        }
        site.add_morphism(std::move(m));
    });

    pass(Section::Bundles, [&](TokenCursor& cur, int line) {
        LineBundle l;
        l.name = cur.expect_ident("bundle name").text;
        l.line = line;
        cur.expect_keyword("on");
        l.base = b.object(cur.expect_ident("object"));
        cur.expect_end();
        site.add_bundle(std::move(l));
    });

    pass(Section::Composites, [&](TokenCursor& cur, int line) {
        auto g = b.morphism(cur.expect_ident("morphism"));
        cur.expect_sym(".");
        auto f = b.morphism(cur.expect_ident("morphism"));
        cur.expect_sym("=");
        auto k = b.morphism(cur.expect_ident("morphism"));
        cur.expect_end();
        site.add_composite(g, f, k, line);
    });

    pass(Section::Squares, [&](TokenCursor& cur, int line) {
        FiberSquare s;
        cur.expect_sym("(");
        s.f = b.morphism(cur.expect_ident("morphism"));
        cur.expect_sym(",");
        s.g = b.morphism(cur.expect_ident("morphism"));
        cur.expect_sym(")");
        bool corner = false, p1 = false, p2 = false;
        while (!cur.at_end()) {
            const Token& key = cur.expect_ident("key");
            bool* seen = key.text == "corner" ? &corner : key.text == "proj1" ? &p1 : key.text == "proj2" ? &p2 : nullptr;
            if (!seen) throw ParseError(key.line, key.column, "P005", "unknown key '" + key.text + "' for square");
            if (*seen) throw ParseError(key.line, key.column, "P006", "duplicate key '" + key.text + "'");
            *seen = true;
            cur.expect_sym("=");
            const Token& v = cur.expect_ident("value");
            if (key.text == "corner")
                s.corner = b.object(v);
            else if (key.text == "proj1")
                s.g_prime = b.morphism(v);
            else
                s.f_prime = b.morphism(v);
        }
        if (!corner || !p1 || !p2) throw ParseError(line, cur.column(), "P001", "square needs corner=, proj1= and proj2=");
        site.add_square(s, line);
    });

    pass(Section::Pullbacks, [&](TokenCursor& cur, int line) {
        auto f = b.morphism(cur.expect_ident("morphism"));
        cur.expect_sym("*");
        auto l = b.bundle(cur.expect_ident("bundle"));
        cur.expect_sym("=");
        auto r = b.bundle(cur.expect_ident("bundle"));
        cur.expect_end();
        site.add_pullback(f, l, r, line);
    });

    pass(Section::Tensors, [&](TokenCursor& cur, int line) {
        TensorEntry t;
        t.line = line;
        t.left = b.bundle(cur.expect_ident("bundle"));
        cur.expect_sym("(x)");
        t.right = b.bundle(cur.expect_ident("bundle"));
        cur.expect_sym("=");
        t.result = b.bundle(cur.expect_ident("bundle"));
        cur.expect_keyword("on");
        auto base = b.object(cur.expect_ident("object"));
        cur.expect_end();
        if (site.bundle(t.left).base != base)
            throw ValidationError("V011", line, "tensor: bundle '" + site.name(t.left) + "' is not on " + site.name(base));
        site.add_tensor(t);
    });

    pass(Section::IsoClasses, [&](TokenCursor& cur, int) {
        auto first = b.bundle(cur.expect_ident("bundle"));
        cur.expect_sym("~");
        site.add_iso(first, b.bundle(cur.expect_ident("bundle")));
        while (!cur.at_end()) {
            cur.expect_sym("~");
            site.add_iso(first, b.bundle(cur.expect_ident("bundle")));
        }
    });

    pass(Section::Sections, [&](TokenCursor& cur, int line) {
        SectionDatum s;
        s.line = line;
        s.name = cur.expect_ident("section name").text;
        cur.expect_sym(":");
        s.bundle = b.bundle(cur.expect_ident("bundle"));
        cur.expect_keyword("on");
        s.base = b.object(cur.expect_ident("object"));
        bool zero = false, incl = false, empty = false;
        while (!cur.at_end()) {
            const Token& key = cur.expect_ident("key");
            if (key.text != "zero" && key.text != "incl")
                throw ParseError(key.line, key.column, "P005", "unknown key '" + key.text + "' for section");
            bool& seen = key.text == "zero" ? zero : incl;
            if (seen) throw ParseError(key.line, key.column, "P006", "duplicate key '" + key.text + "'");
            seen = true;
            cur.expect_sym("=");
            const Token& v = cur.expect_ident("value");
            if (key.text == "zero") {
                if (v.text == "empty")
                    empty = true;
                else
                    s.zero_locus = b.object(v);
            } else {
                s.inclusion = b.morphism(v);
            }
        }
        if (!zero) throw ParseError(line, cur.column(), "P001", "section needs zero=");
        if (empty && incl) throw ParseError(line, cur.column(), "P001", "an empty zero locus takes no incl=");
        site.add_section(std::move(s));
    });

    pass(Section::Resolutions, [&](TokenCursor& cur, int line) {
        Resolution r;
        r.line = line;
        const Token& name = cur.expect_ident("resolution map");
        r.name = name.text;
        r.map = b.morphism(name);
        cur.expect_sym(":");
        auto src = b.object(cur.expect_ident("source object"));
        cur.expect_sym("->");
        auto tgt = b.object(cur.expect_ident("target object"));
        cur.expect_end();
        const auto& m = site.morphism(r.map);
        if (m.source != src || m.target != tgt)
            throw ValidationError("V015", line, "resolution '" + r.name + "' does not match the declared morphism");
        site.add_resolution(std::move(r));
    });

    site.finalize(mode);
    return site;
}

Site load_site(const std::string& path, Validation mode) {
    std::ifstream in(path);
    if (!in) throw Error("IOError", "cannot read site file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_site(ss.str(), mode);
}

}  // namespace cobord
