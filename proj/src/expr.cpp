#include "cobord/expr.hpp"

#include <string>

#include "lexer.hpp"

namespace cobord {

namespace {

class ExprParser {
public:
    ExprParser(const Site& site, const std::vector<Token>& tokens, int end_column, std::optional<MorphismId> arrow)
        : site_(site), cur_(tokens, 1, end_column), arrow_(arrow) {}

    Element parse() {
        Element e = expr();
        cur_.expect_end();
        return e;
    }

private:
    Element expr() {
        bool negate = false;
        if (cur_.peek_sym("-")) {
            cur_.next();
            negate = true;
        }
        Element acc = term();
        if (negate) acc = -acc;
        while (cur_.peek_sym("+") || cur_.peek_sym("-")) {
            bool minus = cur_.next().text == "-";
            Element t = term();
            acc = combine(acc, t, minus);
        }
        return acc;
    }

    Element combine(const Element& a, const Element& b, bool minus) {
        if (!a.is_zero() && !b.is_zero() && a.arrow() != b.arrow())
            throw ArrowMismatch("cannot add elements over " + site_.name(a.arrow()) + " and " +
                                site_.name(b.arrow()));
        return minus ? a - b : a + b;
    }

    Element term() {
        if (cur_.peek_kind(TokenKind::Int)) {
            Integer n(cur_.next().text);
            cur_.expect_sym("*");
            return n * product();
        }
        return product();
    }

    Element product() {
        Element acc = atom();
        while (cur_.peek_sym(".")) {
            cur_.next();
            Element rhs = atom();
            acc = cobord::product(site_, acc, rhs);
        }
        return acc;
    }

    Element atom() {
        if (cur_.peek_sym("[")) return cycle();
        if (cur_.peek_sym("(")) {
            cur_.next();
            Element e = expr();
            cur_.expect_sym(")");
            return e;
        }
        if (cur_.peek_kind(TokenKind::Ident)) return call();
        cur_.fail("expected a cycle, '(' or an operation");
    }

    Element cycle() {
        cur_.expect_sym("[");
        ObjectId v = object(cur_.expect_ident("source object"));
        cur_.expect_sym("->");
        MorphismId h = morphism(cur_.expect_ident("structure morphism"));
        ObjectId x = object(cur_.expect_ident("target object"));
        const Morphism& hm = site_.morphism(h);
        if (hm.source != v || hm.target != x)
            cur_.fail("morphism " + hm.name + " is " + site_.describe(h));
        std::vector<BundleId> bundles;
        if (cur_.peek_sym(";")) {
            cur_.next();
            if (!cur_.peek_sym("]")) {
                bundles.push_back(bundle(cur_.expect_ident("bundle")));
                while (cur_.peek_sym(",")) {
                    cur_.next();
                    bundles.push_back(bundle(cur_.expect_ident("bundle")));
                }
            }
        }
        cur_.expect_sym("]");
        std::optional<MorphismId> over = arrow_;
        if (cur_.peek_sym("@")) {
            cur_.next();
            over = morphism(cur_.expect_ident("arrow"));
        }
        if (!over) cur_.fail("cycle needs an arrow: add '@arrow' or pass a default");
        for (BundleId b : bundles)
            if (site_.bundle(b).base != v) cur_.fail("bundle " + site_.name(b) + " does not live on " + site_.name(v));
        return Element(make_cycle(site_, v, h, *over, std::move(bundles)));
    }

    Element call() {
        const Token& op = cur_.expect_ident("operation");
        cur_.expect_sym("(");
        Element out;
        if (op.text == "push") {
            MorphismId f = morphism(cur_.expect_ident("morphism"));
            comma();
            MorphismId g = morphism(cur_.expect_ident("morphism"));
            comma();
            Element a = expr();
            out = pushforward(site_, f, g, a);
        } else if (op.text == "pull") {
            MorphismId g = morphism(cur_.expect_ident("morphism"));
            comma();
            Element a = expr();
            out = pullback(site_, g, a);
        } else if (op.text == "spull") {
            MorphismId f = morphism(cur_.expect_ident("morphism"));
            comma();
            Element a = expr();
            out = smooth_pullback(site_, f, a);
        } else if (op.text == "chern") {
            BundleId l = bundle(cur_.expect_ident("bundle"));
            comma();
            Element a = expr();
            out = chern(site_, l, a);
        } else if (op.text == "ext") {
            Element a = expr();
            comma();
            Element b = expr();
            out = external_product(site_, a, b);
        } else if (op.text == "unit") {
            out = unit(site_, object(cur_.expect_ident("object")));
        } else if (op.text == "orient") {
            out = orientation(site_, morphism(cur_.expect_ident("morphism")));
        } else {
            throw ExpressionError("column " + std::to_string(op.column) + ": unknown operation '" + op.text + "'");
        }
        cur_.expect_sym(")");
        return out;
    }

    void comma() { cur_.expect_sym(","); }

    ObjectId object(const Token& t) {
        auto id = site_.find_object(t.text);
        if (!id) unknown("object", t);
        return *id;
    }
    MorphismId morphism(const Token& t) {
        auto id = site_.find_morphism(t.text);
        if (!id) unknown("morphism", t);
        return *id;
    }
    BundleId bundle(const Token& t) {
        auto id = site_.find_bundle(t.text);
        if (!id) unknown("bundle", t);
        return *id;
    }
    [[noreturn]] void unknown(const char* what, const Token& t) {
        throw ExpressionError("column " + std::to_string(t.column) + ": unknown " + what + " '" + t.text + "'");
    }

    const Site& site_;
    TokenCursor cur_;
    std::optional<MorphismId> arrow_;
};

}  // namespace

std::string expression_synopsis() {
    return "expression grammar:\n"
           "  expr    := ['-'] term (('+' | '-') term)*\n"
           "  term    := [INT '*'] product\n"
           "  product := atom ('.' atom)*\n"
           "  atom    := cycle | '(' expr ')' | call\n"
           "  cycle   := '[' V '->' h X [';' L (',' L)*] ']' ['@' arrow]\n"
           "  call    := push(f, g, expr) | pull(g, expr) | spull(f, expr) | chern(L, expr)\n"
           "           | ext(expr, expr) | unit(X) | orient(f)\n";
}

Element parse_expression(const Site& site, std::string_view text, std::optional<MorphismId> default_arrow) {
    std::vector<Token> tokens;
    try {
        tokens = tokenize_line(text, 1);
        if (tokens.empty()) throw ExpressionError("empty expression");
        ExprParser p(site, tokens, static_cast<int>(text.size()) + 1, default_arrow);
        return p.parse();
    } catch (const ParseError& e) {
        std::string what = e.what();
        auto at = what.find("]: ");
        throw ExpressionError("column " + std::to_string(e.column()) + ": " +
                              (at == std::string::npos ? what : what.substr(at + 3)));
    }
}

}  // namespace cobord
