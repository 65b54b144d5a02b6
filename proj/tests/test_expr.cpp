#include <doctest.h>

#include "cobord/error.hpp"
#include "cobord/expr.hpp"
#include "support.hpp"

using namespace cobord;

TEST_SUITE("expr") {
    TEST_CASE("cycles parse to normalised generators") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Element e = parse_expression(s, "[X ->id_X X ; L2, L1b] @piX");
        Cycle c = make_cycle(s, s.identity(s.object_id("X")), piX, {s.bundle_id("L1"), s.bundle_id("L2")});
        CHECK(e == Element(c));
        CHECK(parse_expression(s, "[X ->id_X X;L1,L2]", piX) == e);
        CHECK(format(s, e) == "[X ->id_X X ; L1,L2]");
    }

    TEST_CASE("linear combinations and integer multiples") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Cycle a = make_cycle(s, s.identity(s.object_id("X")), piX, {s.bundle_id("L1")});
        Cycle b = make_cycle(s, s.morphism_id("h"), piX, {});
        Element e = parse_expression(s, "3*[X ->id_X X ; L1] - [V ->h X] + (2*[V ->h X] - [X ->id_X X ; L1])", piX);
        CHECK(e.coefficient(a) == 2);
        CHECK(e.coefficient(b) == 1);
        CHECK(parse_expression(s, "-[V ->h X]", piX) == -Element(b));
        CHECK(parse_expression(s, "[V ->h X] - [V ->h X]", piX).is_zero());
    }

    TEST_CASE("operations agree with the library calls") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX"), h = s.morphism_id("h");
        Element one = smooth_pullback(s, piX, unit(s, s.object_id("S")));
        CHECK(parse_expression(s, "spull(piX, unit(S))") == one);
        CHECK(parse_expression(s, "chern(L1, spull(piX, unit(S)))") == chern(s, s.bundle_id("L1"), one));
        Element v(make_cycle(s, s.identity(s.object_id("V")), s.morphism_id("q"), {s.bundle_id("L2v")}));
        CHECK(parse_expression(s, "push(h, piX, [V ->id_V V ; L2v] @q)") == pushforward(s, h, piX, v));
        CHECK(parse_expression(s, "orient(h) . orient(piX)") == orientation(s, s.morphism_id("q")));
        CHECK(parse_expression(s, "orient(piX) . unit(S)") ==
              product(s, orientation(s, piX), unit(s, s.object_id("S"))));
    }

    TEST_CASE("external products and pullbacks on the product site") {
        Site s = testing::load("lm2.site");
        auto p1 = s.morphism_id("p1_0");
        Element a(make_cycle(s, s.identity(s.object_id("X1")), p1, {}));
        CHECK(parse_expression(s, "ext([X1 ->id_X1 X1] @p1_0, unit(pt))") ==
              external_product(s, a, unit(s, s.object_id("pt"))));
        CHECK(parse_expression(s, "spull(p12_1, orient(p1_0))") == orientation(s, s.morphism_id("p12_0")));
    }

    TEST_CASE("malformed input raises expression errors with a column") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        CHECK_THROWS_AS(parse_expression(s, "", piX), ExpressionError);
        CHECK_THROWS_AS(parse_expression(s, "[X ->id_X X", piX), ExpressionError);
        CHECK_THROWS_AS(parse_expression(s, "[X ->id_X X] +", piX), ExpressionError);
        CHECK_THROWS_AS(parse_expression(s, "frob(L1)", piX), ExpressionError);
        CHECK_THROWS_AS(parse_expression(s, "[X ->id_X X]"), ExpressionError);
        try {
            parse_expression(s, "[X ->id_X Q]", piX);
            FAIL("expected an error");
        } catch (const ExpressionError& e) {
            CHECK(std::string(e.what()).find("unknown object 'Q'") != std::string::npos);
            CHECK(std::string(e.what()).find("column") != std::string::npos);
        }
    }

    TEST_CASE("semantic mismatches are reported") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        // bundle on the wrong object
        CHECK_THROWS_AS(parse_expression(s, "[X ->id_X X ; L1v]", piX), ExpressionError);
        // h does not map X -> X
        CHECK_THROWS_AS(parse_expression(s, "[X ->h X]", piX), ExpressionError);
        CHECK_THROWS_AS(parse_expression(s, "[X ->id_X X] @piX + [V ->id_V V] @q"), ArrowMismatch);
    }

    TEST_CASE("the synopsis lists every operation") {
        std::string syn = expression_synopsis();
        for (const char* op : {"push", "pull", "spull", "chern", "ext", "unit", "orient"})
            CHECK(syn.find(op) != std::string::npos);
    }
}
