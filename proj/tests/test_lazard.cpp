#include <doctest.h>

#include "cobord/error.hpp"
#include "cobord/lazard.hpp"
#include "cobord/quotient.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cobord;

TEST_SUITE("lazard") {
    TEST_CASE("oracle ranks for N = 4 are the partition numbers 1, 1, 2, 3") {
        oracle::LazardOracle o(4);
        CHECK(o.rank(0) == 1);
        CHECK(o.rank(1) == 1);
        CHECK(o.rank(2) == 2);
        CHECK(o.rank(3) == 3);
    }

    TEST_CASE("graded ranks match the oracle for N = 3, 4, 5") {
        for (int n : {3, 4, 5}) {
            LazardRing ring(n);
            oracle::LazardOracle o(n);
            for (int d = 0; d <= ring.max_degree(); ++d) {
                CAPTURE(n);
                CAPTURE(d);
                CHECK(ring.rank(d) == o.rank(d));
                CHECK(ring.torsion(d).empty());
            }
        }
    }

    TEST_CASE("the universal law is unital, symmetric and associative after reduction") {
        for (int n : {2, 3, 4, 5}) {
            FormalGroupLaw f = build_universal_fgl(n);
            const LazardRing& ring = *f.ring;
            CAPTURE(n);
            CHECK(f.coefficient(1, 0) == ring.one());
            CHECK(f.coefficient(0, 1) == ring.one());
            for (int i = 2; i <= n; ++i) {
                CHECK(f.coefficient(i, 0).is_zero());
                CHECK(f.coefficient(0, i).is_zero());
            }
            for (int i = 1; i <= n; ++i)
                for (int j = 1; i + j <= n; ++j) CHECK(ring.equal(f.coefficient(i, j), f.coefficient(j, i)));
            FglResidual r = series_compose_check(f);
            CHECK(r.unit);
            CHECK(r.commutative);
            CHECK(r.associative);
            CHECK(r.nonzero_terms.empty());
        }
    }

    TEST_CASE("reduction is idempotent and respects the ring structure") {
        LazardRing ring(4);
        LazardElement a11 = ring.generator(1, 1), a12 = ring.generator(1, 2), a21 = ring.generator(2, 1);
        CHECK(ring.equal(a12, a21));
        CHECK(ring.reduce(ring.reduce(a12 + a21)) == ring.reduce(a12 + a21));
        CHECK(ring.equal(ring.multiply(a11, a12), ring.multiply(a12, a11)));
        // a11^4 has degree 4 > max degree 3 and is dropped
        LazardElement p = ring.multiply(ring.multiply(a11, a11), ring.multiply(a11, a11));
        CHECK(p.is_zero());
    }

    TEST_CASE("evaluate_fgl agrees with a direct expansion of the law") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        auto l1 = s.bundle_id("L1v"), l2 = s.bundle_id("L2v");
        FormalGroupLaw f = build_universal_fgl(4);
        Element target(make_cycle(s, s.morphism_id("h"), piX, {}));  // structure dimension 2
        Operator op_l = [&](const Element& e) { return append_bundle(s, l1, e); };
        Operator op_m = [&](const Element& e) { return append_bundle(s, l2, e); };
        for (int bound : {2, 3}) {
            LElement got = evaluate_fgl(s, f, op_l, op_m, target, bound);
            LElement expected(piX);
            for (int i = 0; i <= bound; ++i)
                for (int j = 0; i + j <= bound; ++j) {
                    if (i + j == 0) continue;
                    LazardElement c = f.coefficient(i, j);
                    if (c.is_zero()) continue;
                    std::vector<BundleId> ls(i, l1);
                    ls.insert(ls.end(), j, l2);
                    expected.add_term(make_cycle(s, s.morphism_id("h"), piX, ls), c);
                }
            CAPTURE(bound);
            CHECK(got == expected);
        }
    }

    TEST_CASE("a truncation below the needed degree is rejected") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        FormalGroupLaw f = build_universal_fgl(1);
        Element target(make_cycle(s, s.morphism_id("h"), piX, {}));
        Operator op_l = [&](const Element& e) { return append_bundle(s, s.bundle_id("L1v"), e); };
        Operator op_m = [&](const Element& e) { return append_bundle(s, s.bundle_id("L2v"), e); };
        CHECK_THROWS_AS(evaluate_fgl(s, f, op_l, op_m, target, 2), BoundTooSmall);
        // the structure has dimension 2, so a bound of 1 would drop surviving terms
        CHECK_THROWS_AS(evaluate_fgl(s, build_universal_fgl(4), op_l, op_m, target, 1), BoundTooSmall);
    }
}
