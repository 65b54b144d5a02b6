#include <doctest.h>

#include <cstdlib>
#include <map>
#include <set>

#include "cobord/analysis.hpp"
#include "cobord/error.hpp"
#include "cobord/quotient.hpp"
#include "support.hpp"

using namespace cobord;

namespace {

/// Dimension-dead test from the raw tables: some factorisation q = nu . pi with
/// pi, nu smooth carries more pulled-back bundles of the cycle than rel_dim(nu).
bool dim_killed(const Site& s, const Cycle& c, MorphismId arrow) {
    const ObjectId v = c.source;
    const ObjectId base = s.morphism(arrow).target;
    const std::uint32_t q = s.compose(arrow, c.structure).value;
    for (std::uint32_t a = 0; a < s.morphism_count(); ++a) {
        const Morphism& pi = s.morphism(MorphismId{a});
        if (pi.source != v || !pi.smooth) continue;
        for (std::uint32_t b = 0; b < s.morphism_count(); ++b) {
            const Morphism& nu = s.morphism(MorphismId{b});
            if (nu.source != pi.target || nu.target != base || !nu.smooth) continue;
            auto k = s.try_compose(MorphismId{b}, MorphismId{a});
            if (!k || k->value != q) continue;
            std::set<BundleId> pulled;
            for (std::uint32_t l = 0; l < s.bundle_count(); ++l)
                if (s.bundle(BundleId{l}).base == pi.target)
                    if (auto p = s.try_pullback(MorphismId{a}, BundleId{l})) pulled.insert(s.canonical(*p));
            int count = 0;
            for (auto l : c.bundles) count += pulled.count(l) ? 1 : 0;
            if (count > *nu.rel_dim) return true;
        }
    }
    return false;
}

Element one_over(const Site& s, MorphismId pi) {
    return smooth_pullback(s, pi, unit(s, s.morphism(pi).target));
}

}  // namespace

TEST_SUITE("quotient") {
    TEST_CASE("stage lists must be prefixes of dim < sect < fgl") {
        CHECK(StageSet::parse("").level == 0);
        CHECK(StageSet::parse("none").level == 0);
        CHECK(StageSet::parse("dim").level == 1);
        CHECK(StageSet::parse("sect,dim").str() == "dim,sect");
        CHECK(StageSet::parse("dim,sect,fgl").level == 3);
        CHECK_THROWS_AS(StageSet::parse("sect"), StageOrder);
        CHECK_THROWS_AS(StageSet::parse("dim,fgl"), StageOrder);
        CHECK_THROWS_AS(StageSet::parse("dim,bogus"), StageOrder);
    }

    TEST_CASE("chain3 graded ranks without relations and at the dimension stage") {
        // Structures over piX: id_X (dim 1) and h (dim 2), four bundle classes each, rmax 3.
        // Free: degree r - dim gives -2:1, -1:1+4, 0:4+10, 1:10+20, 2:20.
        // Dim kills rank > dim, and any cycle carrying MX (resp. MV) through X -> S -> S
        // (resp. V -> S -> S): survivors are [X], [X;L] for three classes, [V], [V;L] for three.
        Site s = testing::load("chain3.site");
        Universe u(s, s.morphism_id("piX"), 3);
        REQUIRE(u.cycles().size() == 70);
        QuotientPresentation free = quotient(u, StageSet::none());
        CHECK(free.rank(-2) == 1);
        CHECK(free.rank(-1) == 5);
        CHECK(free.rank(0) == 14);
        CHECK(free.rank(1) == 30);
        CHECK(free.rank(2) == 20);
        QuotientPresentation dim = quotient(u, StageSet::upto(Stage::Dim));
        CHECK(dim.rank(-2) == 1);
        CHECK(dim.rank(-1) == 4);
        CHECK(dim.rank(0) == 3);
        CHECK(dim.rank(1) == 0);
        for (int d = -2; d <= 2; ++d) CHECK(dim.torsion(d).empty());
    }

    TEST_CASE("dimension stage kills exactly the brute-force dead cycles") {
        for (const char* name : {"chain3.site", "chain4.site", "lm2.site"}) {
            Site s = testing::load(name);
            for (std::uint32_t m = 0; m < s.morphism_count(); ++m) {
                MorphismId arrow{m};
                if (!s.morphism(arrow).smooth || s.is_identity(arrow)) continue;
                Universe u(s, arrow, default_rmax(s, arrow));
                if (u.cycles().empty()) continue;
                QuotientPresentation q = quotient(u, StageSet::upto(Stage::Dim));
                std::map<int, std::size_t> alive;
                for (const auto& c : u.cycles()) {
                    bool killed = dim_killed(s, c, arrow);
                    CAPTURE(name);
                    CAPTURE(format(s, c));
                    CHECK(q.is_zero(Element(c)) == killed);
                    if (!killed) ++alive[c.degree];
                }
                for (const auto& [d, n] : alive) CHECK(q.rank(d) == n);
            }
        }
    }

    TEST_CASE("two bundles on a relative curve vanish at the dimension stage") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Universe u(s, piX, default_rmax(s, piX));
        Element e(make_cycle(s, s.identity(s.object_id("X")), piX, {s.bundle_id("L1"), s.bundle_id("L2")}));
        CHECK_FALSE(quotient(u, StageSet::none()).is_zero(e));
        CHECK(quotient(u, StageSet::upto(Stage::Dim)).is_zero(e));
    }

    TEST_CASE("section relations hold for every declared section") {
        for (const char* name : {"chain4.site", "lm2.site", "point.site"}) {
            Site s = testing::load(name);
            for (const auto& sec : s.sections()) {
                for (std::uint32_t m = 0; m < s.morphism_count(); ++m) {
                    MorphismId pi{m};
                    const Morphism& pm = s.morphism(pi);
                    if (pm.source != sec.base || !pm.smooth || !pm.proper) continue;
                    Universe u(s, pi, default_rmax(s, pi));
                    Element lhs = chern(s, sec.bundle, one_over(s, pi));
                    Element rhs(pi);
                    if (sec.zero_locus) {
                        MorphismId i = *sec.inclusion;
                        auto pz = s.try_compose(pi, i);
                        if (!pz || !s.morphism(*pz).smooth) continue;
                        rhs = pushforward(s, i, pi, smooth_pullback(s, *pz, unit(s, pm.target)));
                    }
                    CAPTURE(name);
                    CAPTURE(sec.name);
                    CAPTURE(s.name(pi));
                    CHECK(equal_in_quotient(quotient(u, StageSet::upto(Stage::Sect)), lhs, rhs));
                }
            }
        }
    }

    TEST_CASE("the formal group law relation identifies c1(L1) + c1(L2) with c1(L1 (x) L2)") {
        // On a relative curve only the linear terms of F survive the dimension relations.
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Universe u(s, piX, 4);
        Element one = one_over(s, piX);
        Element l1 = chern(s, s.bundle_id("L1"), one), l2 = chern(s, s.bundle_id("L2"), one);
        Element l12 = chern(s, s.bundle_id("L12"), one);
        QuotientOptions o;
        o.degree_bound = 4;
        CHECK(quotient(u, StageSet::upto(Stage::Fgl), o).equal(l1 + l2, l12));
        CHECK_FALSE(quotient(u, StageSet::upto(Stage::Sect), o).equal(l1 + l2, l12));
    }

    TEST_CASE("formal group law ranks do not depend on the truncation in shared degrees") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Universe u(s, piX, 3);
        QuotientOptions o4, o5;
        o4.degree_bound = 4;
        o5.degree_bound = 5;
        auto q4 = quotient(u, StageSet::upto(Stage::Fgl), o4);
        auto q5 = quotient(u, StageSet::upto(Stage::Fgl), o5);
        for (int d = -3; d <= 2; ++d) {
            CAPTURE(d);
            CHECK(q4.rank(d) == q5.rank(d));
            CHECK(q4.torsion(d) == q5.torsion(d));
        }
    }

    TEST_CASE("canonical classes are representatives of equal cosets") {
        Site s = testing::load("chain4.site");
        auto arrow = s.morphism_id("p1_0");
        Universe u(s, arrow, 2);
        auto q = quotient(u, StageSet::upto(Stage::Sect));
        for (std::size_t i = 0; i < u.cycles().size(); i += 7) {
            Element e(u.cycles()[i]);
            Element c = q.class_of(e);
            CHECK(q.class_of(c) == c);
            CHECK(q.is_zero(e - c));
        }
    }

    TEST_CASE("thread count does not change the presentation") {
        Site s = testing::load("chain4.site");
        auto arrow = s.morphism_id("p12_0");
        Universe u(s, arrow, 3);
        QuotientOptions one, many;
        many.threads = 4;
        auto a = quotient(u, StageSet::upto(Stage::Fgl), one);
        auto b = quotient(u, StageSet::upto(Stage::Fgl), many);
        REQUIRE(a.pieces().size() == b.pieces().size());
        for (const auto& [d, piece] : a.pieces()) {
            const auto& other = b.pieces().at(d);
            CHECK(piece.rank == other.rank);
            CHECK(piece.torsion == other.torsion);
            CHECK(piece.lattice.basis() == other.lattice.basis());
        }
    }

    TEST_CASE("resource limit and universe overflow") {
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Universe u(s, piX, 3);
        QuotientOptions small;
        small.resource_limit = 4;
        CHECK_THROWS_AS(quotient(u, StageSet::none(), small), ResourceExceeded);
        setenv("COBORD_RESOURCE_LIMIT", "4", 1);
        CHECK_THROWS_AS(quotient(u, StageSet::none()), ResourceExceeded);
        setenv("COBORD_RESOURCE_LIMIT", "lots", 1);
        CHECK_THROWS_AS(quotient(u, StageSet::none()), ResourceExceeded);
        unsetenv("COBORD_RESOURCE_LIMIT");
        CHECK_NOTHROW(quotient(u, StageSet::none()));

        Universe tiny(s, piX, 1);
        Element big(make_cycle(s, s.identity(s.object_id("X")), piX, {s.bundle_id("L1"), s.bundle_id("L2")}));
        CHECK_THROWS_AS(quotient(tiny, StageSet::none()).is_zero(big), UniverseOverflow);
        // dead at the dimension stage, so no overflow there
        CHECK(quotient(tiny, StageSet::upto(Stage::Dim)).is_zero(big));
    }

    TEST_CASE("integer class queries are refused on a presentation with Lazard coefficients") {
        Site s = testing::load("chain3.site");
        Universe u(s, s.morphism_id("piX"), 2);
        auto q = quotient(u, StageSet::upto(Stage::Fgl));
        CHECK(q.lazard());
        CHECK_THROWS_AS(q.class_of(Element(u.cycles().front())), StageOrder);
        CHECK_NOTHROW(q.is_zero(Element(u.cycles().front())));
    }

    TEST_CASE("well-definedness checks detect images outside the relations") {
        // Dimension generators pushed through Chern classes are not zero without relations.
        Site s = testing::load("chain3.site");
        auto piX = s.morphism_id("piX");
        Universe u(s, piX, 2);
        Universe target(s, piX, 3);
        OperationDescriptor op{OperationDescriptor::Kind::Chern};
        op.bundle = s.bundle_id("L1");
        auto rel = enumerate_rdim(u);
        REQUIRE(rel.size() > 0);
        auto bad = check_welldefined(rel, quotient(target, StageSet::none()), op);
        CHECK(bad.violations.size() == bad.checked);
        auto good = check_welldefined(rel, quotient(target, StageSet::upto(Stage::Dim)), op);
        CHECK(good.checked == rel.size());
        CHECK(good.ok());
    }
}
