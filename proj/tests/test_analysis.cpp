#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cobord/analysis.hpp"
#include "cobord/error.hpp"
#include "support.hpp"

using namespace cobord;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(testing::fixture(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const AxiomReport& find(const std::vector<AxiomReport>& reps, const std::string& id) {
    for (const auto& r : reps)
        if (r.axiom == id) return r;
    throw std::runtime_error("no report for " + id);
}

}  // namespace

TEST_SUITE("analysis") {
    TEST_CASE("the point site passes every axiom on identity instances") {
        Site s = testing::load("point.site");
        auto reps = run_axiom_suite(s);
        CHECK(reps.size() == bivariant_axioms().size() + overcategory_axioms().size() + grading_laws().size());
        auto bivariant = bivariant_axioms();
        for (const auto& r : reps) {
            CAPTURE(r.axiom);
            CHECK(r.ok());
            // only identities exist, so no bivariant instance is nontrivial
            if (std::find(bivariant.begin(), bivariant.end(), r.axiom) != bivariant.end()) CHECK(r.nontrivial == 0);
        }
        CHECK(find(reps, "A2").checked > 0);
    }

    TEST_CASE("bivariant axioms hold with nontrivial instances on the chain fixtures") {
        for (const char* name : {"chain3.site", "chain4.site"}) {
            Site s = testing::load(name);
            AxiomSuiteOptions o;
            o.only = bivariant_axioms();
            for (const auto& r : run_axiom_suite(s, o)) {
                CAPTURE(name);
                CAPTURE(r.axiom);
                CHECK(r.ok());
                if (name == std::string("chain4.site")) CHECK(r.nontrivial > 0);
            }
        }
    }

    TEST_CASE("over-category axioms and grading laws hold on every fixture") {
        for (const char* name : {"chain3.site", "chain4.site", "lm2.site", "resolve.site"}) {
            Site s = testing::load(name);
            AxiomSuiteOptions o;
            o.only = overcategory_axioms();
            for (auto& g : grading_laws()) o.only.push_back(g);
            for (const auto& r : run_axiom_suite(s, o)) {
                CAPTURE(name);
                CAPTURE(r.axiom);
                CHECK(r.ok());
            }
        }
    }

    TEST_CASE("suite output is deterministic and the budget is honoured") {
        Site s = testing::load("chain4.site");
        AxiomSuiteOptions o;
        o.only = {"A2", "A13"};
        o.budget = 50;
        auto a = run_axiom_suite(s, o);
        auto b = run_axiom_suite(s, o);
        REQUIRE(a.size() == 2);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].checked == b[i].checked);
            CHECK(a[i].skipped == b[i].skipped);
            CHECK(a[i].nontrivial == b[i].nontrivial);
            CHECK(a[i].checked + a[i].skipped <= 50);
        }
        CHECK(a[0].budget_exhausted);
        o.only = {"A9"};
        CHECK_THROWS(run_axiom_suite(s, o));
    }

    TEST_CASE("a wrong declared composite produces an associativity witness") {
        std::string text = read_fixture("chain4.site");
        const std::string from = "composite z1_1_1.p12_1 = z12_1_1";
        auto pos = text.find(from);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, from.size(), "composite z1_1_1.p12_1 = p12_1");
        CHECK_THROWS_AS(parse_site(text), ValidationError);
        Site s = parse_site(text, Validation::Skip);
        AxiomSuiteOptions o;
        o.only = {"A2"};
        auto reps = run_axiom_suite(s, o);
        REQUIRE(reps.size() == 1);
        CHECK_FALSE(reps[0].ok());
        CHECK(reps[0].violations.front().find("p12_1") != std::string::npos);
    }

    TEST_CASE("cap with the fundamental class of a smooth X is the identity") {
        Site s = testing::load("lm2.site");
        ObjectId x = s.object_id("X12"), pt = s.object_id("pt");
        Universe u(s, s.identity(x), 2);
        for (const auto& c : u.cycles()) CHECK(duality_D(s, Element(c), pt).terms().begin()->first.structure ==
                                              c.structure);
        DualityReport r = check_duality_smooth(u, pt);
        CHECK(r.checked == u.cycles().size());
        CHECK(r.ok());
        CHECK(duality_D(s, Element(s.identity(x)), pt).is_zero());
    }

    TEST_CASE("cap product is bilinear with homological degree dim X - i") {
        Site s = testing::load("lm2.site");
        ObjectId x = s.object_id("X12"), pt = s.object_id("pt");
        MorphismId px = point_arrow(s, x, pt);
        auto alphas = enumerate_cycles(s, s.identity(x), 1);
        auto betas = enumerate_cycles(s, px, 1);
        REQUIRE(!alphas.empty());
        REQUIRE(!betas.empty());
        std::size_t checked = 0;
        for (const auto& a : alphas)
            for (const auto& b : betas) {
                Element c;
                try {
                    c = cap_product(s, Element(a), Element(b));
                } catch (const MissingDeclaration&) {
                    continue;
                }
                ++checked;
                // homological degree of a cycle over X -> pt is dim V - r, the negated degree
                for (int d : c.degrees()) CHECK(-d == -b.degree - a.degree);
                Element two = cap_product(s, Element(a, 2), Element(b)) - cap_product(s, Element(a), Element(b, 2));
                CHECK(two.is_zero());
            }
        CHECK(checked > 0);
        CHECK(cap_product(s, Element(s.identity(x)), Element(betas.front())).is_zero());
    }

    TEST_CASE("resolution order is decided from declared refinements") {
        Site s = testing::load("resolve.site");
        ObjectId x = s.object_id("X");
        ResolutionSystem sys = ResolutionSystem::of(s, x);
        REQUIRE(sys.resolutions.size() == 4);
        CHECK(sys.validate(s).empty());
        auto p = [&](const char* n) { return s.morphism_id(n); };
        CHECK(resolution_compare(s, sys, p("p1"), p("p1")) == Order::Leq);
        CHECK(resolution_compare(s, sys, p("p1"), p("p2")) == Order::Leq);
        CHECK(resolution_compare(s, sys, p("p2"), p("p1")) == Order::Geq);
        CHECK(resolution_compare(s, sys, p("p1"), p("p4")) == Order::BoundedIncomparable);
        CHECK(resolution_compare(s, sys, p("p1"), p("p5")) == Order::Incomparable);
        CHECK(order_name(Order::BoundedIncomparable) == "incomparable-with-declared-bound");
    }

    TEST_CASE("a smooth object with no declared resolutions uses the identity") {
        Site s = testing::load("lm2.site");
        ObjectId x = s.object_id("X1");
        ResolutionSystem sys = ResolutionSystem::of(s, x);
        REQUIRE(sys.resolutions.size() == 1);
        CHECK(sys.resolutions.front() == s.identity(x));
        Universe u(s, s.identity(x), 2);
        ObjectId pt = s.object_id("pt");
        for (const auto& c : u.cycles())
            CHECK(duality_D_pi(s, s.identity(x), Element(c), pt) == duality_D(s, Element(c), pt));
    }

    TEST_CASE("transitions carry D_p1 to D_p2 on every declared pair") {
        Site s = testing::load("resolve.site");
        ObjectId x = s.object_id("X"), pt = s.object_id("pt");
        ResolutionSystem sys = ResolutionSystem::of(s, x);
        Universe u(s, s.identity(x), 2);
        DualityReport r = check_transitions(u, sys, pt);
        // declared ordered pairs: p1 <= p2, p4 <= p2 and the four reflexive ones
        CHECK(r.pairs == 6);
        CHECK(r.checked == r.pairs * u.cycles().size());
        CHECK(r.ok());
        Element a(u.cycles().back());
        auto t = transition(s, s.morphism_id("p1"), s.morphism_id("p2"),
                            duality_D_pi(s, s.morphism_id("p1"), a, pt));
        CHECK(t.disagreements.empty());
        CHECK(t.value == duality_D_pi(s, s.morphism_id("p2"), a, pt));
        CHECK(duality_D_pi(s, s.morphism_id("p1"), Element(s.identity(x)), pt).is_zero());
    }

    TEST_CASE("colimit over incomparable components counts each component once") {
        // D_p is injective on free generators here, so components {p1, p2, p4} and {p5}
        // contribute one copy of the source each.
        Site s = testing::load("resolve.site");
        ObjectId x = s.object_id("X"), pt = s.object_id("pt");
        ResolutionSystem sys = ResolutionSystem::of(s, x);
        Universe u(s, s.identity(x), 2);
        Universe target(s, point_arrow(s, x, pt), 2);
        auto ranks = colimit_ranks(u, sys, quotient(target, StageSet::none()));
        std::map<int, std::size_t> per_degree;
        for (const auto& c : u.cycles()) ++per_degree[c.degree];
        for (const auto& [d, n] : per_degree) CHECK(ranks.at(d) == 2 * n);
    }

    TEST_CASE("well-definedness checks pass on every fixture arrow") {
        for (const char* name : {"chain3.site", "lm2.site", "point.site"}) {
            Site s = testing::load(name);
            for (std::uint32_t m = 0; m < s.morphism_count(); ++m) {
                MorphismId arrow{m};
                if (!s.morphism(arrow).smooth) continue;
                Universe u(s, arrow, default_rmax(s, arrow));
                for (const auto& r : check_operations(u)) {
                    CAPTURE(name);
                    CAPTURE(r.operation);
                    CHECK(r.ok());
                }
            }
        }
    }
}
