// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cobord/analysis.hpp"
#include "cobord/error.hpp"
#include "cobord/lazard.hpp"
#include "cobord/quotient.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cobord;

namespace {

const char* const kFixtures[] = {"point.site", "chain3.site", "chain4.site", "lm2.site", "resolve.site"};

struct Verdict {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<MorphismId> smooth_arrows(const Site& s) {
    std::vector<MorphismId> out;
    for (std::uint32_t m = 0; m < s.morphism_count(); ++m)
        if (s.morphism(MorphismId{m}).smooth) out.push_back(MorphismId{m});
    return out;
}

Element one_over(const Site& s, MorphismId pi) { return smooth_pullback(s, pi, unit(s, s.morphism(pi).target)); }

Verdict bivariant_suite() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    std::map<std::string, std::size_t> nontrivial;
    std::size_t violations = 0;
    AxiomSuiteOptions o;
    o.only = bivariant_axioms();
    for (const char* name : {"point.site", "chain3.site", "chain4.site"}) {
        Site s = testing::load(name);
        for (const auto& r : run_axiom_suite(s, o)) {
            nontrivial[r.axiom] += r.nontrivial;
            violations += r.violations.size();
            if (!r.ok()) v.fail(std::string(name) + " " + r.axiom + ": " + r.violations.front());
        }
    }
    for (const auto& id : bivariant_axioms())
        if (nontrivial[id] == 0) v.fail(id + " has no nontrivial instance");
    double t = seconds_since(t0);
    if (t >= 60) v.fail("took " + std::to_string(t) + " s");
    std::ostringstream d;
    d << violations << " violations, min nontrivial ";
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    for (const auto& [k, n] : nontrivial) lo = std::min(lo, n);
    d << lo << ", " << t << " s";
    if (v.pass) v.detail = d.str();
    return v;
}

Verdict grading_laws_exhaustive() {
    Verdict v;
    AxiomSuiteOptions o;
    o.only = grading_laws();
    o.budget = std::numeric_limits<std::size_t>::max();
    o.per_diagram = 0;
    std::size_t checked = 0;
    for (const char* name : kFixtures) {
        Site s = testing::load(name);
        for (const auto& r : run_axiom_suite(s, o)) {
            checked += r.checked;
            if (!r.ok()) v.fail(std::string(name) + " " + r.axiom + ": " + r.violations.front());
            if (r.budget_exhausted) v.fail(std::string(name) + " " + r.axiom + " was truncated");
        }
    }
    if (checked == 0) v.fail("no instances");
    if (v.pass) v.detail = std::to_string(checked) + " instances";
    return v;
}

Verdict point_generators() {
    Verdict v;
    std::size_t arrows = 0, gens = 0;
    for (const char* name : kFixtures) {
        Site s = testing::load(name);
        auto pt = s.find_object("pt");
        if (!pt) continue;
        for (auto px : smooth_arrows(s)) {
            if (s.morphism(px).target != *pt) continue;
            ++arrows;
            const std::size_t rmax = 2;
            auto expected = oracle::point_generators(s, s.morphism(px).source, rmax);
            std::map<std::pair<std::uint32_t, std::vector<BundleId>>, int> got;
            for (const auto& c : enumerate_cycles(s, px, rmax)) {
                ++gens;
                if (-c.degree + static_cast<int>(c.rank()) != s.object(c.source).dim)
                    v.fail(format(s, c) + " violates -i + r = dim V");
                if (!got.emplace(std::pair{c.structure.value, c.bundles}, c.degree).second)
                    v.fail(format(s, c) + " enumerated twice");
            }
            if (got != expected) v.fail(std::string(name) + " " + s.name(px) + ": generator sets differ");
        }
    }
    if (arrows == 0) v.fail("no arrow to pt");
    if (v.pass) v.detail = std::to_string(gens) + " generators over " + std::to_string(arrows) + " arrows";
    return v;
}

Verdict dim_two_bundles() {
    Verdict v;
    Site s = testing::load("chain3.site");
    auto piX = s.morphism_id("piX");
    Universe u(s, piX, default_rmax(s, piX));
    Element e(make_cycle(s, s.identity(s.object_id("X")), piX, {s.bundle_id("L1"), s.bundle_id("L2")}));
    if (!quotient(u, StageSet::upto(Stage::Dim)).is_zero(e)) v.fail(format(s, e) + " survives");
    if (quotient(u, StageSet::none()).is_zero(e)) v.fail("already zero without relations");
    if (v.pass) v.detail = format(s, e) + " = 0";
    return v;
}

Verdict sections() {
    Verdict v;
    std::size_t checked = 0, skipped = 0;
    for (const char* name : kFixtures) {
        Site s = testing::load(name);
        for (const auto& sec : s.sections())
            for (auto pi : smooth_arrows(s)) {
                const Morphism& pm = s.morphism(pi);
                if (pm.source != sec.base || !pm.proper) continue;
                Element rhs(pi);
                if (sec.zero_locus) {
                    auto pz = s.try_compose(pi, *sec.inclusion);
                    if (!pz || !s.morphism(*pz).smooth) {
                        ++skipped;
                        continue;
                    }
                    rhs = pushforward(s, *sec.inclusion, pi, smooth_pullback(s, *pz, unit(s, pm.target)));
                }
                Universe u(s, pi, default_rmax(s, pi));
                Element lhs = chern(s, sec.bundle, one_over(s, pi));
                ++checked;
                if (!quotient(u, StageSet::upto(Stage::Sect)).equal(lhs, rhs))
                    v.fail(std::string(name) + " section " + sec.name + " over " + s.name(pi));
            }
    }
    if (checked == 0) v.fail("no section instance");
    if (v.pass) v.detail = std::to_string(checked) + " instances, " + std::to_string(skipped) + " without a smooth zero locus";
    return v;
}

Verdict fgl_relation() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    Site s = testing::load("chain3.site");
    auto piX = s.morphism_id("piX");
    const int n = 4;
    FormalGroupLaw law = build_universal_fgl(n);
    Universe u(s, piX, 4);
    QuotientOptions o;
    o.degree_bound = n;
    QuotientPresentation q = quotient(u, StageSet::upto(Stage::Fgl), o, &law);
    Element one = one_over(s, piX);
    std::size_t checked = 0;
    for (const auto& t : s.tensors()) {
        if (s.bundle(t.result).base != s.object_id("X")) continue;
        Operator cl = [&](const Element& e) { return chern(s, t.left, e); };
        Operator cm = [&](const Element& e) { return chern(s, t.right, e); };
        LElement lhs = evaluate_fgl(s, law, cl, cm, one, n);
        LElement rhs = LElement::from(chern(s, t.result, one), law.ring->generator_count());
        ++checked;
        if (!q.equal(lhs, rhs)) v.fail(s.name(t.left) + " (x) " + s.name(t.right) + " differs");
    }
    double t = seconds_since(t0);
    if (checked == 0) v.fail("no tensor on X");
    if (t >= 30) v.fail("took " + std::to_string(t) + " s");
    if (v.pass) {
        std::ostringstream d;
        d << checked << " tensor products, " << t << " s";
        v.detail = d.str();
    }
    return v;
}

Verdict fgl_n4() {
    Verdict v;
    const int n = 4;
    FormalGroupLaw f = build_universal_fgl(n);
    const LazardRing& ring = *f.ring;
    if (!(f.coefficient(1, 0) == ring.one())) v.fail("F(u,0) has no linear term");
    for (int i = 2; i <= n; ++i)
        if (!f.coefficient(i, 0).is_zero()) v.fail("F(u,0) has a u^" + std::to_string(i) + " term");
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j)
            if (!ring.equal(f.coefficient(i, j), f.coefficient(j, i))) v.fail("asymmetric at " + std::to_string(i));
    FglResidual r = series_compose_check(f);
    if (!r.associative || !r.nonzero_terms.empty()) v.fail("associativity residual is nonzero");
    if (!r.unit || !r.commutative) v.fail("residual check reports unit or symmetry failure");
    oracle::LazardOracle o(n);
    std::ostringstream d;
    for (int deg = 1; deg <= 3; ++deg) {
        if (ring.rank(deg) != o.rank(deg))
            v.fail("degree " + std::to_string(deg) + ": rank " + std::to_string(ring.rank(deg)) + " vs oracle " +
                   std::to_string(o.rank(deg)));
        d << (deg > 1 ? "," : "ranks ") << ring.rank(deg);
    }
    if (v.pass) v.detail = d.str();
    return v;
}

Verdict welldefined() {
    Verdict v;
    std::map<OperationDescriptor::Kind, std::size_t> seen;
    std::size_t reports = 0, generators = 0;
    for (const char* name : kFixtures) {
        Site s = testing::load(name);
        for (auto arrow : smooth_arrows(s)) {
            Universe u(s, arrow, default_rmax(s, arrow));
            if (u.cycles().empty()) continue;
            for (const auto& r : check_operations(u)) {
                ++reports;
                generators += r.checked;
                if (r.operation.rfind("pushforward", 0) == 0) seen[OperationDescriptor::Kind::Pushforward] += r.checked;
                if (r.operation.rfind("smooth-pullback", 0) == 0) seen[OperationDescriptor::Kind::SmoothPullback] += r.checked;
                if (r.operation.rfind("chern", 0) == 0) seen[OperationDescriptor::Kind::Chern] += r.checked;
                if (r.operation.rfind("external-product", 0) == 0) seen[OperationDescriptor::Kind::ExternalLeft] += r.checked;
                if (!r.ok())
                    v.fail(std::string(name) + " " + s.name(arrow) + " " + r.operation + ": " + r.violations.front());
            }
        }
    }
    for (auto k : {OperationDescriptor::Kind::Pushforward, OperationDescriptor::Kind::SmoothPullback,
                   OperationDescriptor::Kind::Chern, OperationDescriptor::Kind::ExternalLeft})
        if (seen[k] == 0) v.fail("an operation kind was never exercised");
    if (v.pass) v.detail = std::to_string(reports) + " reports, " + std::to_string(generators) + " generator images";
    return v;
}

Verdict duality() {
    Verdict v;
    std::size_t smooth_checked = 0;
    for (const char* name : kFixtures) {
        Site s = testing::load(name);
        auto pt = s.find_object("pt");
        if (!pt) continue;
        for (std::uint32_t i = 0; i < s.object_count(); ++i) {
            ObjectId x{i};
            if (!s.object(x).smooth || x == *pt) continue;
            Universe u(s, s.identity(x), 2);
            DualityReport r = check_duality_smooth(u, *pt);
            smooth_checked += r.checked;
            if (!r.ok()) v.fail(std::string(name) + " D on " + s.name(x) + ": " + r.violations.front());
        }
    }
    Site s = testing::load("resolve.site");
    ObjectId x = s.object_id("X"), pt = s.object_id("pt");
    ResolutionSystem sys = ResolutionSystem::of(s, x);
    for (const auto& p : sys.validate(s)) v.fail(p);
    Universe u(s, s.identity(x), 2);
    DualityReport t = check_transitions(u, sys, pt);
    if (!t.ok()) v.fail("transition: " + t.violations.front());
    if (t.pairs == 0 || smooth_checked == 0) v.fail("vacuous");
    if (v.pass)
        v.detail = std::to_string(smooth_checked) + " smooth classes, " + std::to_string(t.pairs) + " pairs, " +
                   std::to_string(t.checked) + " transitions";
    return v;
}

struct Run {
    int status = -1;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string("'") + COBORD_CLI + "' " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

Verdict determinism() {
    Verdict v;
    const std::vector<std::string> commands = {
        "report --site " + testing::fixture("chain4.site") + " --arrow p1_0",
        "report --site " + testing::fixture("chain3.site") + " --arrow piX",
        "quotient --site " + testing::fixture("lm2.site") + " --arrow p12_0 --rmax 2",
        "duality --site " + testing::fixture("resolve.site") + " --object X",
    };
    std::size_t bytes = 0;
    for (const auto& c : commands) {
        const std::string base = c + " --format machine --threads ";
        Run a = cli(base + "1"), b = cli(base + "1"), m = cli(base + "4");
        if (a.status != 0 || a.out.empty()) v.fail("'" + c + "' exited " + std::to_string(a.status));
        if (a.out != b.out) v.fail("'" + c + "' differs between runs");
        if (a.out != m.out) v.fail("'" + c + "' differs between 1 and 4 threads");
        bytes += a.out.size();
    }
    if (v.pass) v.detail = std::to_string(commands.size()) + " commands, " + std::to_string(bytes) + " bytes each way";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"bivariant axioms on point, chain3, chain4", bivariant_suite},
        {"grading laws, exhaustive", grading_laws_exhaustive},
        {"generators over a point", point_generators},
        {"two bundles on a relative curve vanish at Dim", dim_two_bundles},
        {"section relations at Sect", sections},
        {"formal group law relation at FGL", fgl_relation},
        {"universal law at N = 4", fgl_n4},
        {"well-definedness of the operations", welldefined},
        {"duality and transitions", duality},
        {"byte-identical machine output", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        if (!v.pass) ++failures;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << v.detail
                  << ")\n";
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
