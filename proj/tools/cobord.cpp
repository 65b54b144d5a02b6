// Command-line front end for the cobord library.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cobord/analysis.hpp"
#include "cobord/error.hpp"
#include "cobord/expr.hpp"
#include "cobord/quotient.hpp"

using namespace cobord;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

/// Usage problems detected after CLI11 accepted the arguments.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Human-readable text plus an ordered key = value section.
class Report {
public:
    std::ostringstream text;

    template <class T>
    void set(const std::string& key, const T& value) {
        std::ostringstream v;
        v << value;
        machine_.emplace_back(key, v.str());
    }
    void set(const std::string& key, bool value) { machine_.emplace_back(key, value ? "true" : "false"); }

    std::string render(bool machine_only) const {
        std::string out;
        if (!machine_only) {
            out = text.str();
            out += "\n[machine]\n";
        }
        for (const auto& [k, v] : machine_) out += k + " = " + v + "\n";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> machine_;
};

struct Common {
    std::string site_path;
    std::string format = "text";
    std::string output;
};

std::string join_torsion(const std::vector<Integer>& t) {
    if (t.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + to_string(t[i]);
    return s;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
}

MorphismId require_morphism(const Site& site, const std::string& name, const char* flag) {
    if (name.empty()) throw UsageError(std::string("missing ") + flag);
    auto id = site.find_morphism(name);
    if (!id) throw UsageError(std::string(flag) + ": unknown morphism '" + name + "'");
    return *id;
}

ObjectId require_object(const Site& site, const std::string& name, const char* flag) {
    if (name.empty()) throw UsageError(std::string("missing ") + flag);
    auto id = site.find_object(name);
    if (!id) throw UsageError(std::string(flag) + ": unknown object '" + name + "'");
    return *id;
}

/// The point object: given by name, or the only object of dimension zero.
ObjectId choose_point(const Site& site, const std::string& name) {
    if (!name.empty()) return require_object(site, name, "--point");
    std::optional<ObjectId> found;
    for (std::uint32_t i = 0; i < site.object_count(); ++i) {
        if (site.object(ObjectId{i}).dim != 0) continue;
        if (found) throw UsageError("several objects of dimension 0; pass --point");
        found = ObjectId{i};
    }
    if (!found) throw UsageError("no object of dimension 0; pass --point");
    return *found;
}

std::size_t choose_rmax(const Site& site, MorphismId arrow, int rmax) {
    return rmax >= 0 ? static_cast<std::size_t>(rmax) : default_rmax(site, arrow);
}

void site_summary(const Site& site, Report& r) {
    r.set("site.objects", site.object_count());
    r.set("site.morphisms", site.morphism_count());
    r.set("site.composites", site.composite_count());
    r.set("site.squares", site.squares().size());
    r.set("site.bundles", site.bundle_count());
    r.set("site.tensors", site.tensors().size());
    r.set("site.sections", site.sections().size());
    r.set("site.resolutions", site.resolutions().size());
    r.text << "objects " << site.object_count() << ", morphisms " << site.morphism_count() << ", composites "
           << site.composite_count() << ", squares " << site.squares().size() << ", bundles " << site.bundle_count()
           << ", tensors " << site.tensors().size() << ", sections " << site.sections().size() << ", resolutions "
           << site.resolutions().size() << "\n";
}

/// Dim relations come from declared factorizations only, so they span a subgroup of the full relations.
void factorization_note(const QuotientPresentation& q, Report& r, const std::string& prefix) {
    if (!q.stages().has(Stage::Dim)) return;
    r.text << "dim relations use declared factorizations only\n";
    r.set(prefix + "dim.factorizations", "declared");
}

void quotient_table(const QuotientPresentation& q, Report& r, const std::string& prefix) {
    factorization_note(q, r, prefix);
    r.text << pad("degree", 7) << pad("coords", 8) << pad("relations", 11) << pad("rank", 6) << "  torsion\n";
    for (const auto& [d, piece] : q.pieces()) {
        r.text << pad(std::to_string(d), 7) << pad(std::to_string(piece.coordinates), 8)
               << pad(std::to_string(piece.relation_rank), 11) << pad(std::to_string(piece.rank), 6) << "  "
               << join_torsion(piece.torsion) << "\n";
        std::string k = prefix + "degree." + std::to_string(d) + ".";
        r.set(k + "coordinates", piece.coordinates);
        r.set(k + "relation_rank", piece.relation_rank);
        r.set(k + "rank", piece.rank);
        r.set(k + "torsion", join_torsion(piece.torsion));
    }
}

std::string class_string(const Site& site, const QuotientPresentation& q, const Element& e) {
    if (q.lazard()) return format(site, *q.ring(), q.class_of(LElement::from(e, q.ring()->generator_count())));
    return format(site, q.class_of(e));
}

/// Summary of a well-definedness run; returns the violation count.
std::size_t welldefined_section(const Site& site, const std::vector<WellDefinedReport>& reps, Report& r) {
    std::size_t checked = 0, skipped = 0, violations = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto& w = reps[i];
        checked += w.checked;
        skipped += w.skipped;
        violations += w.violations.size();
        r.text << "  " << stage_name(w.stage) << "  " << w.operation << ": checked " << w.checked << ", skipped "
               << w.skipped << ", violations " << w.violations.size() << "\n";
        for (const auto& v : w.violations) r.text << "    violation: " << v << "\n";
        std::string k = "welldefined." + std::to_string(i) + ".";
        r.set(k + "operation", w.operation);
        r.set(k + "stage", stage_name(w.stage));
        r.set(k + "checked", w.checked);
        r.set(k + "skipped", w.skipped);
        r.set(k + "violations", w.violations.size());
    }
    (void)site;
    r.set("welldefined.checked", checked);
    r.set("welldefined.skipped", skipped);
    r.set("welldefined.violations", violations);
    return violations;
}

std::size_t axiom_section(const std::vector<AxiomReport>& reps, Report& r) {
    std::size_t violations = 0;
    r.text << pad("axiom", 22) << pad("checked", 9) << pad("nontrivial", 12) << pad("skipped", 9) << "  status\n";
    for (const auto& a : reps) {
        violations += a.violations.size();
        std::string status = a.ok() ? "pass" : "FAIL";
        if (a.budget_exhausted) status += " (budget reached)";
        r.text << pad(a.axiom, 22) << pad(std::to_string(a.checked), 9) << pad(std::to_string(a.nontrivial), 12)
               << pad(std::to_string(a.skipped), 9) << "  " << status << "\n";
        for (const auto& v : a.violations) r.text << "    violation: " << v << "\n";
        std::string k = "axiom." + a.axiom + ".";
        r.set(k + "checked", a.checked);
        r.set(k + "nontrivial", a.nontrivial);
        r.set(k + "skipped", a.skipped);
        r.set(k + "budget_exhausted", a.budget_exhausted);
        r.set(k + "violations", a.violations.size());
    }
    r.set("axioms.violations", violations);
    return violations;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// --- verbs --------------------------------------------------------------------------------

struct QuotientArgs {
    std::string arrow;
    std::string stages = "dim,sect,fgl";
    int rmax = -1;
    int degree_bound = 4;
    unsigned threads = 1;
};

QuotientOptions quotient_options(const QuotientArgs& a) {
    QuotientOptions o;
    o.degree_bound = a.degree_bound;
    o.threads = a.threads;
    return o;
}

int run_validate(const Site& site, Report& r) {
    site_summary(site, r);
    r.text << "status ok\n";
    r.set("status", "ok");
    return kOk;
}

int run_eval(const Site& site, const std::string& expr, const QuotientArgs& qa, bool stages_given, Report& r) {
    std::optional<MorphismId> arrow;
    if (!qa.arrow.empty()) arrow = require_morphism(site, qa.arrow, "--arrow");
    Element e = parse_expression(site, expr, arrow);
    std::string value = format(site, e);
    r.text << value << "\n";
    r.set("value", value);
    if (!e.is_zero()) r.set("arrow", site.name(e.arrow()));
    std::string degrees;
    for (int d : e.degrees()) degrees += (degrees.empty() ? "" : ",") + std::to_string(d);
    r.set("degrees", degrees.empty() ? "none" : degrees);
    if (stages_given) {
        StageSet st = StageSet::parse(qa.stages);
        if (e.is_zero() && !arrow) throw UsageError("a zero element needs --arrow for a class query");
        MorphismId over = e.is_zero() ? *arrow : e.arrow();
        Universe u(site, over, choose_rmax(site, over, qa.rmax));
        QuotientPresentation q = quotient(u, st, quotient_options(qa));
        std::string cls = class_string(site, q, e);
        r.text << "class at " << st.str() << ": " << cls << "\n";
        r.set("stages", st.str());
        factorization_note(q, r, "");
        r.set("class", cls);
        r.set("zero", cls == "0");
    }
    return kOk;
}

int run_quotient(const Site& site, const QuotientArgs& qa, const std::vector<std::string>& classes, bool welldefined,
                 Report& r) {
    MorphismId arrow = require_morphism(site, qa.arrow, "--arrow");
    StageSet st = StageSet::parse(qa.stages);
    Universe u(site, arrow, choose_rmax(site, arrow, qa.rmax));
    QuotientPresentation q = quotient(u, st, quotient_options(qa));
    r.text << "arrow " << site.describe(arrow) << "\nstages " << st.str() << ", rmax " << u.rmax()
           << ", degree bound " << qa.degree_bound << ", universe " << u.cycles().size() << " cycles\n";
    r.set("arrow", site.name(arrow));
    r.set("stages", st.str());
    r.set("rmax", u.rmax());
    r.set("degree_bound", qa.degree_bound);
    r.set("universe.cycles", u.cycles().size());
    for (const auto& rel : q.relations()) {
        r.text << "relations " << stage_name(rel.stage) << ": " << rel.size() << "\n";
        r.set("relations." + stage_name(rel.stage), rel.size());
    }
    quotient_table(q, r, "");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        Element e = parse_expression(site, classes[i], arrow);
        std::string cls = class_string(site, q, e);
        r.text << "class " << format(site, e) << " = " << cls << "\n";
        r.set("query." + std::to_string(i) + ".element", format(site, e));
        r.set("query." + std::to_string(i) + ".class", cls);
        r.set("query." + std::to_string(i) + ".zero", cls == "0");
    }
    if (!welldefined) return kOk;
    OperationCheckOptions oc;
    oc.upto = st.has(Stage::Sect) ? Stage::Sect : Stage::Dim;
    oc.quotient = quotient_options(qa);
    r.text << "well-definedness:\n";
    return welldefined_section(site, check_operations(u, oc), r) ? kViolation : kOk;
}

struct AxiomArgs {
    std::string suite = "all";
    std::string only;
    std::size_t budget = AxiomSuiteOptions{}.budget;
    std::size_t per_diagram = AxiomSuiteOptions{}.per_diagram;
    std::size_t universe = AxiomSuiteOptions{}.max_bundles;
};

std::vector<std::string> selected_axioms(const AxiomArgs& a) {
    if (!a.only.empty()) return split_list(a.only);
    std::vector<std::string> out;
    for (const auto& s : split_list(a.suite)) {
        std::vector<std::string> add;
        if (s == "all") {
            add = bivariant_axioms();
            for (auto& x : overcategory_axioms()) add.push_back(x);
            for (auto& x : grading_laws()) add.push_back(x);
        } else if (s == "bivariant") {
            add = bivariant_axioms();
        } else if (s == "overcategory") {
            add = overcategory_axioms();
        } else if (s == "grading") {
            add = grading_laws();
        } else {
            throw UsageError("--suite: unknown suite '" + s + "'");
        }
        out.insert(out.end(), add.begin(), add.end());
    }
    return out;
}

int run_axioms(const Site& site, const AxiomArgs& a, Report& r) {
    AxiomSuiteOptions o;
    o.budget = a.budget;
    o.per_diagram = a.per_diagram;
    o.max_bundles = a.universe;
    o.only = selected_axioms(a);
    r.set("budget", o.budget);
    r.set("per_diagram", o.per_diagram);
    r.set("universe", o.max_bundles);
    return axiom_section(run_axiom_suite(site, o), r) ? kViolation : kOk;
}

int run_fgl(int degree, Report& r) {
    if (degree < 1) throw UsageError("--degree must be at least 1");
    FormalGroupLaw f = build_universal_fgl(degree);
    const LazardRing& ring = *f.ring;
    r.set("bound", degree);
    r.text << "F(u,v) through total degree " << degree << "\n";
    for (const auto& [ij, c] : f.coefficients) {
        std::string key = std::to_string(ij.first) + "," + std::to_string(ij.second);
        std::string v = ring.format(c);
        r.text << "  c[" << key << "] = " << v << "\n";
        r.set("coefficient." + std::to_string(ij.first) + "." + std::to_string(ij.second), v);
    }
    r.text << pad("degree", 7) << pad("monomials", 11) << pad("rank", 6) << "  torsion\n";
    for (int d = 0; d <= ring.max_degree(); ++d) {
        r.text << pad(std::to_string(d), 7) << pad(std::to_string(ring.monomials(d).size()), 11)
               << pad(std::to_string(ring.rank(d)), 6) << "  " << join_torsion(ring.torsion(d)) << "\n";
        r.set("degree." + std::to_string(d) + ".monomials", ring.monomials(d).size());
        r.set("degree." + std::to_string(d) + ".rank", ring.rank(d));
        r.set("degree." + std::to_string(d) + ".torsion", join_torsion(ring.torsion(d)));
    }
    FglResidual res = series_compose_check(f);
    r.text << "unit " << (res.unit ? "ok" : "FAIL") << ", commutative " << (res.commutative ? "ok" : "FAIL")
           << ", associative " << (res.associative ? "ok" : "FAIL") << "\n";
    for (const auto& t : res.nonzero_terms) r.text << "  residual: " << t << "\n";
    r.set("residual.unit", res.unit);
    r.set("residual.commutative", res.commutative);
    r.set("residual.associative", res.associative);
    return res.ok() ? kOk : kViolation;
}

int run_cap(const Site& site, const std::string& object, const std::string& point, const std::string& alpha,
            const std::string& beta, Report& r) {
    ObjectId x = require_object(site, object, "--object");
    ObjectId pt = choose_point(site, point);
    MorphismId px = point_arrow(site, x, pt);
    Element a = parse_expression(site, alpha, site.identity(x));
    Element b = parse_expression(site, beta, px);
    Element c = cap_product(site, a, b);
    std::string value = format(site, c);
    std::string degrees;
    for (int d : c.degrees()) degrees += (degrees.empty() ? "" : ",") + std::to_string(-d);
    r.text << format(site, a) << " cap " << format(site, b) << "\n= " << value << "\n";
    r.set("alpha", format(site, a));
    r.set("beta", format(site, b));
    r.set("value", value);
    r.set("homological_degrees", degrees.empty() ? "none" : degrees);
    return kOk;
}

struct DualityArgs {
    std::string object;
    std::string point;
    std::vector<std::string> resolutions;
    std::string expr;
    std::string stages = "none";
    int rmax = -1;
    int degree_bound = 4;
    unsigned threads = 1;
};

int run_duality(const Site& site, const DualityArgs& a, Report& r) {
    ObjectId x = require_object(site, a.object, "--object");
    ObjectId pt = choose_point(site, a.point);
    ResolutionSystem sys = ResolutionSystem::of(site, x);
    if (!a.resolutions.empty()) {
        ResolutionSystem chosen{x, {}};
        for (const auto& name : a.resolutions) {
            MorphismId p = require_morphism(site, name, "--resolution");
            bool declared = false;
            for (auto q : sys.resolutions) declared = declared || q == p;
            if (!declared) throw UsageError("--resolution: '" + name + "' is not a resolution of " + site.name(x));
            chosen.resolutions.push_back(p);
        }
        sys = chosen;
    }
    int status = kOk;
    r.set("object", site.name(x));
    r.set("point", site.name(pt));
    std::string names;
    for (auto p : sys.resolutions) names += (names.empty() ? "" : ",") + site.name(p);
    r.text << "resolutions of " << site.name(x) << ": " << names << "\n";
    r.set("resolutions", names);
    auto problems = sys.validate(site);
    for (const auto& p : problems) r.text << "  invalid: " << p << "\n";
    r.set("system.problems", problems.size());
    if (!problems.empty()) status = kViolation;
    for (std::size_t i = 0; i < sys.resolutions.size(); ++i)
        for (std::size_t j = 0; j < sys.resolutions.size(); ++j) {
            if (i == j) continue;
            auto p1 = sys.resolutions[i], p2 = sys.resolutions[j];
            std::string o = order_name(resolution_compare(site, sys, p1, p2));
            r.text << "  " << site.name(p1) << " vs " << site.name(p2) << ": " << o << "\n";
            r.set("order." + site.name(p1) + "." + site.name(p2), o);
        }

    MorphismId idx = site.identity(x);
    if (!a.expr.empty()) {
        Element e = parse_expression(site, a.expr, idx);
        r.set("input", format(site, e));
        if (site.object(x).smooth) {
            std::string v = format(site, duality_D(site, e, pt));
            r.text << "D(" << format(site, e) << ") = " << v << "\n";
            r.set("D", v);
        }
        for (auto p : sys.resolutions) {
            std::string v = format(site, duality_D_pi(site, p, e, pt));
            r.text << "D_" << site.name(p) << "(" << format(site, e) << ") = " << v << "\n";
            r.set("D." + site.name(p), v);
        }
        return status;
    }

    Universe source(site, idx, choose_rmax(site, idx, a.rmax));
    r.set("universe.cycles", source.cycles().size());
    r.text << "universe over " << site.name(idx) << ": " << source.cycles().size() << " cycles, rmax "
           << source.rmax() << "\n";
    auto emit = [&](const std::string& key, const DualityReport& d) {
        r.text << key << ": pairs " << d.pairs << ", checked " << d.checked << ", violations " << d.violations.size()
               << "\n";
        for (const auto& v : d.violations) r.text << "    violation: " << v << "\n";
        r.set(key + ".pairs", d.pairs);
        r.set(key + ".checked", d.checked);
        r.set(key + ".violations", d.violations.size());
        if (!d.ok()) status = kViolation;
    };
    if (site.object(x).smooth) emit("smooth", check_duality_smooth(source, pt));
    emit("transitions", check_transitions(source, sys, pt));

    MorphismId px = point_arrow(site, x, pt);
    Universe target(site, px, source.rmax());
    QuotientOptions qo;
    qo.degree_bound = a.degree_bound;
    qo.threads = a.threads;
    QuotientPresentation tq = quotient(target, StageSet::parse(a.stages), qo);
    r.text << "colimit at " << tq.stages().str() << ":\n";
    r.set("colimit.stages", tq.stages().str());
    for (const auto& [d, rank] : colimit_ranks(source, sys, tq)) {
        r.text << "  degree " << d << ": rank " << rank << "\n";
        r.set("colimit.degree." + std::to_string(d) + ".rank", rank);
    }
    return status;
}

int run_report(const Site& site, const QuotientArgs& qa, const AxiomArgs& aa, Report& r) {
    int status = kOk;
    site_summary(site, r);
    MorphismId arrow = require_morphism(site, qa.arrow, "--arrow");
    Universe u(site, arrow, choose_rmax(site, arrow, qa.rmax));
    r.set("arrow", site.name(arrow));
    r.set("rmax", u.rmax());
    r.set("degree_bound", qa.degree_bound);
    r.set("universe.cycles", u.cycles().size());
    for (int level = 0; level <= 3; ++level) {
        StageSet st{level};
        QuotientPresentation q = quotient(u, st, quotient_options(qa));
        r.text << "quotient at " << st.str() << ":\n";
        quotient_table(q, r, "quotient." + st.str() + ".");
    }
    OperationCheckOptions oc;
    oc.quotient = quotient_options(qa);
    r.text << "well-definedness:\n";
    if (welldefined_section(site, check_operations(u, oc), r)) status = kViolation;
    r.text << "axioms:\n";
    if (run_axioms(site, aa, r) != kOk) status = kViolation;
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations with cobordism cycles over finite declared sites."};
    app.require_subcommand(1);
    Common common;
    QuotientArgs qa;
    AxiomArgs aa;
    DualityArgs da;
    std::string expr, alpha, beta, object, point;
    std::vector<std::string> classes;
    bool welldefined = false;
    int fgl_degree = 4;

    auto add_common = [&](CLI::App* sub, bool positional_site) {
        if (positional_site)
            sub->add_option("site_file", common.site_path, "Site file");
        sub->add_option("--site", common.site_path, "Site file");
        sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "machine"}));
        sub->add_option("--output", common.output, "Write the report to this file");
    };
    auto add_quotient = [&](CLI::App* sub) {
        sub->add_option("--arrow", qa.arrow, "Theory arrow pi_X: X -> S");
        sub->add_option("--rmax", qa.rmax, "Bundle cap of the universe (default rel_dim + 2)");
        sub->add_option("--degree-bound", qa.degree_bound, "Lazard truncation N")->check(CLI::Range(1, 12));
        sub->add_option("--threads", qa.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    };

    auto* validate = app.add_subcommand("validate", "Parse and validate a site");
    add_common(validate, true);

    auto* eval = app.add_subcommand("eval", "Evaluate an element expression");
    add_common(eval, false);
    add_quotient(eval);
    eval->add_option("--expr", expr, "Element expression")->required();
    auto* eval_stages = eval->add_option("--stages", qa.stages, "Report the class in this quotient");

    auto* quot = app.add_subcommand("quotient", "Graded quotient of a universe");
    add_common(quot, false);
    add_quotient(quot);
    quot->add_option("--stages", qa.stages, "Relation stages, a prefix of dim,sect,fgl");
    quot->add_option("--class", classes, "Element expression to reduce (repeatable)")->allow_extra_args(false);
    quot->add_flag("--welldefined", welldefined, "Check the operations against the relations");

    auto* axioms = app.add_subcommand("axioms", "Axiom conformance suites");
    add_common(axioms, false);
    axioms->add_option("--suite", aa.suite, "all, bivariant, overcategory, grading (comma separated)");
    axioms->add_option("--only", aa.only, "Comma separated axiom ids");
    axioms->add_option("--budget", aa.budget, "Instances per axiom");
    axioms->add_option("--per-diagram", aa.per_diagram, "Generator tuples per diagram (0: all)");
    axioms->add_option("--universe", aa.universe, "Bundle cap of the generators");

    auto* fgl = app.add_subcommand("fgl", "Universal formal group law and Lazard ranks");
    fgl->add_option("--degree", fgl_degree, "Truncation degree N")->check(CLI::Range(1, 12));
    fgl->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "machine"}));
    fgl->add_option("--output", common.output, "Write the report to this file");

    auto* cap = app.add_subcommand("cap", "Cap product of a class over id_X with one over X -> pt");
    add_common(cap, false);
    cap->add_option("--object", object, "The object X")->required();
    cap->add_option("--point", point, "The point object (default: the only object of dimension 0)");
    cap->add_option("--alpha", alpha, "Element over id_X")->required();
    cap->add_option("--beta", beta, "Element over X -> pt")->required();

    auto* dual = app.add_subcommand("duality", "Duality maps, resolution order and transitions");
    add_common(dual, false);
    dual->add_option("--object", da.object, "The object X")->required();
    dual->add_option("--point", da.point, "The point object (default: the only object of dimension 0)");
    dual->add_option("--resolution", da.resolutions, "Restrict to this resolution (repeatable)")->allow_extra_args(false);
    dual->add_option("--expr", da.expr, "Evaluate D_p on this element over id_X");
    dual->add_option("--stages", da.stages, "Stages of the target presentation for the colimit");
    dual->add_option("--rmax", da.rmax, "Bundle cap of the source universe");
    dual->add_option("--degree-bound", da.degree_bound, "Lazard truncation N")->check(CLI::Range(1, 12));
    dual->add_option("--threads", da.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    auto* report = app.add_subcommand("report", "Site summary, quotients, well-definedness and axioms");
    add_common(report, false);
    add_quotient(report);
    report->add_option("--budget", aa.budget, "Axiom instances per axiom");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    Report r;
    int status = kOk;
    try {
        if (sub == fgl) {
            status = run_fgl(fgl_degree, r);
        } else {
            if (common.site_path.empty()) throw UsageError("missing site file (--site)");
            Site site;
            try {
                site = load_site(common.site_path);
            } catch (const Error& e) {
                std::cerr << e.what() << "\n";
                if (sub == validate) {
                    std::cout << (common.format == "machine" ? "" : "status invalid\n\n[machine]\n")
                              << "status = invalid\nerror = " << e.what() << "\n";
                }
                return kViolation;
            }
            if (sub == validate)
                status = run_validate(site, r);
            else if (sub == eval)
                status = run_eval(site, expr, qa, eval_stages->count() > 0, r);
            else if (sub == quot)
                status = run_quotient(site, qa, classes, welldefined, r);
            else if (sub == axioms)
                status = run_axioms(site, aa, r);
            else if (sub == cap)
                status = run_cap(site, object, point, alpha, beta, r);
            else if (sub == dual)
                status = run_duality(site, da, r);
            else if (sub == report)
                status = run_report(site, qa, aa, r);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << sub->help();
        return kUsage;
    } catch (const ExpressionError& e) {
        std::cerr << e.what() << "\n\n" << expression_synopsis();
        return kUsage;
    } catch (const StageOrder& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kViolation;
    }

    std::string out = r.render(common.format == "machine");
    if (common.output.empty()) {
        std::cout << out;
    } else {
        std::ofstream f(common.output, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write '" << common.output << "'\n";
            return kViolation;
        }
        f << out;
    }
    return status;
}
