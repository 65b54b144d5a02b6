#include "cobord/cycles.hpp"

#include <algorithm>
#include <functional>

#include "cobord/error.hpp"

namespace cobord {

// --- Element -------------------------------------------------------------------

Element::Element(const Cycle& c, Integer n) : arrow_(c.over) { add_term(c, n); }

Integer Element::coefficient(const Cycle& c) const {
    auto it = terms_.find(c);
    return it == terms_.end() ? Integer(0) : it->second;
}

std::set<int> Element::degrees() const {
    std::set<int> out;
    for (const auto& [c, n] : terms_) out.insert(c.degree);
    return out;
}

void Element::add_term(const Cycle& c, const Integer& n) {
    if (n == 0) return;
    if (terms_.empty()) arrow_ = c.over;
    if (c.over != arrow_) throw ArrowMismatch("cannot add cycles over different arrows");
    auto [it, inserted] = terms_.emplace(c, n);
    if (!inserted) {
        it->second += n;
        if (it->second == 0) terms_.erase(it);
    }
}

Element& Element::operator+=(const Element& other) {
    if (!terms_.empty() && !other.terms_.empty() && arrow_ != other.arrow_)
        throw ArrowMismatch("cannot add elements over different arrows");
    if (terms_.empty()) arrow_ = other.arrow_;
    for (const auto& [c, n] : other.terms_) add_term(c, n);
    return *this;
}

Element& Element::operator-=(const Element& other) {
    if (!terms_.empty() && !other.terms_.empty() && arrow_ != other.arrow_)
        throw ArrowMismatch("cannot subtract elements over different arrows");
    if (terms_.empty()) arrow_ = other.arrow_;
    for (const auto& [c, n] : other.terms_) add_term(c, -n);
    return *this;
}

Element& Element::operator*=(const Integer& n) {
    if (n == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [c, m] : terms_) m *= n;
    return *this;
}

// --- cycles --------------------------------------------------------------------

Cycle make_cycle(const Site& site, MorphismId h, MorphismId f, std::vector<BundleId> bundles) {
    const auto& hm = site.morphism(h);
    const auto& fm = site.morphism(f);
    if (hm.target != fm.source)
        throw NotComposable("cycle structure " + site.describe(h) + " does not land in the source of " +
                            site.describe(f));
    if (!hm.proper) throw NotProper("cycle structure " + site.describe(h) + " is not proper");
    auto q = site.compose(f, h);
    const auto& qm = site.morphism(q);
    if (!qm.smooth)
        throw NotSmoothComposite("composite " + site.name(f) + "." + site.name(h) + " = " + qm.name + " is not smooth");
    for (auto& l : bundles) {
        if (site.bundle(l).base != hm.source)
            throw NotComposable("bundle '" + site.name(l) + "' does not live on " + site.name(hm.source));
        l = site.canonical(l);
    }
    std::sort(bundles.begin(), bundles.end());
    Cycle c;
    c.over = f;
    c.structure = h;
    c.source = hm.source;
    c.degree = static_cast<int>(bundles.size()) - *qm.rel_dim;
    c.bundles = std::move(bundles);
    return c;
}

Cycle make_cycle(const Site& site, ObjectId source, MorphismId h, MorphismId f, std::vector<BundleId> bundles) {
    if (site.morphism(h).source != source)
        throw NotComposable("cycle structure " + site.describe(h) + " does not start at " + site.name(source));
    return make_cycle(site, h, f, std::move(bundles));
}

int structure_dim(const Site& site, const Cycle& c) {
    return *site.morphism(site.compose(c.over, c.structure)).rel_dim;
}

Element orientation(const Site& site, MorphismId f) {
    const auto& fm = site.morphism(f);
    if (!fm.smooth) throw NotSmooth(site.describe(f) + " has no orientation class: it is not smooth");
    return Element(make_cycle(site, site.identity(fm.source), f, {}));
}

Element unit(const Site& site, ObjectId x) { return orientation(site, site.identity(x)); }

namespace {

Element map_terms(const Element& alpha, MorphismId arrow, const std::function<Cycle(const Cycle&)>& fn) {
    Element out(arrow);
    for (const auto& [c, n] : alpha.terms()) out.add_term(fn(c), n);
    return out;
}

std::vector<BundleId> pull_all(const Site& site, MorphismId f, const std::vector<BundleId>& ls) {
    std::vector<BundleId> out;
    out.reserve(ls.size());
    for (auto l : ls) out.push_back(site.pullback(f, l));
    return out;
}

}  // namespace

Element product(const Site& site, const Element& alpha, const Element& beta) {
    MorphismId f = alpha.arrow();
    MorphismId g = beta.arrow();
    if (site.morphism(f).target != site.morphism(g).source)
        throw ArrowMismatch("product: " + site.describe(f) + " and " + site.describe(g) + " are not composable");
    MorphismId gf = site.compose(g, f);
    Element out(gf);
    for (const auto& [a, n] : alpha.terms())
        for (const auto& [b, m] : beta.terms()) {
            MorphismId h = a.structure;  // V -> X
            MorphismId k = b.structure;  // W -> Y
            auto sq1 = site.pull_square(k, f);
            MorphismId f1 = sq1.g_prime;   // X' -> W
            MorphismId k1 = sq1.f_prime;   // X' -> X
            auto sq2 = site.pull_square(k1, h);
            MorphismId h1 = sq2.g_prime;   // V' -> X'
            MorphismId k2 = sq2.f_prime;   // V' -> V
            std::vector<BundleId> ls = pull_all(site, k2, a.bundles);
            for (auto l : b.bundles) ls.push_back(site.pullback(h1, site.pullback(f1, l)));
            out.add_term(make_cycle(site, site.compose(h, k2), gf, std::move(ls)), n * m);
        }
    return out;
}

Element pushforward(const Site& site, MorphismId f, MorphismId g, const Element& alpha) {
    if (!site.morphism(f).proper) throw NotProper("pushforward along " + site.describe(f) + ": map is not proper");
    MorphismId gf = site.compose(g, f);
    if (!alpha.is_zero() && alpha.arrow() != gf)
        throw ArrowMismatch("pushforward along " + site.name(f) + ": element is not over " + site.name(g) + "." +
                            site.name(f));
    return map_terms(alpha, g, [&](const Cycle& c) {
        return make_cycle(site, site.compose(f, c.structure), g, c.bundles);
    });
}

Element pullback(const Site& site, MorphismId g, const Element& alpha) {
    MorphismId f = alpha.arrow();
    auto sq = site.pull_square(f, g);
    MorphismId g1 = sq.g_prime;  // X' -> X
    MorphismId f1 = sq.f_prime;  // X' -> Y'
    return map_terms(alpha, f1, [&](const Cycle& c) {
        auto sq2 = site.pull_square(c.structure, g1);
        MorphismId g2 = sq2.g_prime;  // V' -> V
        MorphismId h1 = sq2.f_prime;  // V' -> X'
        return make_cycle(site, h1, f1, pull_all(site, g2, c.bundles));
    });
}

Element chern(const Site& site, BundleId l, const Element& alpha) {
    if (!alpha.is_zero() && site.bundle(l).base != site.morphism(alpha.arrow()).source)
        throw NotComposable("Chern operator: bundle '" + site.name(l) + "' does not live on the source of " +
                            site.describe(alpha.arrow()));
    return map_terms(alpha, alpha.arrow(), [&](const Cycle& c) {
        auto ls = c.bundles;
        ls.push_back(site.pullback(c.structure, l));
        return make_cycle(site, c.structure, c.over, std::move(ls));
    });
}

Element append_bundle(const Site& site, BundleId l, const Element& alpha) {
    return map_terms(alpha, alpha.arrow(), [&](const Cycle& c) {
        if (site.bundle(l).base != c.source)
            throw NotComposable("bundle '" + site.name(l) + "' does not live on " + site.name(c.source));
        auto ls = c.bundles;
        ls.push_back(l);
        return make_cycle(site, c.structure, c.over, std::move(ls));
    });
}

Element external_product(const Site& site, const Element& alpha, const Element& beta) {
    MorphismId px = alpha.arrow();
    MorphismId py = beta.arrow();
    if (site.morphism(px).target != site.morphism(py).target)
        throw ArrowMismatch("external product needs arrows to a common base");
    return product(site, pullback(site, py, alpha), beta);
}

Element smooth_pullback(const Site& site, MorphismId f, const Element& alpha) {
    const auto& fm = site.morphism(f);
    if (!fm.smooth) throw NotSmooth("smooth pullback along " + site.describe(f) + ": map is not smooth");
    MorphismId py = alpha.arrow();
    if (!alpha.is_zero() && site.morphism(py).source != fm.target)
        throw ArrowMismatch("smooth pullback along " + site.name(f) + ": element is not over the target");
    MorphismId px = site.compose(py, f);
    return map_terms(alpha, px, [&](const Cycle& c) {
        auto sq = site.pull_square(c.structure, f);
        MorphismId f1 = sq.g_prime;  // W' -> W
        MorphismId k1 = sq.f_prime;  // W' -> X
        return make_cycle(site, k1, px, pull_all(site, f1, c.bundles));
    });
}

// --- enumeration -------------------------------------------------------------------

std::vector<MorphismId> cycle_structures(const Site& site, MorphismId arrow) {
    std::vector<MorphismId> out;
    for (auto h : site.morphisms_into(site.morphism(arrow).source)) {
        if (!site.morphism(h).proper) continue;
        auto q = site.try_compose(arrow, h);
        if (q && site.morphism(*q).smooth) out.push_back(h);
    }
    return out;
}

std::vector<Cycle> enumerate_cycles(const Site& site, MorphismId arrow, std::size_t max_bundles) {
    std::vector<Cycle> out;
    for (auto h : cycle_structures(site, arrow)) {
        const auto& classes = site.bundle_classes_on(site.morphism(h).source);
        std::vector<BundleId> current;
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            out.push_back(make_cycle(site, h, arrow, current));
            if (current.size() == max_bundles) return;
            for (std::size_t i = from; i < classes.size(); ++i) {
                current.push_back(classes[i]);
                rec(i);
                current.pop_back();
            }
        };
        rec(0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --- text ----------------------------------------------------------------------------

std::string format(const Site& site, const Cycle& c) {
    const auto& h = site.morphism(c.structure);
    std::string s = "[" + site.name(h.source) + " ->" + h.name + " " + site.name(h.target);
    if (!c.bundles.empty()) {
        s += " ;";
        for (std::size_t i = 0; i < c.bundles.size(); ++i) s += (i ? "," : " ") + site.name(c.bundles[i]);
    }
    return s + "]";
}

std::string format(const Site& site, const Element& e) {
    if (e.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [c, n] : e.terms()) {
        Integer mag = abs(n);
        if (first)
            s += n < 0 ? "-" : "";
        else
            s += n < 0 ? " - " : " + ";
        if (mag != 1) s += mag.get_str() + "*";
        s += format(site, c);
        first = false;
    }
    return s;
}

}  // namespace cobord
