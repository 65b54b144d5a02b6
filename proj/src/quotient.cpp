#include "cobord/quotient.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <future>
#include <set>
#include <sstream>

#include "cobord/error.hpp"

namespace cobord {

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Dim: return "dim";
        case Stage::Sect: return "sect";
        case Stage::Fgl: return "fgl";
    }
    return "?";
}

StageSet StageSet::parse(const std::string& list) {
    std::set<int> seen;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string s;
        for (char c : item)
            if (c != ' ') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (s.empty() || s == "none") continue;
        if (s == "dim")
            seen.insert(1);
        else if (s == "sect")
            seen.insert(2);
        else if (s == "fgl")
            seen.insert(3);
        else
            throw StageOrder("unknown stage '" + item + "'");
    }
    int level = static_cast<int>(seen.size());
    if (level > 0 && *seen.rbegin() != level)
        throw StageOrder("stages must be built in order dim < sect < fgl; got '" + list + "'");
    return {level};
}

std::string StageSet::str() const {
    static const char* names[] = {"none", "dim", "dim,sect", "dim,sect,fgl"};
    return names[level];
}

// --- Universe ---------------------------------------------------------------------

Universe::Universe(const Site& site, MorphismId arrow, std::size_t rmax)
    : site_(&site), arrow_(arrow), rmax_(rmax), cycles_(enumerate_cycles(site, arrow, rmax)) {
    for (std::size_t i = 0; i < cycles_.size(); ++i) index_.emplace(cycles_[i], i);
    for (auto h : cycle_structures(site, arrow)) {
        int d = *site.morphism(site.compose(arrow, h)).rel_dim;
        structure_dim_[h.value] = d;
        max_dim_ = std::max(max_dim_, d);
    }
}

std::optional<std::size_t> Universe::index(const Cycle& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Universe::is_dim_dead(const Cycle& c) const {
    auto it = structure_dim_.find(c.structure.value);
    int d = it != structure_dim_.end() ? it->second : structure_dim(*site_, c);
    return static_cast<int>(c.rank()) > d;
}

std::size_t default_rmax(const Site& site, MorphismId arrow) {
    const auto& m = site.morphism(arrow);
    int rel = m.rel_dim ? *m.rel_dim : site.object(m.source).dim - site.object(m.target).dim;
    return static_cast<std::size_t>(std::max(0, rel) + 2);
}

// --- relation families ---------------------------------------------------------------

RelationSubgroup enumerate_rdim(const Universe& u) {
    const Site& site = u.site();
    const ObjectId base = site.morphism(u.arrow()).target;
    struct Factorisation {
        MorphismId pi, nu;
        int dim;
        std::set<BundleId> pulled;
    };
    std::map<std::uint32_t, std::vector<Factorisation>> cache;
    auto factorisations = [&](MorphismId h) -> const std::vector<Factorisation>& {
        auto it = cache.find(h.value);
        if (it != cache.end()) return it->second;
        auto& out = cache[h.value];
        MorphismId q = site.compose(u.arrow(), h);
        for (auto pi : site.morphisms_from(site.morphism(h).source)) {
            if (!site.morphism(pi).smooth) continue;
            for (auto nu : site.morphisms_between(site.morphism(pi).target, base)) {
                if (!site.morphism(nu).smooth) continue;
                auto k = site.try_compose(nu, pi);
                if (!k || *k != q) continue;
                Factorisation f{pi, nu, *site.morphism(nu).rel_dim, {}};
                for (auto l : site.bundle_classes_on(site.morphism(pi).target))
                    if (auto pl = site.try_pullback(pi, l)) f.pulled.insert(*pl);
                out.push_back(std::move(f));
            }
        }
        return out;
    };

    RelationSubgroup r{Stage::Dim, {}, {}, {}};
    for (const auto& c : u.cycles()) {
        for (const auto& f : factorisations(c.structure)) {
            int count = 0;
            for (auto l : c.bundles) count += f.pulled.count(l) ? 1 : 0;
            if (count > f.dim) {
                r.generators.emplace_back(c);
                r.witnesses.push_back(format(site, c) + " via " + site.name(f.pi) + ", " + site.name(f.nu) + ": " +
                                      std::to_string(count) + " pulled-back bundles > " + std::to_string(f.dim));
                break;
            }
        }
    }
    return r;
}

RelationSubgroup enumerate_rsect(const Universe& u) {
    const Site& site = u.site();
    RelationSubgroup r{Stage::Sect, {}, {}, {}};
    for (const auto& c : u.cycles()) {
        std::set<BundleId> distinct(c.bundles.begin(), c.bundles.end());
        for (auto b : distinct)
            for (const auto* s : site.sections_of(b)) {
                if (s->base != c.source) continue;
                Element rel(c);
                std::string note = format(site, c) + " with section " + s->name;
                if (s->zero_locus) {
                    MorphismId i = *s->inclusion;
                    MorphismId hz = site.compose(c.structure, i);
                    auto qz = site.try_compose(u.arrow(), hz);
                    if (!qz)
                        throw MissingDeclaration("composite " + site.name(u.arrow()) + "." + site.name(hz) +
                                                 " needed by section " + s->name);
                    // a zero locus that is not smooth over the base is not transverse for this arrow
                    if (!site.morphism(*qz).smooth) continue;
                    std::vector<BundleId> rest = c.bundles;
                    rest.erase(std::find(rest.begin(), rest.end(), b));
                    for (auto& l : rest) l = site.pullback(i, l);
                    rel -= Element(make_cycle(site, hz, u.arrow(), rest));
                    note += " vanishing on " + site.name(*s->zero_locus);
                } else {
                    note += " (nowhere vanishing)";
                }
                r.generators.push_back(std::move(rel));
                r.witnesses.push_back(std::move(note));
            }
    }
    return r;
}

RelationSubgroup enumerate_rfgl(const Universe& u, const FormalGroupLaw& f) {
    const Site& site = u.site();
    RelationSubgroup r{Stage::Fgl, {}, {}, {}};
    const std::size_t g = f.ring->generator_count();
    for (const auto& c : u.cycles()) {
        if (u.is_dim_dead(c)) continue;
        int needed = structure_dim(site, c) - static_cast<int>(c.rank());
        std::set<std::pair<BundleId, BundleId>> done;
        for (const auto& t : site.tensors()) {
            if (site.bundle(t.left).base != c.source) continue;
            auto a = site.canonical(t.left), b = site.canonical(t.right);
            if (!done.insert(std::minmax(a, b)).second) continue;
            Operator op_l = [&](const Element& e) { return append_bundle(site, a, e); };
            Operator op_m = [&](const Element& e) { return append_bundle(site, b, e); };
            Element target(c);
            LElement rel = evaluate_fgl(site, f, op_l, op_m, target, needed);
            rel -= LElement::from(append_bundle(site, t.result, target), g);
            LElement live(u.arrow());
            for (const auto& [cyc, x] : rel.terms())
                if (!u.is_dim_dead(cyc)) live.add_term(cyc, x);
            if (live.is_zero()) continue;
            r.lazard_generators.push_back(std::move(live));
            r.witnesses.push_back(site.name(t.left) + " (x) " + site.name(t.right) + " = " + site.name(t.result) +
                                  " at " + format(site, c));
        }
    }
    return r;
}

// --- presentation ------------------------------------------------------------------------

std::size_t QuotientPresentation::rank(int degree) const {
    auto it = pieces_.find(degree);
    return it == pieces_.end() ? 0 : it->second.rank;
}

std::vector<Integer> QuotientPresentation::torsion(int degree) const {
    auto it = pieces_.find(degree);
    return it == pieces_.end() ? std::vector<Integer>{} : it->second.torsion;
}

std::size_t QuotientPresentation::coord_index(int t, const Coord& c) const { return coords_.at(t).at(c); }

QuotientPresentation::Vector QuotientPresentation::to_vector(const LElement& e, bool& below) const {
    const Universe& u = *universe_;
    Vector v;
    below = false;
    if (!e.is_zero() && e.arrow() != u.arrow())
        throw ArrowMismatch("element is over " + u.site().name(e.arrow()) + ", presentation over " +
                            u.site().name(u.arrow()));
    const bool dim = stages_.has(Stage::Dim);
    for (const auto& [c, x] : e.terms()) {
        auto idx = u.index(c);
        if (dim && u.is_dim_dead(c)) continue;
        if (!idx)
            throw UniverseOverflow(format(u.site(), c) + " is outside the universe (cap " + std::to_string(u.rmax()) +
                                   " bundles); raise --rmax");
        if (!ring_) {
            for (const auto& [m, n] : x.terms()) {
                if (std::any_of(m.begin(), m.end(), [](int k) { return k != 0; }))
                    throw StageOrder("Lazard coefficients need a presentation with Lazard coefficients");
                int t = c.degree;
                if (n != 0) {
                    auto& row = v[t];
                    row[coord_index(t, Coord{0, 0, *idx})] += n;
                }
            }
            continue;
        }
        for (const auto& [m, n] : x.terms()) {
            int e_deg = ring_->degree(m);
            int t = c.degree - e_deg;
            if (t < lowest_ || e_deg > ring_->max_degree()) {
                below = true;
                continue;
            }
            auto& row = v[t];
            row[coord_index(t, Coord{e_deg, ring_->column(m), *idx})] += n;
        }
    }
    for (auto it = v.begin(); it != v.end();) {
        for (auto jt = it->second.begin(); jt != it->second.end();)
            jt = jt->second == 0 ? it->second.erase(jt) : std::next(jt);
        it = it->second.empty() ? v.erase(it) : std::next(it);
    }
    return v;
}

LElement QuotientPresentation::from_vector(const Vector& v) const {
    LElement out(universe_->arrow());
    const std::size_t g = ring_ ? ring_->generator_count() : 0;
    for (const auto& [t, row] : v) {
        const auto& list = coord_list_.at(t);
        for (const auto& [i, n] : row) {
            const Coord& c = list.at(i);
            const Cycle& cyc = universe_->cycles().at(c.cycle);
            if (ring_)
                out.add_term(cyc, LazardElement::monomial(ring_->monomials(c.lazard_degree).at(c.column), n));
            else
                out.add_term(cyc, LazardElement::constant(n, g));
        }
    }
    return out;
}

LElement QuotientPresentation::class_of(const LElement& e) const {
    bool below = false;
    auto v = to_vector(e, below);
    if (below)
        throw BoundTooSmall("element has terms below total degree " + std::to_string(lowest_) +
                            "; raise the degree bound");
    Vector out;
    for (auto& [t, row] : v) {
        auto it = pieces_.find(t);
        auto red = it == pieces_.end() ? row : it->second.lattice.reduce(row);
        if (!red.empty()) out[t] = std::move(red);
    }
    return from_vector(out);
}

Element QuotientPresentation::class_of(const Element& e) const {
    if (ring_) throw StageOrder("integer class_of on a presentation with Lazard coefficients");
    LElement l = class_of(LElement::from(e, 0));
    Element out(universe_->arrow());
    for (const auto& [c, x] : l.terms()) out.add_term(c, x.terms().begin()->second);
    return out;
}

QuotientPresentation::Vector QuotientPresentation::coordinates(const Element& e) const {
    bool below = false;
    auto v = to_vector(LElement::from(e, ring_ ? ring_->generator_count() : 0), below);
    if (below) throw BoundTooSmall("element has terms below total degree " + std::to_string(lowest_));
    return v;
}

bool QuotientPresentation::is_zero(const LElement& e) const { return class_of(e).is_zero(); }

bool QuotientPresentation::is_zero(const Element& e) const {
    return class_of(LElement::from(e, ring_ ? ring_->generator_count() : 0)).is_zero();
}

namespace {

std::size_t resource_limit(const QuotientOptions& o) {
    if (o.resource_limit) return o.resource_limit;
    if (const char* env = std::getenv("COBORD_RESOURCE_LIMIT")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw ResourceExceeded(std::string("COBORD_RESOURCE_LIMIT must be a positive integer, got '") + env + "'");
    }
    return 0;
}

}  // namespace

QuotientPresentation quotient(const Universe& u, StageSet stages, const QuotientOptions& options,
                              const FormalGroupLaw* law) {
    QuotientPresentation p;
    p.universe_ = &u;
    p.stages_ = stages;
    const Site& site = u.site();
    const bool lazard = stages.has(Stage::Fgl) || options.lazard_coefficients;
    if (lazard && !stages.has(Stage::Dim))
        throw StageOrder("Lazard coefficients need the dimension stage");

    FormalGroupLaw universal;
    const FormalGroupLaw* fgl = law;
    if (lazard) {
        if (!fgl) {
            universal = build_universal_fgl(options.degree_bound);
            fgl = &universal;
        }
        p.ring_ = fgl->ring;
        p.lowest_ = 1 - p.ring_->bound();
    } else {
        p.lowest_ = INT_MIN;
    }
    const int top_lazard = lazard ? p.ring_->max_degree() : 0;

    // coordinates
    for (std::size_t i = 0; i < u.cycles().size(); ++i) {
        const Cycle& c = u.cycles()[i];
        if (stages.has(Stage::Dim) && u.is_dim_dead(c)) continue;
        for (int e = 0; e <= top_lazard; ++e) {
            int t = c.degree - e;
            if (t < p.lowest_) continue;
            std::size_t cols = lazard ? p.ring_->monomials(e).size() : 1;
            for (std::size_t col = 0; col < cols; ++col)
                p.coords_[t].emplace(QuotientPresentation::Coord{e, col, i}, 0);
        }
    }
    const std::size_t limit = resource_limit(options);
    for (auto& [t, m] : p.coords_) {
        if (limit && m.size() > limit)
            throw ResourceExceeded("degree " + std::to_string(t) + " needs " + std::to_string(m.size()) +
                                   " lattice coordinates, over the limit of " + std::to_string(limit));
        auto& list = p.coord_list_[t];
        std::size_t k = 0;
        for (auto& [c, idx] : m) {
            idx = k++;
            list.push_back(c);
        }
    }

    // rows, grouped by total degree
    std::map<int, std::vector<std::map<std::size_t, Integer>>> rows;
    auto push = [&](const LElement& e) {
        bool below = false;
        auto v = p.to_vector(e, below);
        for (auto& [t, row] : v) rows[t].push_back(std::move(row));
    };
    if (lazard) {
        for (const auto& [t, list] : p.coord_list_)
            for (const auto& c : list) {
                if (c.column != 0) continue;  // once per (cycle, degree)
                for (const auto& b : p.ring_->relations(c.lazard_degree).basis()) {
                    std::map<std::size_t, Integer> row;
                    for (const auto& [col, n] : b.entries)
                        row[p.coord_index(t, {c.lazard_degree, col, c.cycle})] = n;
                    rows[t].push_back(std::move(row));
                }
            }
    }
    const std::size_t g = lazard ? p.ring_->generator_count() : 0;
    auto push_multiples = [&](const LElement& rel) {
        if (!lazard) {
            push(rel);
            return;
        }
        for (int e = 0; e <= top_lazard; ++e)
            for (const auto& m : p.ring_->monomials(e)) {
                LElement scaled(rel.arrow());
                auto mono = LazardElement::monomial(m);
                for (const auto& [c, x] : rel.terms()) scaled.add_term(c, p.ring_->multiply(mono, x));
                push(scaled);
            }
    };
    for (int level = 1; level <= stages.level; ++level) {
        RelationSubgroup r = level == 1   ? enumerate_rdim(u)
                             : level == 2 ? enumerate_rsect(u)
                                          : enumerate_rfgl(u, *fgl);
        if (r.stage == Stage::Fgl) {
            for (const auto& rel : r.lazard_generators) push_multiples(rel);
        } else {
            for (const auto& rel : r.generators) push_multiples(LElement::from(rel, g));
        }
        p.relations_.push_back(std::move(r));
    }
    (void)site;

    // lattices, one task per degree
    std::vector<int> degrees;
    for (const auto& [t, list] : p.coord_list_) degrees.push_back(t);
    auto build = [&](int t) {
        DegreePiece piece;
        piece.degree = t;
        piece.coordinates = p.coord_list_.at(t).size();
        piece.lattice = HermiteLattice(piece.coordinates);
        if (auto it = rows.find(t); it != rows.end())
            for (const auto& row : it->second) piece.lattice.add(row);
        piece.relation_rank = piece.lattice.rank();
        piece.rank = piece.lattice.quotient_rank();
        piece.torsion = piece.lattice.torsion();
        return piece;
    };
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        for (int t : degrees) p.pieces_.emplace(t, build(t));
    } else {
        for (std::size_t start = 0; start < degrees.size(); start += threads) {
            std::vector<std::future<DegreePiece>> tasks;
            for (std::size_t k = start; k < std::min(degrees.size(), start + threads); ++k)
                tasks.push_back(std::async(std::launch::async, build, degrees[k]));
            for (auto& task : tasks) {
                DegreePiece piece = task.get();
                p.pieces_.emplace(piece.degree, std::move(piece));
            }
        }
    }
    return p;
}

bool equal_in_quotient(const QuotientPresentation& p, const Element& a, const Element& b) { return p.equal(a, b); }

// --- well-definedness -----------------------------------------------------------------------

std::string OperationDescriptor::label(const Site& site) const {
    switch (kind) {
        case Kind::Pushforward: return "pushforward " + site.name(map);
        case Kind::SmoothPullback: return "smooth-pullback " + site.name(map);
        case Kind::Chern: return "chern " + site.name(bundle);
        case Kind::ExternalLeft: return "external-product (relation x free over " + site.name(other->arrow()) + ")";
        case Kind::ExternalRight: return "external-product (free over " + site.name(other->arrow()) + " x relation)";
    }
    return "?";
}

MorphismId operation_target_arrow(const Site& site, MorphismId arrow, const OperationDescriptor& op) {
    switch (op.kind) {
        case OperationDescriptor::Kind::Pushforward: return op.pushed_over;
        case OperationDescriptor::Kind::SmoothPullback: return site.compose(arrow, op.map);
        case OperationDescriptor::Kind::Chern: return arrow;
        case OperationDescriptor::Kind::ExternalLeft: {
            auto sq = site.pull_square(arrow, op.other->arrow());
            return site.compose(op.other->arrow(), sq.f_prime);
        }
        case OperationDescriptor::Kind::ExternalRight: {
            auto sq = site.pull_square(op.other->arrow(), arrow);
            return site.compose(arrow, sq.f_prime);
        }
    }
    return arrow;
}

namespace {

std::vector<Element> apply_op(const Site& site, const OperationDescriptor& op, const Element& e) {
    using K = OperationDescriptor::Kind;
    switch (op.kind) {
        case K::Pushforward: return {pushforward(site, op.map, op.pushed_over, e)};
        case K::SmoothPullback: return {smooth_pullback(site, op.map, e)};
        case K::Chern: return {chern(site, op.bundle, e)};
        case K::ExternalLeft:
        case K::ExternalRight: {
            std::vector<Element> out;
            for (const auto& c : op.other->cycles()) {
                if (c.rank() > op.other_cap) continue;
                Element b(c);
                out.push_back(op.kind == K::ExternalLeft ? external_product(site, e, b) : external_product(site, b, e));
            }
            return out;
        }
    }
    return {};
}

}  // namespace

WellDefinedReport check_welldefined(const RelationSubgroup& relations, const QuotientPresentation& target,
                                    const OperationDescriptor& op) {
    const Site& site = target.universe().site();
    WellDefinedReport report;
    report.operation = op.label(site);
    report.stage = relations.stage;
    const std::size_t g = target.ring() ? target.ring()->generator_count() : 0;
    auto check = [&](const LElement& image, const std::string& what) {
        ++report.checked;
        try {
            if (!target.is_zero(image)) report.violations.push_back(what);
        } catch (const UniverseOverflow& e) {
            report.violations.push_back(what + " (" + e.what() + ")");
        }
    };
    for (std::size_t k = 0; k < relations.size(); ++k) {
        const std::string& witness = relations.witnesses.at(k);
        try {
            if (relations.stage == Stage::Fgl) {
                const LElement& rel = relations.lazard_generators[k];
                // extend the operation linearly over the Lazard coefficients
                std::size_t n_images = 0;
                std::vector<LElement> images;
                for (const auto& [c, x] : rel.terms()) {
                    auto imgs = apply_op(site, op, Element(c));
                    if (images.empty()) {
                        n_images = imgs.size();
                        images.assign(n_images, LElement());
                    }
                    for (std::size_t i = 0; i < imgs.size(); ++i)
                        for (const auto& [c2, n] : imgs[i].terms()) images[i].add_term(c2, Integer(n) * x);
                }
                for (const auto& img : images) check(img, witness);
            } else {
                for (const auto& img : apply_op(site, op, relations.generators[k]))
                    check(LElement::from(img, g), witness + " -> " + format(site, img));
            }
        } catch (const MissingDeclaration& e) {
            ++report.skipped;
            if (report.skipped_reasons.size() < 8) report.skipped_reasons.push_back(witness + ": " + e.what());
        } catch (const NotSmoothComposite& e) {
            ++report.skipped;
            if (report.skipped_reasons.size() < 8) report.skipped_reasons.push_back(witness + ": " + e.what());
        }
    }
    return report;
}

}  // namespace cobord
