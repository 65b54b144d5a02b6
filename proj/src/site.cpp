#include "cobord/site.hpp"

#include <algorithm>
#include <numeric>

#include "cobord/error.hpp"

namespace cobord {

namespace {

template <class T>
std::optional<T> lookup(const std::unordered_map<std::string, std::uint32_t>& names, std::string_view n) {
    auto it = names.find(std::string(n));
    if (it == names.end()) return std::nullopt;
    return T{it->second};
}

}  // namespace

std::optional<ObjectId> Site::find_object(std::string_view n) const { return lookup<ObjectId>(object_names_, n); }
std::optional<MorphismId> Site::find_morphism(std::string_view n) const {
    return lookup<MorphismId>(morphism_names_, n);
}
std::optional<BundleId> Site::find_bundle(std::string_view n) const { return lookup<BundleId>(bundle_names_, n); }

ObjectId Site::object_id(std::string_view n) const {
    if (auto id = find_object(n)) return *id;
    throw MissingDeclaration("object '" + std::string(n) + "' is not declared");
}
MorphismId Site::morphism_id(std::string_view n) const {
    if (auto id = find_morphism(n)) return *id;
    throw MissingDeclaration("morphism '" + std::string(n) + "' is not declared");
}
BundleId Site::bundle_id(std::string_view n) const {
    if (auto id = find_bundle(n)) return *id;
    throw MissingDeclaration("bundle '" + std::string(n) + "' is not declared");
}

std::vector<MorphismId> Site::morphisms_between(ObjectId source, ObjectId target) const {
    std::vector<MorphismId> out;
    for (std::uint32_t i = 0; i < morphisms_.size(); ++i)
        if (morphisms_[i].source == source && morphisms_[i].target == target) out.push_back(MorphismId{i});
    return out;
}

std::vector<MorphismId> Site::morphisms_into(ObjectId target) const {
    std::vector<MorphismId> out;
    for (std::uint32_t i = 0; i < morphisms_.size(); ++i)
        if (morphisms_[i].target == target) out.push_back(MorphismId{i});
    return out;
}

std::vector<MorphismId> Site::morphisms_from(ObjectId source) const {
    std::vector<MorphismId> out;
    for (std::uint32_t i = 0; i < morphisms_.size(); ++i)
        if (morphisms_[i].source == source) out.push_back(MorphismId{i});
    return out;
}

std::string Site::describe(MorphismId m) const {
    const auto& mm = morphism(m);
    return mm.name + ": " + name(mm.source) + " -> " + name(mm.target);
}

// --- construction ------------------------------------------------------------

ObjectId Site::add_object(SiteObject o) {
    if (object_names_.count(o.name))
        throw ValidationError("V001", o.line, "object '" + o.name + "' declared twice");
    if (o.dim < 0) throw ValidationError("V002", o.line, "object '" + o.name + "' has negative dimension");
    ObjectId id{static_cast<std::uint32_t>(objects_.size())};
    object_names_[o.name] = id.value;
    std::string idname = "id_" + o.name;
    int line = o.line;
    objects_.push_back(std::move(o));
    Morphism ident;
    ident.name = idname;
    ident.source = ident.target = id;
    ident.proper = ident.smooth = true;
    ident.rel_dim = 0;
    ident.identity = true;
    ident.line = line;
    identities_.push_back(add_morphism(std::move(ident)));
    classes_on_.emplace_back();
    return id;
}

MorphismId Site::add_morphism(Morphism m) {
    if (morphism_names_.count(m.name))
        throw ValidationError("V001", m.line, "morphism '" + m.name + "' declared twice");
    MorphismId id{static_cast<std::uint32_t>(morphisms_.size())};
    morphism_names_[m.name] = id.value;
    morphisms_.push_back(std::move(m));
    return id;
}

BundleId Site::add_bundle(LineBundle b) {
    if (bundle_names_.count(b.name))
        throw ValidationError("V001", b.line, "bundle '" + b.name + "' declared twice");
    BundleId id{static_cast<std::uint32_t>(bundles_.size())};
    bundle_names_[b.name] = id.value;
    bundles_.push_back(std::move(b));
    union_find_.push_back(id.value);
    return id;
}

void Site::add_composite(MorphismId g, MorphismId f, MorphismId k, int line) {
    auto k2 = std::make_pair(g.value, f.value);
    if (auto it = composites_.find(k2); it != composites_.end()) {
        if (it->second != k)
            throw ValidationError("V004", line,
                                  "composite " + name(g) + "." + name(f) + " declared twice with different values");
        return;
    }
    composites_[k2] = k;
    composite_lines_[k2] = line;
}

void Site::add_square(FiberSquare s, int line) {
    auto k = key(s.f.value, s.g.value);
    if (square_index_.count(k))
        throw ValidationError("V007", line, "square (" + name(s.f) + "," + name(s.g) + ") declared twice");
    square_index_[k] = squares_.size();
    squares_.push_back(s);
    square_lines_.push_back(line);
}

void Site::add_pullback(MorphismId f, BundleId l, BundleId result, int line) {
    pullback_decls_.push_back({f, l, result, line});
}

void Site::add_tensor(TensorEntry t) { tensors_.push_back(t); }

std::uint32_t Site::find_root(std::uint32_t b) const {
    while (union_find_[b] != b) {
        union_find_[b] = union_find_[union_find_[b]];
        b = union_find_[b];
    }
    return b;
}

void Site::add_iso(BundleId a, BundleId b) {
    auto ra = find_root(a.value), rb = find_root(b.value);
    if (ra == rb) return;
    // the smaller index stays the root, so the representative is the first declared member
    if (ra < rb)
        union_find_[rb] = ra;
    else
        union_find_[ra] = rb;
}

void Site::add_section(SectionDatum s) { sections_.push_back(std::move(s)); }
void Site::add_resolution(Resolution r) { resolutions_.push_back(std::move(r)); }

void Site::build_classes() {
    iso_rep_.assign(bundles_.size(), BundleId{});
    for (auto& v : classes_on_) v.clear();
    for (std::uint32_t i = 0; i < bundles_.size(); ++i) {
        iso_rep_[i] = BundleId{find_root(i)};
        if (iso_rep_[i].value == i) classes_on_[bundles_[i].base.value].push_back(BundleId{i});
    }
    for (std::uint32_t i = 0; i < bundles_.size(); ++i)
        if (bundles_[iso_rep_[i].value].base != bundles_[i].base)
            throw ValidationError("V011", bundles_[i].line,
                                  "bundles '" + bundles_[i].name + "' and '" + bundles_[iso_rep_[i].value].name +
                                      "' are declared isomorphic but live on different objects");

    pullbacks_.clear();
    for (const auto& d : pullback_decls_) {
        const auto& f = morphism(d.f);
        if (bundle(d.l).base != f.target)
            throw ValidationError("V009", d.line,
                                  "pullback " + f.name + "* " + name(d.l) + ": bundle is not on the target of " + f.name);
        if (bundle(d.result).base != f.source)
            throw ValidationError("V009", d.line,
                                  "pullback " + f.name + "* " + name(d.l) + " = " + name(d.result) +
                                      ": result is not on the source of " + f.name);
        if (f.identity && !isomorphic(d.l, d.result))
            throw ValidationError("V010", d.line, "pullback along an identity must return an isomorphic bundle");
        auto k = key(d.f.value, canonical(d.l).value);
        auto res = canonical(d.result);
        auto [it, inserted] = pullbacks_.emplace(k, res);
        if (!inserted && it->second != res)
            throw ValidationError("V010", d.line,
                                  "pullback " + f.name + "* " + name(d.l) +
                                      " disagrees with an earlier declaration for an isomorphic bundle");
    }

    tensor_table_.clear();
    for (const auto& t : tensors_) {
        auto base = bundle(t.left).base;
        if (bundle(t.right).base != base || bundle(t.result).base != base)
            throw ValidationError("V011", t.line, "tensor " + name(t.left) + " (x) " + name(t.right) +
                                                      ": all three bundles must live on one object");
        auto a = canonical(t.left), b = canonical(t.right), r = canonical(t.result);
        auto [it, inserted] = tensor_table_.emplace(key(a.value, b.value), r);
        if (!inserted && it->second != r)
            throw ValidationError("V012", t.line,
                                  "tensor " + name(t.left) + " (x) " + name(t.right) + " disagrees with an earlier entry");
    }
    std::vector<std::pair<std::uint64_t, BundleId>> swapped;
    for (const auto& [k, r] : tensor_table_) {
        std::uint64_t sk = key(static_cast<std::uint32_t>(k & 0xffffffffu), static_cast<std::uint32_t>(k >> 32));
        auto it = tensor_table_.find(sk);
        if (it != tensor_table_.end() && it->second != r)
            throw ValidationError("V012", 0, "tensor product is not commutative on declared classes");
        if (it == tensor_table_.end()) swapped.emplace_back(sk, r);
    }
    for (auto& [k, r] : swapped) tensor_table_.emplace(k, r);
}

void Site::finalize(Validation mode) {
    build_classes();
    if (mode == Validation::Skip) return;
    validate_morphisms();
    validate_composites();
    validate_squares();
    validate_bundles();
    validate_sections();
    validate_resolutions();
}

// --- queries -------------------------------------------------------------------

std::optional<MorphismId> Site::try_compose(MorphismId g, MorphismId f) const {
    const auto& gm = morphism(g);
    const auto& fm = morphism(f);
    if (fm.target != gm.source)
        throw NotComposable(name(g) + "." + name(f) + ": target of " + fm.name + " (" + name(fm.target) +
                            ") is not the source of " + gm.name + " (" + name(gm.source) + ")");
    if (fm.identity) return g;
    if (gm.identity) return f;
    auto it = composites_.find({g.value, f.value});
    if (it == composites_.end()) return std::nullopt;
    return it->second;
}

MorphismId Site::compose(MorphismId g, MorphismId f) const {
    if (auto k = try_compose(g, f)) return *k;
    throw MissingDeclaration("composite " + name(g) + "." + name(f) + " (add 'composite " + name(g) + "." +
                             name(f) + " = ...' to [composites])");
}

MorphismId Site::compose_path(const std::vector<MorphismId>& path) const {
    if (path.empty()) throw NotComposable("empty path");
    MorphismId acc = path.front();
    for (std::size_t i = 1; i < path.size(); ++i) acc = compose(path[i], acc);
    return acc;
}

std::optional<FiberSquare> Site::try_pull_square(MorphismId f, MorphismId g) const {
    const auto& fm = morphism(f);
    const auto& gm = morphism(g);
    if (fm.target != gm.target)
        throw NotComposable("square (" + fm.name + "," + gm.name + "): the maps have different targets");
    if (gm.identity) return FiberSquare{f, g, fm.source, identity(fm.source), f};
    if (fm.identity) return FiberSquare{f, g, gm.source, g, identity(gm.source)};
    if (auto it = square_index_.find(key(f.value, g.value)); it != square_index_.end()) return squares_[it->second];
    if (auto it = square_index_.find(key(g.value, f.value)); it != square_index_.end()) {
        const auto& s = squares_[it->second];
        return FiberSquare{f, g, s.corner, s.f_prime, s.g_prime};
    }
    return std::nullopt;
}

FiberSquare Site::pull_square(MorphismId f, MorphismId g) const {
    if (auto s = try_pull_square(f, g)) return *s;
    throw MissingDeclaration("fiber square over (" + name(f) + "," + name(g) + ") (add 'square (" + name(f) + "," +
                             name(g) + ") corner=... proj1=... proj2=...' to [squares])");
}

std::optional<BundleId> Site::try_pullback(MorphismId f, BundleId l) const {
    const auto& fm = morphism(f);
    if (bundle(l).base != fm.target)
        throw NotComposable("bundle '" + name(l) + "' does not live on the target of " + describe(f));
    if (fm.identity) return canonical(l);
    auto it = pullbacks_.find(key(f.value, canonical(l).value));
    if (it == pullbacks_.end()) return std::nullopt;
    return it->second;
}

BundleId Site::pullback(MorphismId f, BundleId l) const {
    if (auto r = try_pullback(f, l)) return *r;
    throw MissingDeclaration("pullback " + name(f) + "* " + name(l) + " (add 'pullback " + name(f) + "* " +
                             name(l) + " = ...' to [pullbacks])");
}

BundleId Site::pullback_path(const std::vector<MorphismId>& path, BundleId l) const {
    BundleId cur = l;
    for (auto it = path.rbegin(); it != path.rend(); ++it) cur = pullback(*it, cur);
    return cur;
}

std::optional<BundleId> Site::tensor(BundleId a, BundleId b) const {
    auto it = tensor_table_.find(key(canonical(a).value, canonical(b).value));
    if (it == tensor_table_.end()) return std::nullopt;
    return it->second;
}

std::vector<const SectionDatum*> Site::sections_of(BundleId l) const {
    std::vector<const SectionDatum*> out;
    for (const auto& s : sections_)
        if (isomorphic(s.bundle, l)) out.push_back(&s);
    return out;
}

std::vector<MorphismId> Site::refinements(MorphismId p1, MorphismId p2) const {
    std::vector<MorphismId> out;
    if (p1 == p2) out.push_back(identity(morphism(p1).source));
    for (auto m : morphisms_between(morphism(p2).source, morphism(p1).source)) {
        if (morphism(m).identity) continue;
        auto k = try_compose(p1, m);
        if (k && *k == p2) out.push_back(m);
    }
    return out;
}

// --- validation ------------------------------------------------------------------

void Site::validate_morphisms() const {
    for (const auto& m : morphisms_) {
        if (m.identity) continue;
        int expected = object(m.source).dim - object(m.target).dim;
        if (m.smooth && !m.rel_dim)
            throw ValidationError("V003", m.line, "smooth morphism '" + m.name + "' needs reldim=");
        if (!m.smooth && m.rel_dim)
            throw ValidationError("V003", m.line, "reldim= given for non-smooth morphism '" + m.name + "'");
        if (m.rel_dim && *m.rel_dim != expected)
            throw ValidationError("V003", m.line,
                                  "morphism '" + m.name + "' has reldim=" + std::to_string(*m.rel_dim) +
                                      " but dim(source) - dim(target) = " + std::to_string(expected));
    }
}

void Site::validate_composites() const {
    for (const auto& [gf, k] : composites_) {
        MorphismId g{gf.first}, f{gf.second};
        int line = composite_lines_.at(gf);
        const auto& gm = morphism(g);
        const auto& fm = morphism(f);
        const auto& km = morphism(k);
        if (fm.target != gm.source)
            throw ValidationError("V004", line, "composite " + gm.name + "." + fm.name + ": maps are not composable");
        if (km.source != fm.source || km.target != gm.target)
            throw ValidationError("V004", line,
                                  "composite " + gm.name + "." + fm.name + " = " + km.name +
                                      ": source or target of the result does not match");
        if (fm.identity && k != g)
            throw ValidationError("V017", line, "composite with an identity must return the other map");
        if (gm.identity && k != f)
            throw ValidationError("V017", line, "composite with an identity must return the other map");
        if (gm.proper && fm.proper && !km.proper)
            throw ValidationError("V005", line, "composite of proper maps " + gm.name + "." + fm.name +
                                                    " is declared non-proper");
        if (gm.smooth && fm.smooth && !km.smooth)
            throw ValidationError("V005", line, "composite of smooth maps " + gm.name + "." + fm.name +
                                                    " is declared non-smooth");
    }
    // associativity on every declared triple
    for (const auto& [gf, gfk] : composites_) {
        MorphismId g{gf.first}, f{gf.second};
        for (auto hm : morphisms_from(morphism(g).target)) {
            auto hg = try_compose(hm, g);
            if (!hg) continue;
            auto left = try_compose(hm, gfk);
            auto right = try_compose(*hg, f);
            if (left && right && *left != *right)
                throw ValidationError("V006", composite_lines_.at(gf),
                                      "composition is not associative: (" + name(hm) + "." + name(g) + ")." +
                                          name(f) + " = " + name(*right) + " but " + name(hm) + ".(" + name(g) +
                                          "." + name(f) + ") = " + name(*left));
        }
    }
}

void Site::validate_squares() const {
    for (std::size_t i = 0; i < squares_.size(); ++i) {
        const auto& s = squares_[i];
        int line = square_lines_[i];
        const auto& f = morphism(s.f);
        const auto& g = morphism(s.g);
        const auto& gp = morphism(s.g_prime);
        const auto& fp = morphism(s.f_prime);
        std::string label = "square (" + f.name + "," + g.name + ")";
        if (f.target != g.target) throw ValidationError("V007", line, label + ": maps have different targets");
        if (gp.source != s.corner || gp.target != f.source)
            throw ValidationError("V007", line, label + ": proj1 must map the corner to the source of " + f.name);
        if (fp.source != s.corner || fp.target != g.source)
            throw ValidationError("V007", line, label + ": proj2 must map the corner to the source of " + g.name);
        auto a = try_compose(s.f, s.g_prime);
        auto b = try_compose(s.g, s.f_prime);
        if (!a || !b)
            throw ValidationError("V007", line,
                                  label + ": composites " + f.name + "." + gp.name + " and " + g.name + "." + fp.name +
                                      " must be declared");
        if (*a != *b) throw ValidationError("V007", line, label + ": square does not commute");
        auto inherit = [&](const Morphism& base, const Morphism& pulled) {
            if (base.proper && !pulled.proper)
                throw ValidationError("V008", line, label + ": " + pulled.name + " must be proper like " + base.name);
            if (base.smooth && (!pulled.smooth || pulled.rel_dim != base.rel_dim))
                throw ValidationError("V008", line,
                                      label + ": " + pulled.name + " must be smooth of the same relative dimension as " +
                                          base.name);
        };
        inherit(f, fp);
        inherit(g, gp);
        if (auto it = square_index_.find(key(s.g.value, s.f.value)); it != square_index_.end() && it->second != i) {
            const auto& t = squares_[it->second];
            if (t.corner != s.corner || t.g_prime != s.f_prime || t.f_prime != s.g_prime)
                throw ValidationError("V018", line, label + ": transposed square is declared differently");
        }
    }
}

void Site::validate_bundles() const {
    // functoriality: (g.f)* L = f* g* L whenever all three are declared
    for (const auto& [gf, k] : composites_) {
        MorphismId g{gf.first}, f{gf.second};
        for (auto l : classes_on_[morphism(g).target.value]) {
            auto gl = try_pullback(g, l);
            if (!gl) continue;
            auto fgl = try_pullback(f, *gl);
            auto kl = try_pullback(k, l);
            if (fgl && kl && *fgl != *kl)
                throw ValidationError("V010", composite_lines_.at(gf),
                                      "pullback is not functorial: (" + name(g) + "." + name(f) + ")* " + name(l) +
                                          " = " + name(*kl) + " but " + name(f) + "* " + name(g) + "* " + name(l) +
                                          " = " + name(*fgl));
        }
    }
    // associativity of tensor on declared classes
    for (const auto& t : tensors_) {
        auto ab = canonical(t.result);
        auto base = bundle(t.left).base;
        for (auto c : classes_on_[base.value]) {
            auto left = tensor(ab, c);
            auto bc = tensor(t.right, c);
            if (!left || !bc) continue;
            auto right = tensor(t.left, *bc);
            if (right && *right != *left)
                throw ValidationError("V012", t.line,
                                      "tensor product is not associative at (" + name(t.left) + "," + name(t.right) +
                                          "," + name(c) + ")");
        }
        // pullback distributes over tensor
        for (auto f : morphisms_into(base)) {
            if (morphism(f).identity) continue;
            auto fl = try_pullback(f, t.left);
            auto fm = try_pullback(f, t.right);
            auto fn = try_pullback(f, t.result);
            if (!fl || !fm || !fn) continue;
            auto prod = tensor(*fl, *fm);
            if (prod && *prod != *fn)
                throw ValidationError("V013", t.line,
                                      "pullback along " + name(f) + " does not distribute over " + name(t.left) +
                                          " (x) " + name(t.right));
        }
    }
}

void Site::validate_sections() const {
    for (const auto& s : sections_) {
        if (bundle(s.bundle).base != s.base)
            throw ValidationError("V014", s.line, "section '" + s.name + "': bundle is not on " + name(s.base));
        if (!s.zero_locus) continue;
        if (!s.inclusion)
            throw ValidationError("V014", s.line, "section '" + s.name + "': zero locus needs incl=");
        const auto& i = morphism(*s.inclusion);
        if (i.source != *s.zero_locus || i.target != s.base)
            throw ValidationError("V014", s.line,
                                  "section '" + s.name + "': incl must map the zero locus into " + name(s.base));
        if (!i.proper) throw ValidationError("V014", s.line, "section '" + s.name + "': inclusion must be proper");
        if (object(*s.zero_locus).dim != object(s.base).dim - 1)
            throw ValidationError("V014", s.line, "section '" + s.name + "': zero locus must have codimension one");
    }
}

void Site::validate_resolutions() const {
    for (const auto& r : resolutions_) {
        const auto& m = morphism(r.map);
        if (!m.proper) throw ValidationError("V015", r.line, "resolution '" + r.name + "' must be proper");
        if (!object(m.source).smooth)
            throw ValidationError("V015", r.line, "resolution '" + r.name + "' must have a smooth source");
    }
    // transitivity: refinements must compose to declared refinements
    for (const auto& a : resolutions_)
        for (const auto& b : resolutions_) {
            if (a.map == b.map || morphism(a.map).target != morphism(b.map).target) continue;
            for (auto mab : refinements(a.map, b.map))
                for (const auto& c : resolutions_) {
                    if (c.map == b.map || c.map == a.map || morphism(c.map).target != morphism(b.map).target) continue;
                    for (auto mbc : refinements(b.map, c.map)) {
                        auto mac = try_compose(mab, mbc);
                        if (!mac || try_compose(a.map, *mac) != c.map)
                            throw ValidationError("V015", c.line,
                                                  "refinements " + name(mab) + " and " + name(mbc) +
                                                      " do not compose to a declared refinement of " + a.name +
                                                      " by " + c.name);
                    }
                }
        }
}

}  // namespace cobord
