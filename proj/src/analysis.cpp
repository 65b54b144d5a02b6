#include "cobord/analysis.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <tuple>
#include <set>

#include "cobord/error.hpp"

namespace cobord {

std::vector<std::string> bivariant_axioms() { return {"A1", "A2", "A3", "A12", "A13", "A23", "A123", "Units", "Comm"}; }

std::vector<std::string> overcategory_axioms() {
    return {"S:D1", "S:D2", "S:D3", "S:D4", "S:A1", "S:A2", "S:A3", "S:A4", "S:A5", "S:A6", "S:A7", "S:A8"};
}

std::vector<std::string> grading_laws() {
    return {"grade:product", "grade:pushforward", "grade:pullback", "grade:chern", "grade:smooth_pullback"};
}

namespace {

constexpr std::size_t kReasonCap = 5;

/// Distinct index tuples spread over the whole product, at most `cap` of them
/// (all of them when cap == 0 or the product is small enough).
template <class F>
void sample_tuples(const std::vector<std::size_t>& sizes, std::size_t cap, F&& fn) {
    std::size_t total = 1;
    for (auto s : sizes) {
        if (s == 0) return;
        total *= s;
    }
    std::size_t count = cap == 0 ? total : std::min(cap, total);
    std::size_t step = 1;
    if (count < total) {
        step = 7919;
        while (std::gcd(step, total) != 1) step += 2;
    }
    std::vector<std::size_t> idx(sizes.size());
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t code = (k * step) % total;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            idx[i] = code % sizes[i];
            code /= sizes[i];
        }
        if (!fn(idx)) return;
    }
}

class Suite {
public:
    Suite(const Site& site, const AxiomSuiteOptions& options) : site_(site), options_(options) {
        for (std::uint32_t i = 0; i < site.morphism_count(); ++i) {
            MorphismId m{i};
            all_.push_back(m);
            from_[site.morphism(m).source.value].push_back(m);
            into_[site.morphism(m).target.value].push_back(m);
        }
    }

    const std::vector<MorphismId>& all() const { return all_; }
    const std::vector<MorphismId>& from(ObjectId x) { return from_[x.value]; }
    const std::vector<MorphismId>& into(ObjectId x) { return into_[x.value]; }
    ObjectId src(MorphismId m) const { return site_.morphism(m).source; }
    ObjectId tgt(MorphismId m) const { return site_.morphism(m).target; }
    bool id(MorphismId m) const { return site_.is_identity(m); }
    bool proper(MorphismId m) const { return site_.morphism(m).proper; }
    bool smooth(MorphismId m) const { return site_.morphism(m).smooth; }

    const std::vector<Element>& gens(MorphismId arrow) {
        auto it = gens_.find(arrow.value);
        if (it != gens_.end()) return it->second;
        std::vector<Element> out;
        for (const auto& c : enumerate_cycles(site_, arrow, options_.max_bundles)) out.emplace_back(c);
        return gens_.emplace(arrow.value, std::move(out)).first->second;
    }

    void begin(const std::string& axiom) {
        report_ = AxiomReport();
        report_.axiom = axiom;
    }
    AxiomReport end() { return std::move(report_); }
    bool full() {
        if (report_.checked + report_.skipped >= options_.budget) report_.budget_exhausted = true;
        return report_.budget_exhausted;
    }

    template <class Sides, class Describe>
    bool equality(bool nontrivial, Sides&& sides, Describe&& describe) {
        if (full()) return false;
        try {
            auto [lhs, rhs] = sides();
            ++report_.checked;
            if (nontrivial) ++report_.nontrivial;
            if (!(lhs == rhs))
                report_.violations.push_back(describe() + ": " + format(site_, lhs) + " != " + format(site_, rhs));
        } catch (const MissingDeclaration& e) {
            skip(describe() + ": " + e.what());
        } catch (const Error& e) {
            ++report_.checked;
            report_.violations.push_back(describe() + ": " + e.what());
        }
        return !full();
    }

    /// Every term of `value` must have the expected degree.
    template <class Value, class Describe>
    bool degree(int expected, Value&& value, Describe&& describe) {
        if (full()) return false;
        try {
            Element e = value();
            ++report_.checked;
            ++report_.nontrivial;
            for (const auto& [c, n] : e.terms())
                if (c.degree != expected) {
                    report_.violations.push_back(describe() + ": " + format(site_, c) + " has degree " +
                                                 std::to_string(c.degree) + ", expected " + std::to_string(expected));
                    break;
                }
        } catch (const MissingDeclaration& e) {
            skip(describe() + ": " + e.what());
        } catch (const Error& e) {
            ++report_.checked;
            report_.violations.push_back(describe() + ": " + e.what());
        }
        return !full();
    }

    void skip(const std::string& why) {
        ++report_.skipped;
        if (report_.skipped_reasons.size() < kReasonCap) report_.skipped_reasons.push_back(why);
    }

    /// Composite or a recorded skip.
    std::optional<MorphismId> compose(MorphismId g, MorphismId f) {
        auto k = site_.try_compose(g, f);
        if (!k) skip("composite " + site_.name(g) + "." + site_.name(f) + " not declared");
        return k;
    }

    std::string names(std::initializer_list<MorphismId> ms) const {
        std::string s;
        for (auto m : ms) s += (s.empty() ? "" : ", ") + site_.name(m);
        return s;
    }
    std::string gen(const Element& e) const { return format(site_, e); }

    /// The declared map W1 -> W2 restricting to f and g on the factors.
    std::optional<MorphismId> product_map(const FiberSquare& s1, const FiberSquare& s2, MorphismId f, MorphismId g) {
        for (auto m : site_.morphisms_between(s1.corner, s2.corner)) {
            auto a = site_.try_compose(s2.g_prime, m);
            auto b = site_.try_compose(f, s1.g_prime);
            auto c = site_.try_compose(s2.f_prime, m);
            auto d = site_.try_compose(g, s1.f_prime);
            if (a && b && c && d && *a == *b && *c == *d) return m;
        }
        return std::nullopt;
    }

    const Site& site_;
    const AxiomSuiteOptions& options_;

private:
    std::vector<MorphismId> all_;
    std::map<std::uint32_t, std::vector<MorphismId>> from_, into_;
    std::map<std::uint32_t, std::vector<Element>> gens_;
    AxiomReport report_;
};

using Pair = std::pair<Element, Element>;

// --- bivariant ---------------------------------------------------------------------------

void axiom_a1(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.from(s.tgt(f)))
            for (auto h : s.from(s.tgt(g))) {
                const auto &A = s.gens(f), &B = s.gens(g), &C = s.gens(h);
                bool nt = !(s.id(f) && s.id(g) && s.id(h));
                bool go = true;
                sample_tuples({A.size(), B.size(), C.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                    const auto &a = A[i[0]], &b = B[i[1]], &c = C[i[2]];
                    return go = s.equality(
                               nt,
                               [&] {
                                   return Pair{product(site, product(site, a, b), c),
                                               product(site, a, product(site, b, c))};
                               },
                               [&] { return "(" + s.gen(a) + " . " + s.gen(b) + ") . " + s.gen(c); });
                });
                if (!go) return;
            }
}

void axiom_a2(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all()) {
        if (!s.proper(f)) continue;
        for (auto g : s.from(s.tgt(f))) {
            if (!s.proper(g)) continue;
            auto gf = s.compose(g, f);
            if (!gf) continue;
            for (auto h : s.from(s.tgt(g))) {
                auto hg = s.compose(h, g);
                auto hgf = hg ? s.compose(*hg, f) : std::nullopt;
                if (!hgf) continue;
                bool nt = !(s.id(f) && s.id(g));
                for (const auto& a : s.gens(*hgf))
                    if (!s.equality(
                            nt,
                            [&] {
                                return Pair{pushforward(site, *gf, h, a),
                                            pushforward(site, g, h, pushforward(site, f, *hg, a))};
                            },
                            [&] { return "(" + s.names({g, f}) + ")_* " + s.gen(a); }))
                        return;
            }
        }
    }
}

void axiom_a3(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.into(s.tgt(f)))
            for (auto h : s.into(s.src(g))) {
                auto gh = s.compose(g, h);
                if (!gh) continue;
                bool nt = !(s.id(g) && s.id(h));
                for (const auto& a : s.gens(f))
                    if (!s.equality(
                            nt,
                            [&] { return Pair{pullback(site, *gh, a), pullback(site, h, pullback(site, g, a))}; },
                            [&] { return "(" + s.names({g, h}) + ")^* " + s.gen(a); }))
                        return;
            }
}

void axiom_a12(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all()) {
        if (!s.proper(f)) continue;
        for (auto g : s.from(s.tgt(f))) {
            auto gf = s.compose(g, f);
            if (!gf) continue;
            for (auto h : s.from(s.tgt(g))) {
                auto hg = s.compose(h, g);
                if (!hg) continue;
                const auto &A = s.gens(*gf), &B = s.gens(h);
                bool nt = !(s.id(f) && s.id(g) && s.id(h));
                bool go = true;
                sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                    const auto &a = A[i[0]], &b = B[i[1]];
                    return go = s.equality(
                               nt,
                               [&] {
                                   return Pair{pushforward(site, f, *hg, product(site, a, b)),
                                               product(site, pushforward(site, f, g, a), b)};
                               },
                               [&] { return site.name(f) + "_*(" + s.gen(a) + " . " + s.gen(b) + ")"; });
                });
                if (!go) return;
            }
        }
    }
}

void axiom_a13(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.from(s.tgt(f)))
            for (auto h : s.into(s.tgt(g))) {
                const auto &A = s.gens(f), &B = s.gens(g);
                bool nt = !(s.id(f) && s.id(g) && s.id(h));
                bool go = true;
                sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                    const auto &a = A[i[0]], &b = B[i[1]];
                    return go = s.equality(
                               nt,
                               [&] {
                                   auto sq = site.pull_square(g, h);
                                   return Pair{pullback(site, h, product(site, a, b)),
                                               product(site, pullback(site, sq.g_prime, a), pullback(site, h, b))};
                               },
                               [&] { return site.name(h) + "^*(" + s.gen(a) + " . " + s.gen(b) + ")"; });
                });
                if (!go) return;
            }
}

void axiom_a23(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all()) {
        if (!s.proper(f)) continue;
        for (auto g : s.from(s.tgt(f))) {
            auto gf = s.compose(g, f);
            if (!gf) continue;
            for (auto h : s.into(s.tgt(g))) {
                bool nt = !(s.id(f) && s.id(g) && s.id(h));
                for (const auto& a : s.gens(*gf))
                    if (!s.equality(
                            nt,
                            [&] {
                                auto sqy = site.pull_square(g, h);
                                auto sqx = site.pull_square(f, sqy.g_prime);
                                return Pair{pushforward(site, sqx.f_prime, sqy.f_prime, pullback(site, h, a)),
                                            pullback(site, h, pushforward(site, f, g, a))};
                            },
                            [&] { return "f'_* " + site.name(h) + "^* " + s.gen(a) + " with f = " + site.name(f); }))
                        return;
            }
        }
    }
}

void axiom_a123(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.into(s.tgt(f))) {
            if (!s.proper(g)) continue;
            for (auto h : s.from(s.tgt(f))) {
                auto hg = s.compose(h, g);
                auto hf = s.compose(h, f);
                if (!hg || !hf) continue;
                const auto &A = s.gens(f), &B = s.gens(*hg);
                bool nt = !(s.id(f) && s.id(g) && s.id(h));
                bool go = true;
                sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                    const auto &a = A[i[0]], &b = B[i[1]];
                    return go = s.equality(
                               nt,
                               [&] {
                                   auto sq = site.pull_square(f, g);
                                   return Pair{pushforward(site, sq.g_prime, *hf,
                                                           product(site, pullback(site, g, a), b)),
                                               product(site, a, pushforward(site, g, h, b))};
                               },
                               [&] { return "projection formula " + s.gen(a) + ", " + s.gen(b) + " along " +
                                            site.name(g); });
                });
                if (!go) return;
            }
        }
}

void axiom_units(Suite& s) {
    const Site& site = s.site_;
    for (auto w : s.all()) {
        bool nt = !s.id(w);
        for (const auto& a : s.gens(w)) {
            if (!s.equality(
                    nt, [&] { return Pair{product(site, a, unit(site, s.tgt(w))), a}; },
                    [&] { return s.gen(a) + " . 1"; }))
                return;
            if (!s.equality(
                    nt, [&] { return Pair{product(site, unit(site, s.src(w)), a), a}; },
                    [&] { return "1 . " + s.gen(a); }))
                return;
        }
        if (!s.equality(
                nt, [&] { return Pair{pullback(site, w, unit(site, s.tgt(w))), unit(site, s.src(w))}; },
                [&] { return site.name(w) + "^* 1"; }))
            return;
    }
}

void axiom_comm(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.into(s.tgt(f))) {
            if (!site.try_pull_square(f, g)) {
                s.skip("no square over (" + s.names({f, g}) + ")");
                continue;
            }
            const auto &A = s.gens(f), &B = s.gens(g);
            bool nt = !(s.id(f) && s.id(g));
            bool go = true;
            sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                const auto &a = A[i[0]], &b = B[i[1]];
                return go = s.equality(
                           nt,
                           [&] {
                               return Pair{product(site, pullback(site, g, a), b),
                                           product(site, pullback(site, f, b), a)};
                           },
                           [&] { return "commutativity " + s.gen(a) + ", " + s.gen(b); });
            });
            if (!go) return;
        }
}

// --- over a base -------------------------------------------------------------------------

template <class F>
void for_bases(Suite& s, F&& fn) {
    for (std::uint32_t i = 0; i < s.site_.object_count(); ++i)
        if (!fn(ObjectId{i})) return;
}

void over_d1(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto pz : s.into(base))
            for (auto g : s.into(s.src(pz))) {
                if (!s.proper(g)) continue;
                auto pzg = s.compose(pz, g);
                if (!pzg) continue;
                for (auto f : s.into(s.src(g))) {
                    if (!s.proper(f)) continue;
                    auto gf = s.compose(g, f);
                    auto arrow = gf ? s.compose(pz, *gf) : std::nullopt;
                    if (!arrow) continue;
                    bool nt = !(s.id(f) && s.id(g));
                    for (const auto& a : s.gens(*arrow))
                        if (!s.equality(
                                nt,
                                [&] {
                                    return Pair{pushforward(site, *gf, pz, a),
                                                pushforward(site, g, pz, pushforward(site, f, *pzg, a))};
                                },
                                [&] { return "(" + s.names({g, f}) + ")_* " + s.gen(a); }))
                            return false;
                }
            }
        return true;
    });
}

void over_d2(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto py : s.into(base))
            for (auto f : s.into(s.src(py))) {
                if (!s.smooth(f)) continue;
                int shift = *site.morphism(f).rel_dim;
                for (const auto& a : s.gens(py)) {
                    int deg = a.terms().begin()->first.degree;
                    auto d = [&] { return site.name(f) + "^* " + s.gen(a); };
                    if (!s.degree(deg - shift, [&] { return smooth_pullback(site, f, a); }, d)) return false;
                    if (s.id(f) && !s.equality(false, [&] { return Pair{smooth_pullback(site, f, a), a}; }, d))
                        return false;
                }
            }
        return true;
    });
}

void over_d3(Suite& s) {
    const Site& site = s.site_;
    for (auto px : s.all())
        for (auto l : site.bundle_classes_on(s.src(px)))
            for (const auto& a : s.gens(px)) {
                int deg = a.terms().begin()->first.degree;
                if (!s.degree(deg + 1, [&] { return chern(site, l, a); },
                              [&] { return "c1(" + site.name(l) + ") " + s.gen(a); }))
                    return;
            }
}

void over_d4(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        const auto& arrows = s.into(base);
        Element one = unit(site, base);
        for (auto px : arrows) {
            for (const auto& a : s.gens(px)) {
                if (!s.equality(
                        !s.id(px), [&] { return Pair{external_product(site, one, a), a}; },
                        [&] { return "1 x " + s.gen(a); }))
                    return false;
                if (!s.equality(
                        !s.id(px), [&] { return Pair{external_product(site, a, one), a}; },
                        [&] { return s.gen(a) + " x 1"; }))
                    return false;
            }
            for (auto py : arrows) {
                const auto &A = s.gens(px), &B = s.gens(py);
                bool go = true;
                sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                    const auto &a = A[i[0]], &b = B[i[1]];
                    return go = s.equality(
                               !(s.id(px) && s.id(py)),
                               [&] { return Pair{external_product(site, a, b), external_product(site, b, a)}; },
                               [&] { return s.gen(a) + " x " + s.gen(b) + " vs swapped"; });
                });
                if (!go) return false;
                for (auto pz : arrows) {
                    const auto& C = s.gens(pz);
                    sample_tuples({A.size(), B.size(), C.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                        const auto &a = A[i[0]], &b = B[i[1]], &c = C[i[2]];
                        return go = s.equality(
                                   !(s.id(px) && s.id(py) && s.id(pz)),
                                   [&] {
                                       return Pair{external_product(site, external_product(site, a, b), c),
                                                   external_product(site, a, external_product(site, b, c))};
                                   },
                                   [&] { return "(" + s.gen(a) + " x " + s.gen(b) + ") x " + s.gen(c); });
                    });
                    if (!go) return false;
                }
            }
        }
        return true;
    });
}

void over_a1(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto pz : s.into(base))
            for (auto g : s.into(s.src(pz))) {
                if (!s.smooth(g)) continue;
                for (auto f : s.into(s.src(g))) {
                    if (!s.smooth(f)) continue;
                    auto gf = s.compose(g, f);
                    if (!gf) continue;
                    bool nt = !(s.id(f) && s.id(g));
                    for (const auto& a : s.gens(pz))
                        if (!s.equality(
                                nt,
                                [&] {
                                    return Pair{smooth_pullback(site, *gf, a),
                                                smooth_pullback(site, f, smooth_pullback(site, g, a))};
                                },
                                [&] { return "(" + s.names({g, f}) + ")^* " + s.gen(a); }))
                            return false;
                }
            }
        return true;
    });
}

void over_a2(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto pz : s.into(base))
            for (auto f : s.into(s.src(pz))) {
                if (!s.proper(f)) continue;
                auto px = s.compose(pz, f);
                if (!px) continue;
                for (auto g : s.into(s.src(pz))) {
                    if (!s.smooth(g)) continue;
                    auto py = s.compose(pz, g);
                    if (!py) continue;
                    bool nt = !(s.id(f) && s.id(g));
                    for (const auto& a : s.gens(*px))
                        if (!s.equality(
                                nt,
                                [&] {
                                    auto sq = site.pull_square(f, g);
                                    return Pair{smooth_pullback(site, g, pushforward(site, f, pz, a)),
                                                pushforward(site, sq.f_prime, *py,
                                                            smooth_pullback(site, sq.g_prime, a))};
                                },
                                [&] { return site.name(g) + "^* " + site.name(f) + "_* " + s.gen(a); }))
                            return false;
                }
            }
        return true;
    });
}

void over_a3(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto py : s.into(base))
            for (auto f : s.into(s.src(py))) {
                if (!s.proper(f)) continue;
                auto px = s.compose(py, f);
                if (!px) continue;
                for (auto m : site.bundle_classes_on(s.src(py)))
                    for (const auto& a : s.gens(*px))
                        if (!s.equality(
                                !s.id(f),
                                [&] {
                                    return Pair{pushforward(site, f, py, chern(site, site.pullback(f, m), a)),
                                                chern(site, m, pushforward(site, f, py, a))};
                                },
                                [&] { return site.name(f) + "_* c1(f^*" + site.name(m) + ") " + s.gen(a); }))
                            return false;
            }
        return true;
    });
}

void over_a4(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto py : s.into(base))
            for (auto f : s.into(s.src(py))) {
                if (!s.smooth(f)) continue;
                for (auto m : site.bundle_classes_on(s.src(py)))
                    for (const auto& a : s.gens(py))
                        if (!s.equality(
                                !s.id(f),
                                [&] {
                                    return Pair{chern(site, site.pullback(f, m), smooth_pullback(site, f, a)),
                                                smooth_pullback(site, f, chern(site, m, a))};
                                },
                                [&] { return "c1(f^*" + site.name(m) + ") " + site.name(f) + "^* " + s.gen(a); }))
                            return false;
            }
        return true;
    });
}

void over_a5(Suite& s) {
    const Site& site = s.site_;
    for (auto px : s.all()) {
        std::vector<BundleId> ls;
        for (std::uint32_t i = 0; i < site.bundle_count(); ++i)
            if (site.bundle(BundleId{i}).base == s.src(px)) ls.push_back(BundleId{i});
        for (std::size_t i = 0; i < ls.size(); ++i)
            for (std::size_t j = i; j < ls.size(); ++j)
                for (const auto& a : s.gens(px)) {
                    auto l = ls[i], l2 = ls[j];
                    if (!s.equality(
                            i != j,
                            [&] { return Pair{chern(site, l, chern(site, l2, a)), chern(site, l2, chern(site, l, a))}; },
                            [&] { return "c1(" + site.name(l) + ") c1(" + site.name(l2) + ") " + s.gen(a); }))
                        return;
                    if (i != j && site.isomorphic(l, l2) &&
                        !s.equality(
                            true, [&] { return Pair{chern(site, l, a), chern(site, l2, a)}; },
                            [&] { return "c1(" + site.name(l) + ") vs isomorphic " + site.name(l2); }))
                        return;
                }
    }
}

/// Over-category A6/A7 diagrams: f: X1 -> X2, g: Y1 -> Y2 over a common base.
template <class F>
void product_maps(Suite& s, bool want_proper, F&& fn) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto px2 : s.into(base))
            for (auto py2 : s.into(base))
                for (auto f : s.into(s.src(px2))) {
                    if (want_proper ? !s.proper(f) : !s.smooth(f)) continue;
                    for (auto g : s.into(s.src(py2))) {
                        if (want_proper ? !s.proper(g) : !s.smooth(g)) continue;
                        auto px1 = s.compose(px2, f);
                        auto py1 = s.compose(py2, g);
                        if (!px1 || !py1) continue;
                        auto s1 = site.try_pull_square(*px1, *py1);
                        auto s2 = site.try_pull_square(px2, py2);
                        if (!s1 || !s2) {
                            s.skip("no square over the base for " + s.names({f, g}));
                            continue;
                        }
                        auto m = s.product_map(*s1, *s2, f, g);
                        if (!m) {
                            s.skip("no declared " + s.names({f}) + " x_S " + s.names({g}));
                            continue;
                        }
                        if (!fn(f, g, *px1, *py1, px2, py2, *m, *s2)) return false;
                    }
                }
        return true;
    });
}

void over_a6(Suite& s) {
    const Site& site = s.site_;
    product_maps(s, true, [&](MorphismId f, MorphismId g, MorphismId px1, MorphismId py1, MorphismId px2,
                             MorphismId py2, MorphismId m, const FiberSquare& s2) {
        MorphismId pw2 = site.compose(py2, s2.f_prime);
        const auto &A = s.gens(px1), &B = s.gens(py1);
        bool go = true;
        sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
            const auto &a = A[i[0]], &b = B[i[1]];
            return go = s.equality(
                       !(s.id(f) && s.id(g)),
                       [&] {
                           return Pair{external_product(site, pushforward(site, f, px2, a),
                                                        pushforward(site, g, py2, b)),
                                       pushforward(site, m, pw2, external_product(site, a, b))};
                       },
                       [&] { return s.names({f}) + "_* x " + s.names({g}) + "_* on " + s.gen(a) + ", " + s.gen(b); });
        });
        return go;
    });
}

void over_a7(Suite& s) {
    const Site& site = s.site_;
    product_maps(s, false, [&](MorphismId f, MorphismId g, MorphismId, MorphismId, MorphismId px2, MorphismId py2,
                              MorphismId m, const FiberSquare&) {
        const auto &A = s.gens(px2), &B = s.gens(py2);
        bool go = true;
        sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
            const auto &a = A[i[0]], &b = B[i[1]];
            return go = s.equality(
                       !(s.id(f) && s.id(g)),
                       [&] {
                           return Pair{smooth_pullback(site, m, external_product(site, a, b)),
                                       external_product(site, smooth_pullback(site, f, a),
                                                        smooth_pullback(site, g, b))};
                       },
                       [&] { return "(" + s.names({f}) + " x " + s.names({g}) + ")^* on " + s.gen(a) + ", " + s.gen(b); });
        });
        return go;
    });
}

void over_a8(Suite& s) {
    const Site& site = s.site_;
    for_bases(s, [&](ObjectId base) {
        for (auto px : s.into(base))
            for (auto py : s.into(base)) {
                auto sq = site.try_pull_square(px, py);
                if (!sq) {
                    s.skip("no square over (" + s.names({px, py}) + ")");
                    continue;
                }
                for (auto l : site.bundle_classes_on(s.src(px))) {
                    const auto &A = s.gens(px), &B = s.gens(py);
                    bool go = true;
                    sample_tuples({A.size(), B.size()}, s.options_.per_diagram, [&](const std::vector<std::size_t>& i) {
                        const auto &a = A[i[0]], &b = B[i[1]];
                        return go = s.equality(
                                   !(s.id(px) && s.id(py)),
                                   [&] {
                                       return Pair{external_product(site, chern(site, l, a), b),
                                                   chern(site, site.pullback(sq->g_prime, l),
                                                         external_product(site, a, b))};
                                   },
                                   [&] { return "c1(" + site.name(l) + ") " + s.gen(a) + " x " + s.gen(b); });
                    });
                    if (!go) return false;
                }
            }
        return true;
    });
}

// --- grading --------------------------------------------------------------------------------

int degree_of(const Element& e) { return e.terms().begin()->first.degree; }

void grade_product(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.from(s.tgt(f)))
            for (const auto& a : s.gens(f))
                for (const auto& b : s.gens(g))
                    if (!s.degree(degree_of(a) + degree_of(b), [&] { return product(site, a, b); },
                                  [&] { return s.gen(a) + " . " + s.gen(b); }))
                        return;
}

void grade_pushforward(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all()) {
        if (!s.proper(f)) continue;
        for (auto g : s.from(s.tgt(f))) {
            auto gf = s.compose(g, f);
            if (!gf) continue;
            for (const auto& a : s.gens(*gf))
                if (!s.degree(degree_of(a), [&] { return pushforward(site, f, g, a); },
                              [&] { return site.name(f) + "_* " + s.gen(a); }))
                    return;
        }
    }
}

void grade_pullback(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto g : s.into(s.tgt(f)))
            for (const auto& a : s.gens(f))
                if (!s.degree(degree_of(a), [&] { return pullback(site, g, a); },
                              [&] { return site.name(g) + "^* " + s.gen(a); }))
                    return;
}

void grade_chern(Suite& s) {
    const Site& site = s.site_;
    for (auto f : s.all())
        for (auto l : site.bundle_classes_on(s.src(f)))
            for (const auto& a : s.gens(f))
                if (!s.degree(degree_of(a) + 1, [&] { return chern(site, l, a); },
                              [&] { return "c1(" + site.name(l) + ") " + s.gen(a); }))
                    return;
}

void grade_smooth_pullback(Suite& s) {
    const Site& site = s.site_;
    for (auto py : s.all())
        for (auto f : s.into(s.src(py))) {
            if (!s.smooth(f)) continue;
            for (const auto& a : s.gens(py))
                if (!s.degree(degree_of(a) - *site.morphism(f).rel_dim, [&] { return smooth_pullback(site, f, a); },
                              [&] { return site.name(f) + "^* " + s.gen(a); }))
                    return;
        }
}

}  // namespace

std::vector<AxiomReport> run_axiom_suite(const Site& site, const AxiomSuiteOptions& options) {
    using Fn = void (*)(Suite&);
    const std::vector<std::pair<std::string, Fn>> table = {
        {"A1", axiom_a1},         {"A2", axiom_a2},
        {"A3", axiom_a3},         {"A12", axiom_a12},
        {"A13", axiom_a13},       {"A23", axiom_a23},
        {"A123", axiom_a123},     {"Units", axiom_units},
        {"Comm", axiom_comm},     {"S:D1", over_d1},
        {"S:D2", over_d2},        {"S:D3", over_d3},
        {"S:D4", over_d4},        {"S:A1", over_a1},
        {"S:A2", over_a2},        {"S:A3", over_a3},
        {"S:A4", over_a4},        {"S:A5", over_a5},
        {"S:A6", over_a6},        {"S:A7", over_a7},
        {"S:A8", over_a8},        {"grade:product", grade_product},
        {"grade:pushforward", grade_pushforward}, {"grade:pullback", grade_pullback},
        {"grade:chern", grade_chern},             {"grade:smooth_pullback", grade_smooth_pullback},
    };
    for (const auto& id : options.only)
        if (std::none_of(table.begin(), table.end(), [&](const auto& e) { return e.first == id; }))
            throw Error("UnknownAxiom", "unknown axiom id '" + id + "'");
    Suite suite(site, options);
    std::vector<AxiomReport> out;
    for (const auto& [id, fn] : table) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
            continue;
        suite.begin(id);
        fn(suite);
        out.push_back(suite.end());
    }
    return out;
}

// --- cap product and duality ------------------------------------------------------------------

std::vector<WellDefinedReport> check_operations(const Universe& source, const OperationCheckOptions& options) {
    using K = OperationDescriptor::Kind;
    const Site& site = source.site();
    const MorphismId arrow = source.arrow();
    const Morphism& am = site.morphism(arrow);
    std::vector<OperationDescriptor> ops;
    std::vector<std::unique_ptr<Universe>> others;

    for (MorphismId f : site.morphisms_into(am.source)) {
        if (!site.morphism(f).smooth || site.is_identity(f)) continue;
        if (!site.try_compose(arrow, f)) continue;
        OperationDescriptor op{K::SmoothPullback};
        op.map = f;
        ops.push_back(op);
    }
    for (MorphismId f : site.morphisms_from(am.source)) {
        if (!site.morphism(f).proper || site.is_identity(f)) continue;
        for (MorphismId g : site.morphisms_between(site.morphism(f).target, am.target)) {
            auto k = site.try_compose(g, f);
            if (!k || *k != arrow) continue;
            OperationDescriptor op{K::Pushforward};
            op.map = f;
            op.pushed_over = g;
            ops.push_back(op);
        }
    }
    for (BundleId l : site.bundle_classes_on(am.source)) {
        OperationDescriptor op{K::Chern};
        op.bundle = l;
        ops.push_back(op);
    }
    for (MorphismId g : site.morphisms_into(am.target)) {
        auto other = std::make_unique<Universe>(site, g, 1);
        if (other->cycles().empty()) continue;
        for (K kind : {K::ExternalLeft, K::ExternalRight}) {
            OperationDescriptor op{kind};
            op.other = other.get();
            op.other_cap = 1;
            ops.push_back(op);
        }
        others.push_back(std::move(other));
    }

    std::vector<Stage> stages{Stage::Dim};
    if (options.upto != Stage::Dim) stages.push_back(Stage::Sect);
    std::map<Stage, RelationSubgroup> relations;
    relations.emplace(Stage::Dim, enumerate_rdim(source));
    if (stages.size() > 1) relations.emplace(Stage::Sect, enumerate_rsect(source));

    // targets keyed by (arrow, rmax, stage); universes must outlive their presentations
    std::map<std::tuple<std::uint32_t, std::size_t, int>, std::pair<std::unique_ptr<Universe>, QuotientPresentation>> targets;
    auto target_for = [&](MorphismId t, std::size_t rmax, Stage st) -> const QuotientPresentation& {
        auto key = std::make_tuple(t.value, rmax, static_cast<int>(st));
        auto it = targets.find(key);
        if (it == targets.end()) {
            auto u = std::make_unique<Universe>(site, t, rmax);
            QuotientPresentation q = quotient(*u, StageSet::upto(st), options.quotient);
            it = targets.emplace(key, std::make_pair(std::move(u), std::move(q))).first;
        }
        return it->second.second;
    };

    std::vector<WellDefinedReport> out;
    for (const auto& op : ops) {
        std::size_t extra = 0;
        if (op.kind == K::Chern) extra = 1;
        if (op.kind == K::ExternalLeft || op.kind == K::ExternalRight) extra = op.other_cap;
        for (Stage st : stages) {
            const RelationSubgroup& rel = relations.at(st);
            try {
                MorphismId t = operation_target_arrow(site, arrow, op);
                out.push_back(check_welldefined(rel, target_for(t, source.rmax() + extra, st), op));
            } catch (const MissingDeclaration& e) {
                WellDefinedReport r;
                r.operation = op.label(site);
                r.stage = st;
                r.skipped = rel.size();
                r.skipped_reasons.push_back(e.what());
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

Element cap_product(const Site& site, const Element& alpha, const Element& beta) {
    Element out(beta.arrow());
    if (alpha.is_zero() || beta.is_zero()) return out;
    const auto& am = site.morphism(alpha.arrow());
    if (!am.identity) throw ArrowMismatch("cap product: first factor must be over an identity");
    if (site.morphism(beta.arrow()).source != am.source)
        throw ArrowMismatch("cap product: factors live over different objects");
    for (const auto& [a, n] : alpha.terms())
        for (const auto& [b, m] : beta.terms()) {
            auto sq = site.pull_square(a.structure, b.structure);
            std::vector<BundleId> ls;
            for (auto l : a.bundles) ls.push_back(site.pullback(sq.g_prime, l));
            for (auto l : b.bundles) ls.push_back(site.pullback(sq.f_prime, l));
            out.add_term(make_cycle(site, site.compose(a.structure, sq.g_prime), beta.arrow(), std::move(ls)), n * m);
        }
    return out;
}

MorphismId point_arrow(const Site& site, ObjectId x, ObjectId point) {
    auto ms = site.morphisms_between(x, point);
    if (ms.empty()) throw MissingDeclaration("no morphism " + site.name(x) + " -> " + site.name(point));
    return ms.front();
}

Element duality_D(const Site& site, const Element& alpha, ObjectId point) {
    ObjectId x = site.morphism(alpha.arrow()).source;
    if (!site.object(x).smooth) throw NotSmooth("D needs a smooth object; " + site.name(x) + " is not smooth");
    return cap_product(site, alpha, orientation(site, point_arrow(site, x, point)));
}

Element duality_D_pi(const Site& site, MorphismId pi, const Element& alpha, ObjectId point) {
    ObjectId x = site.morphism(pi).target;
    MorphismId px = point_arrow(site, x, point);
    return cap_product(site, alpha, Element(make_cycle(site, pi, px, {})));
}

std::string order_name(Order o) {
    switch (o) {
        case Order::Leq: return "<=";
        case Order::Geq: return ">=";
        case Order::BoundedIncomparable: return "incomparable-with-declared-bound";
        case Order::Incomparable: return "incomparable";
    }
    return "?";
}

ResolutionSystem ResolutionSystem::of(const Site& site, ObjectId x) {
    ResolutionSystem sys{x, {}};
    for (const auto& r : site.resolutions())
        if (site.morphism(r.map).target == x) sys.resolutions.push_back(r.map);
    if (sys.resolutions.empty() && site.object(x).smooth) sys.resolutions.push_back(site.identity(x));
    return sys;
}

std::vector<std::string> ResolutionSystem::validate(const Site& site) const {
    std::vector<std::string> out;
    for (auto p : resolutions)
        if (site.refinements(p, p).empty()) out.push_back(site.name(p) + " is not <= itself");
    for (auto a : resolutions)
        for (auto b : resolutions)
            for (auto c : resolutions)
                for (auto mab : site.refinements(a, b))
                    for (auto mbc : site.refinements(b, c)) {
                        auto mac = site.try_compose(mab, mbc);
                        if (!mac || site.try_compose(a, *mac) != c)
                            out.push_back(site.name(a) + " <= " + site.name(b) + " <= " + site.name(c) +
                                          " without a composite refinement");
                    }
    return out;
}

Order resolution_compare(const Site& site, const ResolutionSystem& sys, MorphismId p1, MorphismId p2) {
    if (!site.refinements(p1, p2).empty()) return Order::Leq;
    if (!site.refinements(p2, p1).empty()) return Order::Geq;
    for (auto p3 : sys.resolutions)
        if (!site.refinements(p1, p3).empty() && !site.refinements(p2, p3).empty()) return Order::BoundedIncomparable;
    return Order::Incomparable;
}

TransitionResult transition(const Site& site, MorphismId p1, MorphismId p2, const Element& x) {
    auto refinements = site.refinements(p1, p2);
    if (refinements.empty())
        throw MissingDeclaration("no declared refinement of " + site.name(p1) + " by " + site.name(p2));
    ObjectId xt1 = site.morphism(p1).source;
    TransitionResult out{Element(x.arrow()), {}};
    for (const auto& [c, n] : x.terms()) {
        std::vector<Cycle> images;
        for (auto lift : site.morphisms_between(c.source, xt1)) {
            auto u = site.try_compose(p1, lift);
            if (!u || *u != c.structure) continue;
            for (auto m : refinements) {
                auto sq = site.pull_square(lift, m);
                std::vector<BundleId> ls;
                for (auto l : c.bundles) ls.push_back(site.pullback(sq.g_prime, l));
                Cycle img = make_cycle(site, site.compose(c.structure, sq.g_prime), c.over, std::move(ls));
                if (std::find(images.begin(), images.end(), img) == images.end()) images.push_back(img);
            }
        }
        if (images.empty())
            throw MissingDeclaration(format(site, c) + " has no declared lift through " + site.name(p1));
        if (images.size() > 1) {
            std::string d = format(site, c) + " maps to";
            for (const auto& img : images) d += " " + format(site, img);
            out.disagreements.push_back(d);
        }
        out.value.add_term(images.front(), n);
    }
    return out;
}

DualityReport check_duality_smooth(const Universe& source, ObjectId point) {
    const Site& site = source.site();
    DualityReport r;
    ObjectId x = site.morphism(source.arrow()).source;
    for (const auto& c : source.cycles()) {
        ++r.checked;
        try {
            Element got = duality_D(site, Element(c), point);
            Element want(make_cycle(site, c.structure, point_arrow(site, x, point), c.bundles));
            if (!(got == want)) r.violations.push_back(format(site, c) + ": D gives " + format(site, got));
        } catch (const Error& e) {
            r.violations.push_back(format(site, c) + ": " + e.what());
        }
    }
    return r;
}

DualityReport check_transitions(const Universe& source, const ResolutionSystem& sys, ObjectId point) {
    const Site& site = source.site();
    DualityReport r;
    for (auto p1 : sys.resolutions)
        for (auto p2 : sys.resolutions) {
            if (resolution_compare(site, sys, p1, p2) != Order::Leq) continue;
            ++r.pairs;
            for (const auto& c : source.cycles()) {
                ++r.checked;
                try {
                    Element a(c);
                    auto t = transition(site, p1, p2, duality_D_pi(site, p1, a, point));
                    Element want = duality_D_pi(site, p2, a, point);
                    for (const auto& d : t.disagreements)
                        r.violations.push_back(site.name(p1) + " <= " + site.name(p2) + ": " + d);
                    if (!(t.value == want))
                        r.violations.push_back(site.name(p1) + " <= " + site.name(p2) + " on " + format(site, c) +
                                               ": " + format(site, t.value) + " != " + format(site, want));
                } catch (const Error& e) {
                    r.violations.push_back(site.name(p1) + " <= " + site.name(p2) + " on " + format(site, c) + ": " +
                                           e.what());
                }
            }
        }
    return r;
}

std::map<int, std::size_t> colimit_ranks(const Universe& source, const ResolutionSystem& sys,
                                         const QuotientPresentation& target) {
    const Site& site = source.site();
    const ObjectId point = site.morphism(target.universe().arrow()).target;
    std::map<int, std::vector<const Cycle*>> by_degree;
    for (const auto& c : source.cycles()) by_degree[c.degree].push_back(&c);
    const std::size_t k = sys.resolutions.size();

    std::map<int, std::size_t> out;
    for (const auto& [deg, gens] : by_degree) {
        const std::size_t n = gens.size();
        HermiteLattice colimit(k * n);
        for (std::size_t p = 0; p < k; ++p) {
            // kernel of a -> [D_p(a)]: rows [image | e_a] together with the relation rows
            std::vector<QuotientPresentation::Vector> images;
            std::map<int, std::size_t> offset;
            std::size_t width = 0;
            for (const auto* c : gens) {
                images.push_back(target.coordinates(duality_D_pi(site, sys.resolutions[p], Element(*c), point)));
                for (const auto& [t, row] : images.back())
                    if (!offset.count(t)) {
                        offset[t] = width;
                        width += target.pieces().count(t) ? target.pieces().at(t).coordinates : 0;
                    }
            }
            HermiteLattice lat(width + n);
            for (const auto& [t, off] : offset) {
                if (!target.pieces().count(t)) continue;
                for (const auto& b : target.pieces().at(t).lattice.basis()) {
                    std::map<std::size_t, Integer> row;
                    for (const auto& [i, x] : b.entries) row[off + i] = x;
                    lat.add(row);
                }
            }
            for (std::size_t a = 0; a < n; ++a) {
                std::map<std::size_t, Integer> row;
                for (const auto& [t, r] : images[a])
                    for (const auto& [i, x] : r) row[offset.at(t) + i] = x;
                row[width + a] = 1;
                lat.add(row);
            }
            for (const auto& b : lat.basis()) {
                if (b.entries.front().first < width) continue;
                std::map<std::size_t, Integer> row;
                for (const auto& [i, x] : b.entries) row[p * n + (i - width)] = x;
                colimit.add(row);
            }
        }
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = 0; q < k; ++q) {
                if (p == q || resolution_compare(site, sys, sys.resolutions[p], sys.resolutions[q]) != Order::Leq)
                    continue;
                for (std::size_t a = 0; a < n; ++a) colimit.add(std::map<std::size_t, Integer>{{p * n + a, 1}, {q * n + a, -1}});
            }
        out[deg] = colimit.quotient_rank();
    }
    return out;
}

}  // namespace cobord
