#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cobord/error.hpp"
#include "cobord/integer.hpp"
#include "cobord/site.hpp"

namespace cobord {

/// Normalised cobordism cycle [V -h-> X ; L1..Lr] over an arrow f: X -> Y.
/// Bundles are iso-class representatives sorted by class id. Construct with make_cycle.
struct Cycle {
    MorphismId over;
    MorphismId structure;
    std::vector<BundleId> bundles;
    ObjectId source;
    int degree = 0;

    std::size_t rank() const { return bundles.size(); }
    friend bool operator==(const Cycle& a, const Cycle& b) {
        return a.over == b.over && a.structure == b.structure && a.bundles == b.bundles;
    }
    friend std::strong_ordering operator<=>(const Cycle& a, const Cycle& b) {
        if (auto c = a.over <=> b.over; c != 0) return c;
        if (auto c = a.structure <=> b.structure; c != 0) return c;
        return a.bundles <=> b.bundles;
    }
};

/// Element of the free group on cycles over one arrow.
class Element {
public:
    Element() = default;
    explicit Element(MorphismId arrow) : arrow_(arrow) {}
    Element(const Cycle& c, Integer n = 1);

    MorphismId arrow() const { return arrow_; }
    const std::map<Cycle, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Integer coefficient(const Cycle& c) const;
    /// Degrees occurring among the terms.
    std::set<int> degrees() const;

    void add_term(const Cycle& c, const Integer& n);
    Element& operator+=(const Element& other);
    Element& operator-=(const Element& other);
    Element& operator*=(const Integer& n);
    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(const Integer& n, Element a) { return a *= n; }
    friend Element operator-(Element a) { return a *= -1; }
    friend bool operator==(const Element& a, const Element& b) {
        return a.terms_ == b.terms_ && (a.terms_.empty() || a.arrow_ == b.arrow_);
    }

private:
    MorphismId arrow_;
    std::map<Cycle, Integer> terms_;
};

/// Builds a normalised cycle; h must be proper with f . h declared smooth.
Cycle make_cycle(const Site& site, MorphismId h, MorphismId f, std::vector<BundleId> bundles);
Cycle make_cycle(const Site& site, ObjectId source, MorphismId h, MorphismId f, std::vector<BundleId> bundles);

/// [X -id-> X] over a smooth f, and the unit 1_X over id_X.
Element orientation(const Site& site, MorphismId f);
Element unit(const Site& site, ObjectId x);

/// alpha over f: X -> Y, beta over g: Y -> Z; result over g . f.
Element product(const Site& site, const Element& alpha, const Element& beta);
/// f: X -> Y proper, alpha over g . f; result over g.
Element pushforward(const Site& site, MorphismId f, MorphismId g, const Element& alpha);
/// alpha over f: X -> Y, g: Y' -> Y; result over the pulled-back arrow X' -> Y'.
Element pullback(const Site& site, MorphismId g, const Element& alpha);
/// First Chern class operator of a bundle L on X = source of alpha's arrow.
Element chern(const Site& site, BundleId l, const Element& alpha);
/// Appends a bundle living on the source V of every term (the operator c1(L) on V).
Element append_bundle(const Site& site, BundleId l, const Element& alpha);
/// alpha over X -> S, beta over Y -> S; result over X x_S Y -> S.
Element external_product(const Site& site, const Element& alpha, const Element& beta);
/// f: X -> Y smooth, alpha over pi_Y: Y -> S; result over pi_Y . f.
Element smooth_pullback(const Site& site, MorphismId f, const Element& alpha);

/// All cycles over `arrow` with at most `max_bundles` bundles, in cycle order.
std::vector<Cycle> enumerate_cycles(const Site& site, MorphismId arrow, std::size_t max_bundles);
/// Proper maps h into the source of `arrow` with arrow . h declared smooth.
std::vector<MorphismId> cycle_structures(const Site& site, MorphismId arrow);
/// Relative dimension of arrow . h for a cycle.
int structure_dim(const Site& site, const Cycle& c);

std::string format(const Site& site, const Cycle& c);
std::string format(const Site& site, const Element& e);

}  // namespace cobord
