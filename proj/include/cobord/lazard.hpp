#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cobord/cycles.hpp"
#include "cobord/integer.hpp"
#include "cobord/lattice.hpp"

namespace cobord {

/// Exponent vector over the generators a_ij of a truncation.
using Monomial = std::vector<int>;

/// Polynomial in the a_ij with integer coefficients.
class LazardElement {
public:
    LazardElement() = default;
    static LazardElement constant(const Integer& n, std::size_t generators);
    static LazardElement monomial(Monomial m, const Integer& n = 1);

    const std::map<Monomial, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Monomial& m, const Integer& n);

    LazardElement& operator+=(const LazardElement& o);
    LazardElement& operator-=(const LazardElement& o);
    LazardElement& operator*=(const Integer& n);
    friend LazardElement operator+(LazardElement a, const LazardElement& b) { return a += b; }
    friend LazardElement operator-(LazardElement a, const LazardElement& b) { return a -= b; }
    friend LazardElement operator*(const Integer& n, LazardElement a) { return a *= n; }
    /// Unreduced polynomial product.
    friend LazardElement operator*(const LazardElement& a, const LazardElement& b);
    friend bool operator==(const LazardElement&, const LazardElement&) = default;

private:
    std::map<Monomial, Integer> terms_;
};

/// The Lazard ring truncated at series degree N: generated by a_ij
/// (i, j >= 1, i + j <= N) of degree i + j - 1, modulo the ideal forced by
/// commutativity and associativity, kept in degrees 0..N-1. Each graded
/// piece is an explicit lattice quotient of the monomials of that degree.
class LazardRing {
public:
    explicit LazardRing(int bound);

    int bound() const { return bound_; }
    std::size_t generator_count() const { return generators_.size(); }
    const std::vector<std::pair<int, int>>& generators() const { return generators_; }
    int degree(const Monomial& m) const;
    int max_degree() const { return bound_ - 1; }

    /// Monomials of one degree, in column order.
    const std::vector<Monomial>& monomials(int d) const { return monomials_.at(d); }
    std::size_t column(const Monomial& m) const;
    const HermiteLattice& relations(int d) const { return relations_.at(d); }
    std::size_t rank(int d) const { return relations_.at(d).quotient_rank(); }
    std::vector<Integer> torsion(int d) const { return relations_.at(d).torsion(); }
    /// Monomials that are not pivots of the relation lattice.
    std::vector<Monomial> standard_monomials(int d) const;

    LazardElement one() const { return LazardElement::constant(1, generator_count()); }
    /// The class of a_ij (i, j >= 1, i + j <= N), reduced.
    LazardElement generator(int i, int j) const;
    /// Canonical representative; components above max_degree() are dropped.
    LazardElement reduce(const LazardElement& x) const;
    LazardElement multiply(const LazardElement& a, const LazardElement& b) const;
    bool equal(const LazardElement& a, const LazardElement& b) const { return reduce(a - b).is_zero(); }

    /// Coordinates of a homogeneous-by-degree split.
    std::map<int, std::map<std::size_t, Integer>> coordinates(const LazardElement& x) const;
    LazardElement from_coordinates(int d, const std::map<std::size_t, Integer>& v) const;

    std::string format(const LazardElement& x) const;
    std::string format(const Monomial& m) const;

private:
    int bound_;
    std::vector<std::pair<int, int>> generators_;
    std::vector<std::vector<Monomial>> monomials_;
    std::vector<std::map<Monomial, std::size_t>> columns_;
    std::vector<HermiteLattice> relations_;
};

/// Truncated power series in n variables with Lazard coefficients (total degree <= bound).
class Series {
public:
    Series(std::size_t vars, int bound) : vars_(vars), bound_(bound) {}
    static Series variable(std::size_t vars, int bound, std::size_t index, std::size_t generators);

    std::size_t vars() const { return vars_; }
    int bound() const { return bound_; }
    const std::map<std::vector<int>, LazardElement>& terms() const { return terms_; }
    LazardElement coefficient(const std::vector<int>& e) const;
    void add_term(const std::vector<int>& e, const LazardElement& c);
    bool is_zero() const { return terms_.empty(); }

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    /// Product truncated at the bound; coefficients multiplied by `mul`.
    Series multiply(const Series& o, const std::function<LazardElement(const LazardElement&, const LazardElement&)>& mul) const;
    Series scaled(const LazardElement& c,
                  const std::function<LazardElement(const LazardElement&, const LazardElement&)>& mul) const;
    Series reduced(const LazardRing& ring) const;

private:
    std::size_t vars_;
    int bound_;
    std::map<std::vector<int>, LazardElement> terms_;
};

/// A two-variable law F(u, v) = sum c_ij u^i v^j over a Lazard truncation.
struct FormalGroupLaw {
    std::shared_ptr<const LazardRing> ring;
    std::map<std::pair<int, int>, LazardElement> coefficients;  // (i, j) -> c_ij, zero entries omitted

    int bound() const { return ring->bound(); }
    LazardElement coefficient(int i, int j) const;
    /// F(x, y) for series x, y without constant term.
    Series substitute(const Series& x, const Series& y) const;
};

/// Universal law through series degree N, coefficients reduced modulo the relations.
FormalGroupLaw build_universal_fgl(int bound);

struct FglResidual {
    bool unit = true;
    bool commutative = true;
    bool associative = true;
    std::vector<std::string> nonzero_terms;
    bool ok() const { return unit && commutative && associative; }
};

/// Unit, commutativity and associativity residuals through the bound, after reduction.
FglResidual series_compose_check(const FormalGroupLaw& f);

/// Element of the free group on cycles over one arrow, with Lazard coefficients.
class LElement {
public:
    LElement() = default;
    explicit LElement(MorphismId arrow) : arrow_(arrow) {}
    static LElement from(const Element& e, std::size_t generators);

    MorphismId arrow() const { return arrow_; }
    const std::map<Cycle, LazardElement>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Cycle& c, const LazardElement& x);
    LElement& operator+=(const LElement& o);
    LElement& operator-=(const LElement& o);
    friend LElement operator-(LElement a, const LElement& b) { return a -= b; }
    friend bool operator==(const LElement&, const LElement&) = default;

private:
    MorphismId arrow_;
    std::map<Cycle, LazardElement> terms_;
};

std::string format(const Site& site, const LazardRing& ring, const LElement& e);

using Operator = std::function<Element(const Element&)>;

/// F(opL, opM)(target) = sum_{0 < i + j <= bound} c_ij opL^i opM^j (target).
/// Raises BoundTooSmall when a dropped term could survive the dimension
/// relations or when F is truncated below the needed degree.
LElement evaluate_fgl(const Site& site, const FormalGroupLaw& f, const Operator& op_l, const Operator& op_m,
                      const Element& target, int bound);

}  // namespace cobord
