#include "cobord/lazard.hpp"

#include <algorithm>
#include <numeric>

#include "cobord/error.hpp"

namespace cobord {

// --- LazardElement -------------------------------------------------------------

LazardElement LazardElement::constant(const Integer& n, std::size_t generators) {
    return monomial(Monomial(generators, 0), n);
}

LazardElement LazardElement::monomial(Monomial m, const Integer& n) {
    LazardElement x;
    x.add_term(m, n);
    return x;
}

void LazardElement::add_term(const Monomial& m, const Integer& n) {
    if (n == 0) return;
    auto [it, inserted] = terms_.emplace(m, n);
    if (!inserted) {
        it->second += n;
        if (it->second == 0) terms_.erase(it);
    }
}

LazardElement& LazardElement::operator+=(const LazardElement& o) {
    for (const auto& [m, n] : o.terms_) add_term(m, n);
    return *this;
}

LazardElement& LazardElement::operator-=(const LazardElement& o) {
    for (const auto& [m, n] : o.terms_) add_term(m, -n);
    return *this;
}

LazardElement& LazardElement::operator*=(const Integer& n) {
    if (n == 0) terms_.clear();
    for (auto& [m, c] : terms_) c *= n;
    return *this;
}

LazardElement operator*(const LazardElement& a, const LazardElement& b) {
    LazardElement out;
    for (const auto& [ma, na] : a.terms_)
        for (const auto& [mb, nb] : b.terms_) {
            Monomial m(ma.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
            out.add_term(m, na * nb);
        }
    return out;
}

// --- Series ----------------------------------------------------------------------

Series Series::variable(std::size_t vars, int bound, std::size_t index, std::size_t generators) {
    Series s(vars, bound);
    std::vector<int> e(vars, 0);
    e[index] = 1;
    s.add_term(e, LazardElement::constant(1, generators));
    return s;
}

LazardElement Series::coefficient(const std::vector<int>& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? LazardElement() : it->second;
}

void Series::add_term(const std::vector<int>& e, const LazardElement& c) {
    if (c.is_zero()) return;
    if (std::accumulate(e.begin(), e.end(), 0) > bound_) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Series& Series::operator+=(const Series& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Series& Series::operator-=(const Series& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, Integer(-1) * c);
    return *this;
}

Series Series::multiply(const Series& o,
                        const std::function<LazardElement(const LazardElement&, const LazardElement&)>& mul) const {
    Series out(vars_, std::min(bound_, o.bound_));
    for (const auto& [ea, ca] : terms_) {
        int da = std::accumulate(ea.begin(), ea.end(), 0);
        for (const auto& [eb, cb] : o.terms_) {
            int db = std::accumulate(eb.begin(), eb.end(), 0);
            if (da + db > out.bound_) continue;
            std::vector<int> e(vars_);
            for (std::size_t i = 0; i < vars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, mul(ca, cb));
        }
    }
    return out;
}

Series Series::scaled(const LazardElement& c,
                      const std::function<LazardElement(const LazardElement&, const LazardElement&)>& mul) const {
    Series out(vars_, bound_);
    for (const auto& [e, x] : terms_) out.add_term(e, mul(c, x));
    return out;
}

Series Series::reduced(const LazardRing& ring) const {
    Series out(vars_, bound_);
    for (const auto& [e, x] : terms_) out.add_term(e, ring.reduce(x));
    return out;
}

namespace {

using Mul = std::function<LazardElement(const LazardElement&, const LazardElement&)>;

Series substitute_with(const std::map<std::pair<int, int>, LazardElement>& coeffs, int bound, const Series& x,
                       const Series& y, const Mul& mul, std::size_t generators) {
    std::vector<Series> xp, yp;
    Series one(x.vars(), bound);
    one.add_term(std::vector<int>(x.vars(), 0), LazardElement::constant(1, generators));
    xp.push_back(one);
    yp.push_back(one);
    for (int i = 1; i <= bound; ++i) {
        xp.push_back(xp.back().multiply(x, mul));
        yp.push_back(yp.back().multiply(y, mul));
    }
    Series out(x.vars(), bound);
    for (const auto& [ij, c] : coeffs) {
        auto [i, j] = ij;
        if (i + j > bound || c.is_zero()) continue;
        out += xp[i].multiply(yp[j], mul).scaled(c, mul);
    }
    return out;
}

void enumerate_monomials(const std::vector<int>& gdeg, std::size_t g, int remaining, Monomial& cur,
                         std::vector<Monomial>& out) {
    if (g == gdeg.size()) {
        if (remaining == 0) out.push_back(cur);
        return;
    }
    for (int e = 0; e * gdeg[g] <= remaining; ++e) {
        cur[g] = e;
        enumerate_monomials(gdeg, g + 1, remaining - e * gdeg[g], cur, out);
    }
    cur[g] = 0;
}

}  // namespace

// --- LazardRing --------------------------------------------------------------------

LazardRing::LazardRing(int bound) : bound_(bound) {
    if (bound < 1) throw BoundTooSmall("series degree bound must be at least 1");
    for (int s = 2; s <= bound; ++s)
        for (int i = 1; i < s; ++i) generators_.emplace_back(i, s - i);
    const std::size_t n = generators_.size();
    std::vector<int> gdeg;
    for (auto [i, j] : generators_) gdeg.push_back(i + j - 1);

    monomials_.resize(bound);
    columns_.resize(bound);
    for (int d = 0; d < bound; ++d) {
        Monomial cur(n, 0);
        enumerate_monomials(gdeg, 0, d, cur, monomials_[d]);
        // lexicographic on exponent vectors: later generators come first and are eliminated first
        std::sort(monomials_[d].begin(), monomials_[d].end());
        for (std::size_t c = 0; c < monomials_[d].size(); ++c) columns_[d][monomials_[d][c]] = c;
        relations_.emplace_back(monomials_[d].size());
    }

    // basic relations from the unreduced law
    std::vector<std::pair<int, LazardElement>> basic;
    std::map<std::pair<int, int>, LazardElement> coeffs;
    coeffs[{1, 0}] = LazardElement::constant(1, n);
    coeffs[{0, 1}] = LazardElement::constant(1, n);
    for (std::size_t g = 0; g < n; ++g) {
        Monomial m(n, 0);
        m[g] = 1;
        coeffs[generators_[g]] = LazardElement::monomial(m);
    }
    for (std::size_t g = 0; g < n; ++g) {
        auto [i, j] = generators_[g];
        if (i < j) basic.emplace_back(i + j - 1, coeffs[{i, j}] - coeffs[{j, i}]);
    }
    Mul plain = [](const LazardElement& a, const LazardElement& b) { return a * b; };
    Series u = Series::variable(3, bound, 0, n), v = Series::variable(3, bound, 1, n), w = Series::variable(3, bound, 2, n);
    Series left = substitute_with(coeffs, bound, substitute_with(coeffs, bound, u, v, plain, n), w, plain, n);
    Series right = substitute_with(coeffs, bound, u, substitute_with(coeffs, bound, v, w, plain, n), plain, n);
    left -= right;
    for (const auto& [e, c] : left.terms()) basic.emplace_back(std::accumulate(e.begin(), e.end(), 0) - 1, c);

    for (int d = 1; d < bound; ++d)
        for (const auto& [e, r] : basic) {
            if (e > d) continue;
            for (const auto& m : monomials_[d - e]) {
                auto prod = LazardElement::monomial(m) * r;
                std::map<std::size_t, Integer> row;
                for (const auto& [mm, c] : prod.terms()) row[columns_[d].at(mm)] += c;
                relations_[d].add(std::move(row));
            }
        }
}

int LazardRing::degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t g = 0; g < m.size(); ++g) d += m[g] * (generators_[g].first + generators_[g].second - 1);
    return d;
}

std::size_t LazardRing::column(const Monomial& m) const { return columns_.at(degree(m)).at(m); }

std::vector<Monomial> LazardRing::standard_monomials(int d) const {
    std::vector<bool> pivot(monomials_.at(d).size(), false);
    for (const auto& [p, x] : relations_.at(d).pivots()) pivot[p] = true;
    std::vector<Monomial> out;
    for (std::size_t c = 0; c < pivot.size(); ++c)
        if (!pivot[c]) out.push_back(monomials_[d][c]);
    return out;
}

LazardElement LazardRing::generator(int i, int j) const {
    for (std::size_t g = 0; g < generators_.size(); ++g)
        if (generators_[g] == std::make_pair(i, j)) {
            Monomial m(generators_.size(), 0);
            m[g] = 1;
            return reduce(LazardElement::monomial(m));
        }
    throw BoundTooSmall("a" + std::to_string(i) + std::to_string(j) + " is outside the truncation at degree " +
                        std::to_string(bound_));
}

std::map<int, std::map<std::size_t, Integer>> LazardRing::coordinates(const LazardElement& x) const {
    std::map<int, std::map<std::size_t, Integer>> out;
    for (const auto& [m, c] : x.terms()) {
        int d = degree(m);
        if (d >= bound_) continue;
        out[d][columns_[d].at(m)] += c;
    }
    return out;
}

LazardElement LazardRing::from_coordinates(int d, const std::map<std::size_t, Integer>& v) const {
    LazardElement x;
    for (const auto& [c, n] : v) x.add_term(monomials_.at(d).at(c), n);
    return x;
}

LazardElement LazardRing::reduce(const LazardElement& x) const {
    LazardElement out;
    for (const auto& [d, v] : coordinates(x)) out += from_coordinates(d, relations_[d].reduce(v));
    return out;
}

LazardElement LazardRing::multiply(const LazardElement& a, const LazardElement& b) const { return reduce(a * b); }

std::string LazardRing::format(const Monomial& m) const {
    std::string s;
    for (std::size_t g = 0; g < m.size(); ++g) {
        if (m[g] == 0) continue;
        if (!s.empty()) s += "*";
        s += "a" + std::to_string(generators_[g].first) + std::to_string(generators_[g].second);
        if (m[g] > 1) s += "^" + std::to_string(m[g]);
    }
    return s.empty() ? "1" : s;
}

std::string LazardRing::format(const LazardElement& x) const {
    if (x.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, n] : x.terms()) {
        Integer mag = abs(n);
        s += first ? (n < 0 ? "-" : "") : (n < 0 ? " - " : " + ");
        std::string mono = format(m);
        if (mono == "1")
            s += mag.get_str();
        else
            s += (mag != 1 ? mag.get_str() + "*" : "") + mono;
        first = false;
    }
    return s;
}

// --- formal group laws -----------------------------------------------------------------

LazardElement FormalGroupLaw::coefficient(int i, int j) const {
    auto it = coefficients.find({i, j});
    return it == coefficients.end() ? LazardElement() : it->second;
}

Series FormalGroupLaw::substitute(const Series& x, const Series& y) const {
    const LazardRing& r = *ring;
    return substitute_with(coefficients, std::min(x.bound(), bound()), x, y,
                           [&r](const LazardElement& a, const LazardElement& b) { return r.multiply(a, b); },
                           r.generator_count());
}

FormalGroupLaw build_universal_fgl(int bound) {
    FormalGroupLaw f;
    f.ring = std::make_shared<LazardRing>(bound);
    f.coefficients[{1, 0}] = f.ring->one();
    f.coefficients[{0, 1}] = f.ring->one();
    for (auto [i, j] : f.ring->generators()) f.coefficients[{i, j}] = f.ring->generator(i, j);
    return f;
}

FglResidual series_compose_check(const FormalGroupLaw& f) {
    FglResidual r;
    const LazardRing& ring = *f.ring;
    const int n = f.bound();
    for (int i = 0; i <= n; ++i) {
        LazardElement want = i == 1 ? ring.one() : LazardElement();
        if (!ring.equal(f.coefficient(i, 0), want)) {
            r.unit = false;
            r.nonzero_terms.push_back("unit u^" + std::to_string(i) + ": " +
                                      ring.format(ring.reduce(f.coefficient(i, 0) - want)));
        }
        if (!ring.equal(f.coefficient(0, i), want)) {
            r.unit = false;
            r.nonzero_terms.push_back("unit v^" + std::to_string(i) + ": " +
                                      ring.format(ring.reduce(f.coefficient(0, i) - want)));
        }
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; i + j <= n; ++j) {
            auto d = ring.reduce(f.coefficient(i, j) - f.coefficient(j, i));
            if (!d.is_zero()) {
                r.commutative = false;
                r.nonzero_terms.push_back("commutativity u^" + std::to_string(i) + "v^" + std::to_string(j) + ": " +
                                          ring.format(d));
            }
        }
    const std::size_t g = ring.generator_count();
    Series u = Series::variable(3, n, 0, g), v = Series::variable(3, n, 1, g), w = Series::variable(3, n, 2, g);
    Series res = f.substitute(f.substitute(u, v), w);
    res -= f.substitute(u, f.substitute(v, w));
    res = res.reduced(ring);
    for (const auto& [e, c] : res.terms()) {
        r.associative = false;
        r.nonzero_terms.push_back("associativity u^" + std::to_string(e[0]) + "v^" + std::to_string(e[1]) + "w^" +
                                  std::to_string(e[2]) + ": " + ring.format(c));
    }
    return r;
}

// --- LElement ---------------------------------------------------------------------------

LElement LElement::from(const Element& e, std::size_t generators) {
    LElement out(e.arrow());
    for (const auto& [c, n] : e.terms()) out.add_term(c, LazardElement::constant(n, generators));
    return out;
}

void LElement::add_term(const Cycle& c, const LazardElement& x) {
    if (x.is_zero()) return;
    if (terms_.empty()) arrow_ = c.over;
    if (c.over != arrow_) throw ArrowMismatch("cannot add cycles over different arrows");
    auto [it, inserted] = terms_.emplace(c, x);
    if (!inserted) {
        it->second += x;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

LElement& LElement::operator+=(const LElement& o) {
    if (terms_.empty()) arrow_ = o.arrow_;
    for (const auto& [c, x] : o.terms_) add_term(c, x);
    return *this;
}

LElement& LElement::operator-=(const LElement& o) {
    if (terms_.empty()) arrow_ = o.arrow_;
    for (const auto& [c, x] : o.terms_) add_term(c, Integer(-1) * x);
    return *this;
}

std::string format(const Site& site, const LazardRing& ring, const LElement& e) {
    if (e.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [c, x] : e.terms()) {
        if (!first) s += " + ";
        s += "(" + ring.format(x) + ")*" + format(site, c);
        first = false;
    }
    return s;
}

LElement evaluate_fgl(const Site& site, const FormalGroupLaw& f, const Operator& op_l, const Operator& op_m,
                      const Element& target, int bound) {
    int needed = 0;
    for (const auto& [c, n] : target.terms())
        needed = std::max(needed, structure_dim(site, c) - static_cast<int>(c.rank()));
    if (bound < needed)
        throw BoundTooSmall("evaluation bound " + std::to_string(bound) + " drops terms that may survive; need " +
                            std::to_string(needed));
    if (needed > f.bound())
        throw BoundTooSmall("formal group law is truncated at degree " + std::to_string(f.bound()) + " but degree " +
                            std::to_string(needed) + " is needed");
    const int top = std::min(bound, f.bound());
    LElement out(target.arrow());
    Element lpow = target;
    for (int i = 0; i <= top; ++i) {
        Element term = lpow;
        for (int j = 0; i + j <= top; ++j) {
            if (i + j > 0) {
                auto c = f.coefficient(i, j);
                if (!c.is_zero())
                    for (const auto& [cyc, n] : term.terms()) out.add_term(cyc, Integer(n) * c);
            }
            if (i + j < top) term = op_m(term);
        }
        if (i < top) lpow = op_l(lpow);
    }
    return out;
}

}  // namespace cobord
