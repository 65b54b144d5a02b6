#include "cobord/lattice.hpp"

#include <algorithm>

namespace cobord {

namespace {

using Row = std::map<std::size_t, Integer>;

void axpy(Row& dst, const Integer& a, const Row& src) {
    if (a == 0) return;
    for (const auto& [i, x] : src) {
        auto it = dst.find(i);
        if (it == dst.end()) {
            dst.emplace(i, a * x);
        } else {
            it->second += a * x;
            if (it->second == 0) dst.erase(it);
        }
    }
}

void scale(Row& r, const Integer& a) {
    if (a == 0) {
        r.clear();
        return;
    }
    for (auto& [i, x] : r) x *= a;
}

void strip(Row& r) {
    for (auto it = r.begin(); it != r.end();)
        it = it->second == 0 ? r.erase(it) : std::next(it);
}

Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

Integer SparseVector::at(std::size_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::size_t i) { return e.first < i; });
    if (it != entries.end() && it->first == index) return it->second;
    return 0;
}

SparseVector SparseVector::from_map(const std::map<std::size_t, Integer>& m) {
    SparseVector v;
    for (const auto& [i, x] : m)
        if (x != 0) v.entries.emplace_back(i, x);
    return v;
}

std::map<std::size_t, Integer> SparseVector::to_map() const {
    std::map<std::size_t, Integer> m;
    for (const auto& [i, x] : entries) m.emplace(i, x);
    return m;
}

void HermiteLattice::add(const SparseVector& v) { add(v.to_map()); }

void HermiteLattice::add(std::map<std::size_t, Integer> v) {
    strip(v);
    while (!v.empty()) {
        std::size_t p = v.begin()->first;
        auto it = rows_.find(p);
        if (it == rows_.end()) {
            if (v.begin()->second < 0) scale(v, -1);
            rows_.emplace(p, std::move(v));
            return;
        }
        Row& r = it->second;
        Integer a = r.at(p);
        Integer b = v.at(p);
        if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
            axpy(v, -(b / a), r);
            continue;
        }
        Integer g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        Row nr = r;
        scale(nr, s);
        axpy(nr, t, v);
        Row nv = v;
        scale(nv, a / g);
        axpy(nv, -(b / g), r);
        r = std::move(nr);
        v = std::move(nv);
    }
}

std::map<std::size_t, Integer> HermiteLattice::reduce(std::map<std::size_t, Integer> w) const {
    strip(w);
    for (const auto& [p, r] : rows_) {
        auto it = w.find(p);
        if (it == w.end()) continue;
        Integer q = floor_div(it->second, r.at(p));
        axpy(w, -q, r);
    }
    return w;
}

SparseVector HermiteLattice::reduce(const SparseVector& v) const { return SparseVector::from_map(reduce(v.to_map())); }

std::vector<std::pair<std::size_t, Integer>> HermiteLattice::pivots() const {
    std::vector<std::pair<std::size_t, Integer>> out;
    for (const auto& [p, r] : rows_) out.emplace_back(p, r.at(p));
    return out;
}

std::vector<SparseVector> HermiteLattice::basis() const {
    std::vector<Row> rows;
    std::vector<std::size_t> piv;
    for (const auto& [p, r] : rows_) {
        rows.push_back(r);
        piv.push_back(p);
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            auto it = rows[i].find(piv[j]);
            if (it == rows[i].end()) continue;
            Integer q = floor_div(it->second, rows[j].at(piv[j]));
            axpy(rows[i], -q, rows[j]);
        }
    std::vector<SparseVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(SparseVector::from_map(r));
    return out;
}

std::vector<Integer> HermiteLattice::invariant_factors() const {
    auto rows = basis();
    std::vector<Integer> out;
    std::vector<const SparseVector*> rest;
    for (const auto& r : rows) {
        if (r.entries.front().second == 1)
            out.push_back(1);
        else
            rest.push_back(&r);
    }
    if (rest.empty()) return out;
    // unit pivot columns vanish in the other rows of a reduced basis, so the
    // remaining rows can be diagonalised on their own support
    std::map<std::size_t, std::size_t> cols;
    for (const auto* r : rest)
        for (const auto& [i, x] : r->entries) cols.emplace(i, 0);
    std::size_t c = 0;
    for (auto& [i, k] : cols) k = c++;
    std::vector<std::vector<Integer>> m(rest.size(), std::vector<Integer>(cols.size(), 0));
    for (std::size_t i = 0; i < rest.size(); ++i)
        for (const auto& [j, x] : rest[i]->entries) m[i][cols[j]] = x;
    for (auto& d : smith_diagonal(std::move(m))) out.push_back(d);
    return out;
}

std::vector<Integer> HermiteLattice::torsion() const {
    std::vector<Integer> out;
    for (auto& d : invariant_factors())
        if (d > 1) out.push_back(d);
    return out;
}

std::vector<Integer> smith_diagonal(std::vector<std::vector<Integer>> m) {
    std::vector<Integer> diag;
    const std::size_t n = m.size();
    const std::size_t k = n ? m[0].size() : 0;
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        for (auto& row : m) std::swap(row[a], row[b]);
    };
    for (std::size_t t = 0; t < std::min(n, k); ++t) {
        // smallest nonzero entry of the trailing block becomes the pivot
        bool found = false;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < n; ++i)
            for (std::size_t j = t; j < k; ++j)
                if (m[i][j] != 0 && (!found || abs(m[i][j]) < abs(m[bi][bj]))) {
                    found = true;
                    bi = i;
                    bj = j;
                }
        if (!found) break;
        std::swap(m[t], m[bi]);
        swap_cols(t, bj);
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < n; ++i) {
                if (m[i][t] == 0) continue;
                Integer q = m[i][t] / m[t][t];
                for (std::size_t j = t; j < k; ++j) m[i][j] -= q * m[t][j];
                if (m[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < k; ++j) {
                if (m[t][j] == 0) continue;
                Integer q = m[t][j] / m[t][t];
                for (std::size_t i = t; i < n; ++i) m[i][j] -= q * m[i][t];
                if (m[t][j] != 0) clean = false;
            }
            if (!clean) {
                std::size_t pi = t, pj = t;
                for (std::size_t i = t; i < n; ++i)
                    if (m[i][t] != 0 && abs(m[i][t]) < abs(m[pi][pj])) {
                        pi = i;
                        pj = t;
                    }
                for (std::size_t j = t; j < k; ++j)
                    if (m[t][j] != 0 && abs(m[t][j]) < abs(m[pi][pj])) {
                        pi = t;
                        pj = j;
                    }
                std::swap(m[t], m[pi]);
                swap_cols(t, pj);
                continue;
            }
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i)
                for (std::size_t j = t + 1; j < k; ++j)
                    if (!mpz_divisible_p(m[i][j].get_mpz_t(), m[t][t].get_mpz_t())) {
                        for (std::size_t c = t; c < k; ++c) m[t][c] += m[i][c];
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        diag.push_back(abs(m[t][t]));
    }
    return diag;
}

}  // namespace cobord
