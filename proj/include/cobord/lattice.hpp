#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "cobord/integer.hpp"

namespace cobord {

/// Sparse integer vector; entries are sorted by index and nonzero.
struct SparseVector {
    std::vector<std::pair<std::size_t, Integer>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t lead() const { return entries.front().first; }
    Integer at(std::size_t index) const;
    static SparseVector from_map(const std::map<std::size_t, Integer>& m);
    std::map<std::size_t, Integer> to_map() const;
    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Integer lattice in Z^n kept in row-echelon Hermite form. Inserting a
/// generator is an exact unimodular update, so membership and canonical
/// coset representatives are always decided over Z.
class HermiteLattice {
public:
    explicit HermiteLattice(std::size_t dimension = 0) : dimension_(dimension) {}

    void add(const SparseVector& v);
    void add(std::map<std::size_t, Integer> v);

    std::size_t dimension() const { return dimension_; }
    std::size_t rank() const { return rows_.size(); }
    std::size_t quotient_rank() const { return dimension_ - rows_.size(); }

    /// The unique representative of v + L whose pivot entries lie in [0, pivot).
    std::map<std::size_t, Integer> reduce(std::map<std::size_t, Integer> v) const;
    SparseVector reduce(const SparseVector& v) const;
    bool contains(const SparseVector& v) const { return reduce(v).empty(); }
    bool contains(const std::map<std::size_t, Integer>& v) const { return reduce(v).empty(); }

    /// Reduced Hermite basis, rows ordered by pivot column.
    std::vector<SparseVector> basis() const;
    /// Pivot columns with their (positive) pivot entries.
    std::vector<std::pair<std::size_t, Integer>> pivots() const;
    /// Nonzero invariant factors of the lattice (Smith diagonal).
    std::vector<Integer> invariant_factors() const;
    /// Invariant factors greater than one: the torsion of Z^n / L.
    std::vector<Integer> torsion() const;

private:
    std::size_t dimension_;
    std::map<std::size_t, std::map<std::size_t, Integer>> rows_;  // pivot column -> row
};

/// Smith diagonal (nonzero entries, each dividing the next) of a dense matrix.
std::vector<Integer> smith_diagonal(std::vector<std::vector<Integer>> m);

}  // namespace cobord
