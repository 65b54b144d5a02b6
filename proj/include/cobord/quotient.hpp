#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cobord/cycles.hpp"
#include "cobord/lattice.hpp"
#include "cobord/lazard.hpp"

namespace cobord {

/// Relation families, applied cumulatively in this order.
enum class Stage { Dim = 1, Sect = 2, Fgl = 3 };

std::string stage_name(Stage s);

/// A prefix of Dim < Sect < FGL.
struct StageSet {
    int level = 0;
    static StageSet none() { return {0}; }
    static StageSet upto(Stage s) { return {static_cast<int>(s)}; }
    /// Parses a comma separated list such as "dim,sect"; the set must be a prefix.
    static StageSet parse(const std::string& list);
    bool has(Stage s) const { return level >= static_cast<int>(s); }
    std::string str() const;
};

/// Finite set of cycles over pi_X: X -> S with at most rmax bundles.
class Universe {
public:
    Universe(const Site& site, MorphismId arrow, std::size_t rmax);

    const Site& site() const { return *site_; }
    MorphismId arrow() const { return arrow_; }
    std::size_t rmax() const { return rmax_; }
    const std::vector<Cycle>& cycles() const { return cycles_; }
    std::optional<std::size_t> index(const Cycle& c) const;
    /// Largest relative dimension of arrow . h over the cycle structures.
    int max_structure_dim() const { return max_dim_; }
    /// More bundles than the relative dimension of arrow . h: such a cycle is a
    /// dimension generator through the factorisation (id_V, arrow . h).
    bool is_dim_dead(const Cycle& c) const;

private:
    const Site* site_;
    MorphismId arrow_;
    std::size_t rmax_;
    std::vector<Cycle> cycles_;
    std::map<Cycle, std::size_t> index_;
    std::map<std::uint32_t, int> structure_dim_;
    int max_dim_ = 0;
};

/// Default cap: rel_dim(pi_X) + 2.
std::size_t default_rmax(const Site& site, MorphismId arrow);

struct RelationSubgroup {
    Stage stage;
    std::vector<Element> generators;
    std::vector<LElement> lazard_generators;  // FGL stage only
    std::vector<std::string> witnesses;
    std::size_t size() const { return stage == Stage::Fgl ? lazard_generators.size() : generators.size(); }
};

/// Dimension relations from every declared factorisation V -> S' -> S.
RelationSubgroup enumerate_rdim(const Universe& u);
/// Section relations [V; L.., L_r] - [Z; i* L..] for declared sections of bundles in the list.
RelationSubgroup enumerate_rsect(const Universe& u);
/// F(c1 L, c1 M) - c1(L (x) M) on every cycle of the universe, for every declared tensor.
RelationSubgroup enumerate_rfgl(const Universe& u, const FormalGroupLaw& f);

struct QuotientOptions {
    int degree_bound = 4;
    unsigned threads = 1;
    /// Work with Lazard coefficients below the FGL stage too (always on at the FGL stage).
    bool lazard_coefficients = false;
    /// Overrides COBORD_RESOURCE_LIMIT when nonzero.
    std::size_t resource_limit = 0;
};

/// One graded piece: coordinates, the relation lattice and the quotient invariants.
struct DegreePiece {
    int degree = 0;
    std::size_t coordinates = 0;
    std::size_t relation_rank = 0;
    std::size_t rank = 0;
    std::vector<Integer> torsion;
    HermiteLattice lattice;
};

/// Integer presentation of the universe modulo the selected relations.
class QuotientPresentation {
public:
    const Universe& universe() const { return *universe_; }
    StageSet stages() const { return stages_; }
    bool lazard() const { return ring_ != nullptr; }
    const LazardRing* ring() const { return ring_.get(); }
    int lowest_degree() const { return lowest_; }
    const std::map<int, DegreePiece>& pieces() const { return pieces_; }
    std::size_t rank(int degree) const;
    std::vector<Integer> torsion(int degree) const;
    const std::vector<RelationSubgroup>& relations() const { return relations_; }

    /// Canonical representative of the class. The integer form needs a
    /// presentation without Lazard coefficients.
    Element class_of(const Element& e) const;
    LElement class_of(const LElement& e) const;
    bool is_zero(const Element& e) const;
    bool is_zero(const LElement& e) const;
    bool equal(const Element& a, const Element& b) const { return is_zero(a - b); }
    bool equal(const LElement& a, const LElement& b) const { return is_zero(a - b); }

    using Vector = std::map<int, std::map<std::size_t, Integer>>;
    /// Lattice coordinates by total degree, dimension-dead terms dropped.
    Vector coordinates(const Element& e) const;

private:
    friend QuotientPresentation quotient(const Universe&, StageSet, const QuotientOptions&,
                                         const FormalGroupLaw*);
    struct Coord {
        int lazard_degree;
        std::size_t column;
        std::size_t cycle;
        auto operator<=>(const Coord&) const = default;
    };
    /// Coordinates by total degree; sets `below` when a live term lies under lowest_degree().
    Vector to_vector(const LElement& e, bool& below) const;
    LElement from_vector(const Vector& v) const;
    std::size_t coord_index(int t, const Coord& c) const;

    const Universe* universe_ = nullptr;
    StageSet stages_;
    std::shared_ptr<const LazardRing> ring_;
    int lowest_ = 0;
    std::map<int, DegreePiece> pieces_;
    std::map<int, std::map<Coord, std::size_t>> coords_;
    std::map<int, std::vector<Coord>> coord_list_;
    std::vector<RelationSubgroup> relations_;
};

/// Builds the presentation. Stage prerequisites are built in order; the FGL
/// stage uses `law` when given, otherwise the universal law of the degree bound.
QuotientPresentation quotient(const Universe& u, StageSet stages, const QuotientOptions& options = {},
                              const FormalGroupLaw* law = nullptr);
bool equal_in_quotient(const QuotientPresentation& p, const Element& a, const Element& b);

/// An operation whose compatibility with the relations is to be checked.
struct OperationDescriptor {
    enum class Kind { Pushforward, SmoothPullback, Chern, ExternalLeft, ExternalRight };
    Kind kind;
    MorphismId map{};       // f for pushforward and smooth pullback
    MorphismId pushed_over{};  // g with g . f = source arrow, for pushforward
    BundleId bundle{};      // Chern operator
    const Universe* other = nullptr;  // free factor for external products
    std::size_t other_cap = 1;        // bundle cap for the free factor generators
    std::string label(const Site& site) const;
};

struct WellDefinedReport {
    std::string operation;
    Stage stage;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::vector<std::string> violations;
    std::vector<std::string> skipped_reasons;
    bool ok() const { return violations.empty(); }
};

/// Applies the operation to every generator of `relations` and checks that the
/// image lies in the relation subgroup of `target`.
WellDefinedReport check_welldefined(const RelationSubgroup& relations, const QuotientPresentation& target,
                                    const OperationDescriptor& op);

/// Target arrow of an operation applied to elements over `arrow`.
MorphismId operation_target_arrow(const Site& site, MorphismId arrow, const OperationDescriptor& op);

}  // namespace cobord
