#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cobord/cycles.hpp"
#include "cobord/quotient.hpp"

namespace cobord {

// --- axiom suites ---------------------------------------------------------------------

struct AxiomReport {
    std::string axiom;
    std::size_t checked = 0;
    std::size_t nontrivial = 0;
    std::size_t skipped = 0;
    bool budget_exhausted = false;
    std::vector<std::string> violations;
    std::vector<std::string> skipped_reasons;  // first few only
    bool ok() const { return violations.empty(); }
};

struct AxiomSuiteOptions {
    /// Instances per axiom; enumeration stops once reached.
    std::size_t budget = 4000;
    /// Bundle cap for the generators fed to each instance.
    std::size_t max_bundles = 1;
    /// Generator tuples per diagram, spread over all tuples (0: every tuple).
    std::size_t per_diagram = 24;
    /// Restrict to these axiom ids (empty: all).
    std::vector<std::string> only;
};

/// Bivariant axioms: A1 A2 A3 A12 A13 A23 A123 Units Comm.
std::vector<std::string> bivariant_axioms();
/// Over-category axioms: D1 D2 D3 D4 and A1..A8, prefixed "S:".
std::vector<std::string> overcategory_axioms();
/// Grading laws: grade:product, grade:pushforward, grade:pullback, grade:chern, grade:smooth_pullback.
std::vector<std::string> grading_laws();

/// Runs every selected axiom over all instances the site tables support,
/// in a fixed order. A missing declaration makes an instance skipped.
std::vector<AxiomReport> run_axiom_suite(const Site& site, const AxiomSuiteOptions& options = {});

// --- well-definedness over a universe -------------------------------------------------

struct OperationCheckOptions {
    /// Highest stage whose generators are pushed through the operations (Dim or Sect).
    Stage upto = Stage::Sect;
    QuotientOptions quotient;
};

/// Every operation the site supports on the universe: pushforward along proper
/// f with g . f = arrow, smooth pullback along declared composites, Chern classes
/// of bundle classes on X, and external products with one-bundle free generators
/// on either side. Each report checks the generators of one stage against the
/// cumulative relations of the target at that stage.
std::vector<WellDefinedReport> check_operations(const Universe& source, const OperationCheckOptions& options = {});

// --- cap product and duality ------------------------------------------------------------

/// alpha over id_X, beta over p_X: X -> pt; result over p_X.
/// [V -h-> X; L] cap [W -k-> X; M] = [V x_X W -> X; p1* L, p2* M].
Element cap_product(const Site& site, const Element& alpha, const Element& beta);

/// The map to X -> pt used by the homological side: the unique declared
/// morphism from X to a terminal-like target `point`.
MorphismId point_arrow(const Site& site, ObjectId x, ObjectId point);

/// alpha cap [X -id-> X] for smooth X.
Element duality_D(const Site& site, const Element& alpha, ObjectId point);
/// alpha cap [Xt -pi-> X].
Element duality_D_pi(const Site& site, MorphismId pi, const Element& alpha, ObjectId point);

enum class Order { Leq, Geq, BoundedIncomparable, Incomparable };
std::string order_name(Order o);

/// Resolutions of one object with their declared refinements.
struct ResolutionSystem {
    ObjectId object;
    std::vector<MorphismId> resolutions;

    static ResolutionSystem of(const Site& site, ObjectId x);
    /// Reflexivity and transitivity failures; empty when the system is sound.
    std::vector<std::string> validate(const Site& site) const;
};

Order resolution_compare(const Site& site, const ResolutionSystem& sys, MorphismId p1, MorphismId p2);

struct TransitionResult {
    Element value;
    /// Terms whose image depends on the chosen lift or refinement.
    std::vector<std::string> disagreements;
};

/// phi_{p1 p2} on an element of the image of D_{p1}: each term [U -u-> X; M]
/// with u = p1 . l is base-changed along a declared refinement p12.
TransitionResult transition(const Site& site, MorphismId p1, MorphismId p2, const Element& x);

struct DualityReport {
    std::size_t checked = 0;
    std::size_t pairs = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// D(alpha) == alpha for smooth X, over every element of the universe.
DualityReport check_duality_smooth(const Universe& source, ObjectId point);
/// phi_{p1 p2}(D_{p1}(a)) == D_{p2}(a) for every declared p1 <= p2 and universe element.
DualityReport check_transitions(const Universe& source, const ResolutionSystem& sys, ObjectId point);

/// Rank of the colimit of the images of D_p over the declared resolutions, per
/// cohomological degree of the source, computed inside `target` (over X -> pt).
std::map<int, std::size_t> colimit_ranks(const Universe& source, const ResolutionSystem& sys,
                                         const QuotientPresentation& target);

}  // namespace cobord
