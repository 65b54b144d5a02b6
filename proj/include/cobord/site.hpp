#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cobord {

/// Typed index into one of the site's tables.
template <class Tag>
struct Id {
    std::uint32_t value = 0;
    constexpr auto operator<=>(const Id&) const = default;
};

struct ObjectTag {};
struct MorphismTag {};
struct BundleTag {};

using ObjectId = Id<ObjectTag>;
using MorphismId = Id<MorphismTag>;
using BundleId = Id<BundleTag>;

struct SiteObject {
    std::string name;
    int dim = 0;
    bool smooth = false;
    int line = 0;
};

struct Morphism {
    std::string name;
    ObjectId source;
    ObjectId target;
    bool proper = false;
    bool smooth = false;
    std::optional<int> rel_dim;
    bool identity = false;
    int line = 0;
};

/// Cartesian square over (f: X -> Z, g: Y -> Z) with corner W,
/// g_prime: W -> X and f_prime: W -> Y.
struct FiberSquare {
    MorphismId f;
    MorphismId g;
    ObjectId corner;
    MorphismId g_prime;
    MorphismId f_prime;
};

struct LineBundle {
    std::string name;
    ObjectId base;
    int line = 0;
};

/// A section of `bundle` on `base` vanishing exactly along `zero_locus`.
/// A nowhere vanishing section has no zero locus.
struct SectionDatum {
    std::string name;
    BundleId bundle;
    ObjectId base;
    std::optional<ObjectId> zero_locus;
    std::optional<MorphismId> inclusion;
    int line = 0;
};

struct Resolution {
    std::string name;
    MorphismId map;
    int line = 0;
};

struct TensorEntry {
    BundleId left;
    BundleId right;
    BundleId result;
    int line = 0;
};

enum class Validation { Full, Skip };

/// A finite, explicitly declared site: objects, morphisms with flags,
/// composition and fiber-square tables, line bundles and their tables.
/// Every lookup that the tables cannot answer raises MissingDeclaration.
class Site {
public:
    // --- tables -----------------------------------------------------------
    std::size_t object_count() const { return objects_.size(); }
    std::size_t morphism_count() const { return morphisms_.size(); }
    std::size_t bundle_count() const { return bundles_.size(); }

    const SiteObject& object(ObjectId id) const { return objects_.at(id.value); }
    const Morphism& morphism(MorphismId id) const { return morphisms_.at(id.value); }
    const LineBundle& bundle(BundleId id) const { return bundles_.at(id.value); }

    std::optional<ObjectId> find_object(std::string_view name) const;
    std::optional<MorphismId> find_morphism(std::string_view name) const;
    std::optional<BundleId> find_bundle(std::string_view name) const;
    ObjectId object_id(std::string_view name) const;
    MorphismId morphism_id(std::string_view name) const;
    BundleId bundle_id(std::string_view name) const;

    const std::string& name(ObjectId id) const { return object(id).name; }
    const std::string& name(MorphismId id) const { return morphism(id).name; }
    const std::string& name(BundleId id) const { return bundle(id).name; }

    MorphismId identity(ObjectId x) const { return identities_.at(x.value); }
    bool is_identity(MorphismId m) const { return morphism(m).identity; }

    std::vector<MorphismId> morphisms_between(ObjectId source, ObjectId target) const;
    std::vector<MorphismId> morphisms_into(ObjectId target) const;
    std::vector<MorphismId> morphisms_from(ObjectId source) const;

    const std::vector<FiberSquare>& squares() const { return squares_; }
    const std::vector<SectionDatum>& sections() const { return sections_; }
    const std::vector<Resolution>& resolutions() const { return resolutions_; }
    const std::vector<TensorEntry>& tensors() const { return tensors_; }
    std::size_t composite_count() const { return composites_.size(); }
    const std::map<std::pair<std::uint32_t, std::uint32_t>, MorphismId>& composite_table() const {
        return composites_;
    }

    // --- composition --------------------------------------------------------
    /// g . f. Identities compose implicitly; otherwise the composite must be declared.
    MorphismId compose(MorphismId g, MorphismId f) const;
    /// As compose, but returns nullopt for an undeclared composite.
    std::optional<MorphismId> try_compose(MorphismId g, MorphismId f) const;
    /// Composite of a path applied right to left: path = {f1, f2, ...} means ... f2 . f1.
    MorphismId compose_path(const std::vector<MorphismId>& path) const;

    // --- fiber squares --------------------------------------------------------
    /// Square over (f, g). A declared (g, f) square is used transposed and
    /// squares with an identity leg are implicit.
    FiberSquare pull_square(MorphismId f, MorphismId g) const;
    std::optional<FiberSquare> try_pull_square(MorphismId f, MorphismId g) const;

    // --- bundles --------------------------------------------------------------
    /// Iso-class representative (the first declared member).
    BundleId canonical(BundleId l) const { return iso_rep_.at(l.value); }
    bool isomorphic(BundleId a, BundleId b) const { return canonical(a) == canonical(b); }
    /// Iso-class representatives of bundles on x, in declaration order.
    const std::vector<BundleId>& bundle_classes_on(ObjectId x) const { return classes_on_.at(x.value); }
    /// f* L as a class representative.
    BundleId pullback(MorphismId f, BundleId l) const;
    std::optional<BundleId> try_pullback(MorphismId f, BundleId l) const;
    /// Pull back along a path {f1, f2, ...} (first f_last*, ending with f1*).
    BundleId pullback_path(const std::vector<MorphismId>& path, BundleId l) const;
    std::optional<BundleId> tensor(BundleId a, BundleId b) const;
    std::vector<const SectionDatum*> sections_of(BundleId l) const;

    // --- construction (used by the parser) -------------------------------------
    ObjectId add_object(SiteObject o);
    MorphismId add_morphism(Morphism m);
    BundleId add_bundle(LineBundle b);
    void add_composite(MorphismId g, MorphismId f, MorphismId k, int line);
    void add_square(FiberSquare s, int line);
    void add_pullback(MorphismId f, BundleId l, BundleId result, int line);
    void add_tensor(TensorEntry t);
    void add_iso(BundleId a, BundleId b);
    void add_section(SectionDatum s);
    void add_resolution(Resolution r);
    /// Builds the class-level tables, then checks every invariant; throws ValidationError.
    /// Validation::Skip only builds the tables (fault-injection fixtures).
    void finalize(Validation mode = Validation::Full);

    /// Declared maps m with p1 . m = p2 (the identity when p1 == p2).
    std::vector<MorphismId> refinements(MorphismId p1, MorphismId p2) const;

    std::string describe(MorphismId m) const;

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t(a) << 32) | b; }
    std::uint32_t find_root(std::uint32_t b) const;
    void build_classes();
    void validate_morphisms() const;
    void validate_composites() const;
    void validate_squares() const;
    void validate_bundles() const;
    void validate_sections() const;
    void validate_resolutions() const;

    std::vector<SiteObject> objects_;
    std::vector<Morphism> morphisms_;
    std::vector<LineBundle> bundles_;
    std::vector<MorphismId> identities_;
    std::unordered_map<std::string, std::uint32_t> object_names_;
    std::unordered_map<std::string, std::uint32_t> morphism_names_;
    std::unordered_map<std::string, std::uint32_t> bundle_names_;

    std::map<std::pair<std::uint32_t, std::uint32_t>, MorphismId> composites_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> composite_lines_;
    std::vector<FiberSquare> squares_;
    std::vector<int> square_lines_;
    std::unordered_map<std::uint64_t, std::size_t> square_index_;

    // raw pullback declarations, then class-level table
    struct PullbackDecl {
        MorphismId f;
        BundleId l;
        BundleId result;
        int line;
    };
    std::vector<PullbackDecl> pullback_decls_;
    std::unordered_map<std::uint64_t, BundleId> pullbacks_;
    std::unordered_map<std::uint64_t, BundleId> tensor_table_;
    std::vector<TensorEntry> tensors_;
    std::vector<SectionDatum> sections_;
    std::vector<Resolution> resolutions_;

    mutable std::vector<std::uint32_t> union_find_;
    std::vector<BundleId> iso_rep_;
    std::vector<std::vector<BundleId>> classes_on_;
};

/// Parses the site DSL and validates the result.
Site parse_site(std::string_view text, Validation mode = Validation::Full);
Site load_site(const std::string& path, Validation mode = Validation::Full);

}  // namespace cobord
