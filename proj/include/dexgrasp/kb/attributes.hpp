#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace dexgrasp::kb {

// `elongated` is the "long" shape class.
enum class Shape { thin, compact, prism, elongated, radial };
enum class Rigidity { rigid, squeezable, floppy };
enum class Texture { medium, smooth, rough };
enum class Fragility { sturdy, medium, fragile };
enum class Material { fabric, glass, metal, paper, plastic, rubber, wood, other };

/// The nine object attributes, in the order used for masks and reports.
enum class Attribute : std::size_t { a, b, c, mass, shape, rigidity, texture, fragility, material };

inline constexpr std::size_t kAttributeCount = 9;

using AttributeMask = std::bitset<kAttributeCount>;

constexpr std::size_t index_of(Attribute attribute) { return static_cast<std::size_t>(attribute); }

inline constexpr std::array<Attribute, kAttributeCount> kAllAttributes = {
    Attribute::a,        Attribute::b,       Attribute::c,         Attribute::mass,     Attribute::shape,
    Attribute::rigidity, Attribute::texture, Attribute::fragility, Attribute::material,
};

std::string_view to_string(Attribute attribute);
std::optional<Attribute> attribute_from_string(std::string_view name);

std::string_view to_string(Shape value);
std::string_view to_string(Rigidity value);
std::string_view to_string(Texture value);
std::string_view to_string(Fragility value);
std::string_view to_string(Material value);

// Parsers accept the lowercase names above. Rigidity also accepts "soft",
// the spelling used for squeezable objects in older tables.
std::optional<Shape> parse_shape(std::string_view text);
std::optional<Rigidity> parse_rigidity(std::string_view text);
std::optional<Texture> parse_texture(std::string_view text);
std::optional<Fragility> parse_fragility(std::string_view text);
std::optional<Material> parse_material(std::string_view text);

/// Possibly incomplete attribute set. Lengths are in cm, mass in grams.
///
/// Invariants (established by normalize()): present dimensions are ordered
/// a >= b >= c and every present numeric field is strictly positive.
struct FeatureQuery {
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> c;
    std::optional<double> mass;
    std::optional<Shape> shape;
    std::optional<Rigidity> rigidity;
    std::optional<Texture> texture;
    std::optional<Fragility> fragility;
    std::optional<Material> material;

    AttributeMask presence() const;
    bool has(Attribute attribute) const { return presence().test(index_of(attribute)); }
    bool complete() const { return presence().all(); }
    std::size_t dimension_count() const;

    /// Re-sorts the present dimension values into descending order over the
    /// present slots and validates positivity. Throws std::invalid_argument.
    void normalize();

    /// Clears one attribute.
    void drop(Attribute attribute);

    std::optional<double>& dimension(std::size_t i);
    const std::optional<double>& dimension(std::size_t i) const;

    friend bool operator==(const FeatureQuery&, const FeatureQuery&) = default;
};

/// Builds a normalized query; throws std::invalid_argument on bad values.
FeatureQuery make_query(FeatureQuery raw);

/// One knowledge-base entry. A record loaded from an incomplete source may
/// carry absent attributes; those behave like absent query fields.
struct ObjectRecord {
    int id = 0;
    std::string label;
    FeatureQuery features;

    friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

/// Renders the record's present attributes as "a=15.4 b=7.9 ... material=plastic".
std::string describe(const FeatureQuery& query);

}  // namespace dexgrasp::kb
