#include "dexgrasp/kb/attributes.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace dexgrasp::kb {
namespace {

constexpr std::array<std::string_view, kAttributeCount> kAttributeNames = {
    "a", "b", "c", "mass", "shape", "rigidity", "texture", "fragility", "material",
};
constexpr std::array<std::string_view, 5> kShapeNames = {"thin", "compact", "prism", "long", "radial"};
constexpr std::array<std::string_view, 3> kRigidityNames = {"rigid", "squeezable", "floppy"};
constexpr std::array<std::string_view, 3> kTextureNames = {"medium", "smooth", "rough"};
constexpr std::array<std::string_view, 3> kFragilityNames = {"sturdy", "medium", "fragile"};
constexpr std::array<std::string_view, 8> kMaterialNames = {"fabric",  "glass",  "metal", "paper",
                                                            "plastic", "rubber", "wood",  "other"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Attribute attribute) { return kAttributeNames[index_of(attribute)]; }

std::optional<Attribute> attribute_from_string(std::string_view name) {
    return lookup<Attribute>(kAttributeNames, name);
}

std::string_view to_string(Shape value) { return kShapeNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(Rigidity value) { return kRigidityNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(Texture value) { return kTextureNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(Fragility value) { return kFragilityNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(Material value) { return kMaterialNames[static_cast<std::size_t>(value)]; }

std::optional<Shape> parse_shape(std::string_view text) { return lookup<Shape>(kShapeNames, text); }

std::optional<Rigidity> parse_rigidity(std::string_view text) {
    if (text == "soft") return Rigidity::squeezable;
    return lookup<Rigidity>(kRigidityNames, text);
}

std::optional<Texture> parse_texture(std::string_view text) { return lookup<Texture>(kTextureNames, text); }
std::optional<Fragility> parse_fragility(std::string_view text) {
    return lookup<Fragility>(kFragilityNames, text);
}
std::optional<Material> parse_material(std::string_view text) {
    return lookup<Material>(kMaterialNames, text);
}

AttributeMask FeatureQuery::presence() const {
    AttributeMask mask;
    mask.set(index_of(Attribute::a), a.has_value());
    mask.set(index_of(Attribute::b), b.has_value());
    mask.set(index_of(Attribute::c), c.has_value());
    mask.set(index_of(Attribute::mass), mass.has_value());
    mask.set(index_of(Attribute::shape), shape.has_value());
    mask.set(index_of(Attribute::rigidity), rigidity.has_value());
    mask.set(index_of(Attribute::texture), texture.has_value());
    mask.set(index_of(Attribute::fragility), fragility.has_value());
    mask.set(index_of(Attribute::material), material.has_value());
    return mask;
}

std::size_t FeatureQuery::dimension_count() const {
    return static_cast<std::size_t>(a.has_value()) + b.has_value() + c.has_value();
}

std::optional<double>& FeatureQuery::dimension(std::size_t i) {
    switch (i) {
        case 0: return a;
        case 1: return b;
        case 2: return c;
    }
    throw std::out_of_range("dimension index must be 0, 1 or 2");
}

const std::optional<double>& FeatureQuery::dimension(std::size_t i) const {
    return const_cast<FeatureQuery*>(this)->dimension(i);
}

void FeatureQuery::normalize() {
    std::vector<double> values;
    for (std::size_t i = 0; i < 3; ++i) {
        if (const auto& d = dimension(i)) {
            if (!(*d > 0.0)) {
                throw std::invalid_argument(fmt::format("dimension {} must be positive, got {}", "abc"[i], *d));
            }
            values.push_back(*d);
        }
    }
    if (mass && !(*mass > 0.0)) throw std::invalid_argument(fmt::format("mass must be positive, got {}", *mass));
    std::sort(values.begin(), values.end(), std::greater<>());
    auto next = values.begin();
    for (std::size_t i = 0; i < 3; ++i) {
        if (dimension(i)) dimension(i) = *next++;
    }
}

void FeatureQuery::drop(Attribute attribute) {
    switch (attribute) {
        case Attribute::a: a.reset(); break;
        case Attribute::b: b.reset(); break;
        case Attribute::c: c.reset(); break;
        case Attribute::mass: mass.reset(); break;
        case Attribute::shape: shape.reset(); break;
        case Attribute::rigidity: rigidity.reset(); break;
        case Attribute::texture: texture.reset(); break;
        case Attribute::fragility: fragility.reset(); break;
        case Attribute::material: material.reset(); break;
    }
}

FeatureQuery make_query(FeatureQuery raw) {
    raw.normalize();
    return raw;
}

std::string describe(const FeatureQuery& query) {
    std::ostringstream out;
    auto field = [&](std::string_view name, const auto& value) {
        if (!value) return;
        if (out.tellp() > 0) out << ' ';
        out << name << '=';
        if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, double>) {
            out << fmt::format("{:g}", *value);
        } else {
            out << to_string(*value);
        }
    };
    field("a", query.a);
    field("b", query.b);
    field("c", query.c);
    field("mass", query.mass);
    field("shape", query.shape);
    field("rigidity", query.rigidity);
    field("texture", query.texture);
    field("fragility", query.fragility);
    field("material", query.material);
    return out.str();
}

}  // namespace dexgrasp::kb
