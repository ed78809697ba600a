#include "dexgrasp/kb/encoding.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::kb {
namespace {

constexpr std::array<BlockRange, kAttributeCount> kBlocks = {{
    {0, 1},   // a
    {1, 1},   // b
    {2, 1},   // c
    {3, 1},   // mass
    {4, 5},   // shape
    {9, 3},   // rigidity
    {12, 3},  // texture
    {15, 3},  // fragility
    {18, 8},  // material
}};

template <typename Enum>
void set_one_hot(EncodedFeatures& out, Attribute attribute, const std::optional<Enum>& value) {
    if (!value) return;
    const auto range = kBlocks[index_of(attribute)];
    out.values[range.offset + static_cast<std::size_t>(*value)] = 1.0;
    out.mask.set(index_of(attribute));
}

void set_scalar(EncodedFeatures& out, Attribute attribute, const std::optional<double>& value) {
    if (!value) return;
    out.values[kBlocks[index_of(attribute)].offset] = *value;
    out.mask.set(index_of(attribute));
}

template <typename Enum>
std::optional<Enum> read_one_hot(const EncodedFeatures& encoded, Attribute attribute) {
    if (!encoded.mask.test(index_of(attribute))) return std::nullopt;
    const auto values = encoded.block(attribute);
    std::optional<std::size_t> hot;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 1.0 && !hot) {
            hot = i;
        } else if (values[i] != 0.0) {
            hot.reset();
            break;
        }
    }
    if (!hot) throw EncodingError(fmt::format("field '{}' is not one-hot", to_string(attribute)));
    return static_cast<Enum>(*hot);
}

double parse_number(const std::string& field, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw EncodingError(fmt::format("field '{}' has non-numeric value '{}'", field, text));
    }
    return value;
}

template <typename Enum, typename Parser>
std::optional<Enum> parse_category(const std::string& field, const std::string& text, Parser parser) {
    auto value = parser(text);
    if (!value) throw EncodingError(fmt::format("field '{}' has unknown value '{}'", field, text));
    return value;
}

}  // namespace

BlockRange block_of(Attribute attribute) { return kBlocks[index_of(attribute)]; }

Attribute attribute_of_column(std::size_t column) {
    for (auto attribute : kAllAttributes) {
        const auto range = kBlocks[index_of(attribute)];
        if (column >= range.offset && column < range.offset + range.width) return attribute;
    }
    throw std::out_of_range(fmt::format("encoded column {} out of range", column));
}

std::span<const double> EncodedFeatures::block(Attribute attribute) const {
    const auto range = kBlocks[index_of(attribute)];
    return std::span<const double>(values).subspan(range.offset, range.width);
}

std::array<bool, kEncodedWidth> EncodedFeatures::column_mask() const {
    std::array<bool, kEncodedWidth> columns{};
    for (auto attribute : kAllAttributes) {
        if (!mask.test(index_of(attribute))) continue;
        const auto range = kBlocks[index_of(attribute)];
        for (std::size_t i = 0; i < range.width; ++i) columns[range.offset + i] = true;
    }
    return columns;
}

EncodedFeatures encode(const FeatureQuery& query) {
    EncodedFeatures out;
    set_scalar(out, Attribute::a, query.a);
    set_scalar(out, Attribute::b, query.b);
    set_scalar(out, Attribute::c, query.c);
    set_scalar(out, Attribute::mass, query.mass);
    set_one_hot(out, Attribute::shape, query.shape);
    set_one_hot(out, Attribute::rigidity, query.rigidity);
    set_one_hot(out, Attribute::texture, query.texture);
    set_one_hot(out, Attribute::fragility, query.fragility);
    set_one_hot(out, Attribute::material, query.material);
    return out;
}

EncodedFeatures encode(const ObjectRecord& record) { return encode(record.features); }

FeatureQuery decode(const EncodedFeatures& encoded) {
    FeatureQuery query;
    auto scalar = [&](Attribute attribute) -> std::optional<double> {
        if (!encoded.mask.test(index_of(attribute))) return std::nullopt;
        return encoded.values[kBlocks[index_of(attribute)].offset];
    };
    query.a = scalar(Attribute::a);
    query.b = scalar(Attribute::b);
    query.c = scalar(Attribute::c);
    query.mass = scalar(Attribute::mass);
    query.shape = read_one_hot<Shape>(encoded, Attribute::shape);
    query.rigidity = read_one_hot<Rigidity>(encoded, Attribute::rigidity);
    query.texture = read_one_hot<Texture>(encoded, Attribute::texture);
    query.fragility = read_one_hot<Fragility>(encoded, Attribute::fragility);
    query.material = read_one_hot<Material>(encoded, Attribute::material);
    return query;
}

FeatureQuery query_from_fields(const std::map<std::string, std::string>& fields) {
    FeatureQuery query;
    for (const auto& [name, text] : fields) {
        const auto attribute = attribute_from_string(name);
        if (!attribute) throw EncodingError(fmt::format("unknown field '{}'", name));
        if (text.empty()) continue;
        switch (*attribute) {
            case Attribute::a: query.a = parse_number(name, text); break;
            case Attribute::b: query.b = parse_number(name, text); break;
            case Attribute::c: query.c = parse_number(name, text); break;
            case Attribute::mass: query.mass = parse_number(name, text); break;
            case Attribute::shape: query.shape = parse_category<Shape>(name, text, parse_shape); break;
            case Attribute::rigidity:
                query.rigidity = parse_category<Rigidity>(name, text, parse_rigidity);
                break;
            case Attribute::texture: query.texture = parse_category<Texture>(name, text, parse_texture); break;
            case Attribute::fragility:
                query.fragility = parse_category<Fragility>(name, text, parse_fragility);
                break;
            case Attribute::material:
                query.material = parse_category<Material>(name, text, parse_material);
                break;
        }
    }
    try {
        query.normalize();
    } catch (const std::invalid_argument& e) {
        throw EncodingError(e.what());
    }
    return query;
}

}  // namespace dexgrasp::kb
