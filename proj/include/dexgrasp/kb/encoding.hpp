#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "dexgrasp/kb/attributes.hpp"

namespace dexgrasp::kb {

/// Width of the encoded vector: a, b, c, mass followed by the one-hot blocks
/// shape(5), rigidity(3), texture(3), fragility(3), material(8).
inline constexpr std::size_t kEncodedWidth = 26;

struct BlockRange {
    std::size_t offset;
    std::size_t width;
};

/// Position of an attribute's slot(s) inside the encoded vector.
BlockRange block_of(Attribute attribute);

/// The attribute that owns encoded column `column`.
Attribute attribute_of_column(std::size_t column);

/// Mixed continuous/one-hot encoding with a per-attribute presence mask.
/// Absent attributes encode as zeros with their mask bit cleared.
struct EncodedFeatures {
    std::array<double, kEncodedWidth> values{};
    AttributeMask mask;

    std::span<const double> block(Attribute attribute) const;

    /// Mask expanded to one flag per encoded column.
    std::array<bool, kEncodedWidth> column_mask() const;

    friend bool operator==(const EncodedFeatures&, const EncodedFeatures&) = default;
};

EncodedFeatures encode(const FeatureQuery& query);
EncodedFeatures encode(const ObjectRecord& record);

/// Inverse of encode(). Throws EncodingError when a present categorical
/// block is not exactly one-hot.
FeatureQuery decode(const EncodedFeatures& encoded);

/// Builds a normalized query from textual field values keyed by attribute
/// name ("a", "mass", "shape", ...). Empty strings mean absent. Unknown
/// categorical values or unparseable numbers raise EncodingError naming the
/// field.
FeatureQuery query_from_fields(const std::map<std::string, std::string>& fields);

}  // namespace dexgrasp::kb
