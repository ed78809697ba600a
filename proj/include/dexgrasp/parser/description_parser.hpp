#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/parser/chunker.hpp"
#include "dexgrasp/parser/lexicon.hpp"
#include "dexgrasp/parser/tagger.hpp"

namespace dexgrasp::parser {

/// Byte range [begin, end) in the description text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

/// Attributes extracted from one description.
///
/// Every present field of `query` has either a provenance span or a place
/// in `imputed`, never both.
struct ParseResult {
    kb::FeatureQuery query;
    std::map<kb::Attribute, Span> provenance;
    std::set<kb::Attribute> imputed;
    std::vector<std::string> warnings;
};

enum class UnitKind { length, mass };

struct Unit {
    UnitKind kind = UnitKind::length;
    double factor = 1.0;  ///< to centimeters or grams
};

/// Unit lookup by lemma ("centimeter", "cm", "inch", "gram", "lb", ...).
std::optional<Unit> unit_of(std::string_view lemma);

/// A run of number tokens resolved to one value, e.g. "one hundred and
/// sixteen" or "fifteen and half".
struct NumberSpan {
    double value = 0.0;
    std::size_t first = 0;  ///< token range [first, last)
    std::size_t last = 0;
};

/// Resolves the CD and CC tokens in [first, last) into numbers. Digits,
/// decimals, number words up to the thousands and "and (a) half/quarter"
/// fractions are understood; "and" between two unrelated numbers, "x",
/// "by" and "or" separate values.
std::vector<NumberSpan> parse_numbers(const std::vector<TaggedToken>& tokens, std::size_t first, std::size_t last);

class DescriptionParser {
public:
    explicit DescriptionParser(DescriptorLexicon lexicon, ChunkPattern quantitative = ChunkPattern(),
                               ChunkPattern qualitative = ChunkPattern(ChunkPattern::kQualitative));

    std::vector<Chunk> chunk(const std::vector<TaggedToken>& tokens) const;

    /// Reads numbers, units and keywords out of the chunks. Dimensions are
    /// placed by keyword (long/length/tall/height -> a, wide/width/diameter
    /// -> b, thick/deep -> c) and then re-sorted so a >= b >= c. A diameter
    /// fills two extents. Values without a keyword, or whose keyword's slot
    /// was taken by a different keyword, fill the free slots in order. The
    /// same keyword stated twice with different values keeps the first and
    /// adds a warning.
    ParseResult extract_fields(const std::vector<TaggedToken>& tokens, const std::vector<Chunk>& chunks) const;

    /// tokenize_and_tag + chunk + extract_fields. Throws ParseError on empty text.
    ParseResult parse(std::string_view description) const;

    /// As parse(), followed by impute() against `records`.
    ParseResult parse(std::string_view description, const std::vector<kb::ObjectRecord>& records) const;

    /// Text that parses back to `query`, e.g.
    /// "15.5 cm long, 8 cm wide, 1.5 cm thick, 116 g, made of plastic".
    std::string render(const kb::FeatureQuery& query) const;

    const DescriptorLexicon& lexicon() const { return lexicon_; }
    const ChunkPattern& quantitative_pattern() const { return quantitative_; }
    const ChunkPattern& qualitative_pattern() const { return qualitative_; }

private:
    DescriptorLexicon lexicon_;
    ChunkPattern quantitative_;
    ChunkPattern qualitative_;
};

/// Fills missing dimensions from the ones present.
///
/// A radial object with a single dimension gets a = b = that value. Each
/// dimension still missing takes the median ratio to its nearest present
/// dimension (the smaller one on ties) over `records` of the same shape,
/// or over all records when the shape is unknown or unmatched, times that
/// dimension. Results are clamped to keep a >= b >= c. Nothing is filled
/// when no dimension is present, and present fields are never changed.
ParseResult impute(ParseResult partial, const std::vector<kb::ObjectRecord>& records);

}  // namespace dexgrasp::parser
