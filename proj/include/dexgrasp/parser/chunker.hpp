#pragma once

#include <cstddef>
#include <regex>
#include <string>
#include <vector>

#include "dexgrasp/parser/tagger.hpp"

namespace dexgrasp::parser {

/// Regular expression over tag codes, written as `<TAG>` atoms with the
/// usual quantifiers. Inside an atom `.` matches one tag character, so
/// `<JJ.?>` covers JJ, JJR and JJS.
class ChunkPattern {
public:
    /// The quantitative descriptor pattern (requires a cardinal number).
    static const char* const kQuantitative;
    /// The same pattern with the number core optional, used for
    /// descriptors like "made of plastic" or "very rough".
    static const char* const kQualitative;

    explicit ChunkPattern(std::string pattern = kQuantitative);

    const std::string& pattern() const { return pattern_; }
    const std::regex& compiled() const { return compiled_; }

private:
    std::string pattern_;
    std::regex compiled_;
};

/// Half-open token range [first, last).
struct Chunk {
    std::size_t first = 0;
    std::size_t last = 0;
    bool quantitative = false;

    std::size_t size() const { return last - first; }
    friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Maximal non-overlapping spans matching `pattern`, left to right, searched
/// over tokens [first, last). Empty matches are skipped.
std::vector<Chunk> chunk(const std::vector<TaggedToken>& tokens, const ChunkPattern& pattern,
                         std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1));

/// Quantitative chunks first, then qualitative chunks over the uncovered
/// runs. A qualitative chunk must contain at least one NN or JJ token.
/// Result is sorted by position.
std::vector<Chunk> chunk_description(const std::vector<TaggedToken>& tokens, const ChunkPattern& quantitative,
                                     const ChunkPattern& qualitative);

}  // namespace dexgrasp::parser
