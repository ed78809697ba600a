#include "dexgrasp/parser/chunker.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::parser {
namespace {

// Rewrites `<JJ.?>*` into `(?:<JJ[^<>]?>)*` so each atom matches exactly
// one whole tag in the "<CD><NN><JJ>" rendering of a sentence.
std::string to_ecmascript(const std::string& pattern) {
    std::string out;
    bool in_atom = false;
    for (char ch : pattern) {
        if (ch == '<') {
            if (in_atom) throw ParseError(fmt::format("nested '<' in chunk pattern '{}'", pattern));
            in_atom = true;
            out += "(?:<";
        } else if (ch == '>') {
            if (!in_atom) throw ParseError(fmt::format("unbalanced '>' in chunk pattern '{}'", pattern));
            in_atom = false;
            out += ">)";
        } else if (in_atom && ch == '.') {
            out += "[^<>]";
        } else if (std::isspace(static_cast<unsigned char>(ch)) != 0) {
            continue;
        } else {
            out += ch;
        }
    }
    if (in_atom) throw ParseError(fmt::format("unterminated atom in chunk pattern '{}'", pattern));
    return out;
}

std::regex compile(const std::string& pattern) {
    try {
        return std::regex(to_ecmascript(pattern), std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw ParseError(fmt::format("invalid chunk pattern '{}': {}", pattern, e.what()));
    }
}

bool has_content_word(const std::vector<TaggedToken>& tokens, const Chunk& c) {
    for (std::size_t i = c.first; i < c.last; ++i) {
        const auto& tag = tokens[i].tag;
        if (tag.rfind("NN", 0) == 0 || tag.rfind("JJ", 0) == 0) return true;
    }
    return false;
}

}  // namespace

const char* const ChunkPattern::kQuantitative =
    "<JJ.?>*<IN>*<CD.?><CD.?>*<CC.?>*<CD.?>*<NN.?>*<RB.?>*<JJ.?>*<IN>*<NN.?>*<JJ.?>*<NN.?>?";

const char* const ChunkPattern::kQualitative =
    "<JJ.?>*<IN>*(<CD.?><CD.?>*)?<CC.?>*<CD.?>*<NN.?>*<RB.?>*<JJ.?>*<IN>*<NN.?>*<JJ.?>*<NN.?>?";

ChunkPattern::ChunkPattern(std::string pattern) : pattern_(std::move(pattern)), compiled_(compile(pattern_)) {}

std::vector<Chunk> chunk(const std::vector<TaggedToken>& tokens, const ChunkPattern& pattern, std::size_t first,
                         std::size_t last) {
    last = std::min(last, tokens.size());
    std::vector<Chunk> chunks;
    if (first >= last) return chunks;

    std::string tags;
    std::vector<std::size_t> starts;  // tag-string offset of each token
    for (std::size_t i = first; i < last; ++i) {
        starts.push_back(tags.size());
        tags += '<';
        tags += tokens[i].tag;
        tags += '>';
    }
    auto token_at = [&](std::size_t offset) {
        return first + static_cast<std::size_t>(std::lower_bound(starts.begin(), starts.end(), offset) - starts.begin());
    };

    auto begin = tags.cbegin();
    std::smatch match;
    while (begin != tags.cend() &&
           std::regex_search(begin, tags.cend(), match, pattern.compiled(), std::regex_constants::match_default)) {
        const auto offset = static_cast<std::size_t>(match[0].first - tags.cbegin());
        const auto length = static_cast<std::size_t>(match.length(0));
        if (length == 0) {
            // Step over one whole tag and retry.
            const auto next = tags.find('<', offset + 1);
            if (next == std::string::npos) break;
            begin = tags.cbegin() + static_cast<std::ptrdiff_t>(next);
            continue;
        }
        chunks.push_back(Chunk{token_at(offset), token_at(offset + length), false});
        begin = match[0].second;
    }
    return chunks;
}

std::vector<Chunk> chunk_description(const std::vector<TaggedToken>& tokens, const ChunkPattern& quantitative,
                                     const ChunkPattern& qualitative) {
    auto chunks = chunk(tokens, quantitative);
    for (auto& c : chunks) c.quantitative = true;

    std::vector<Chunk> result;
    std::size_t cursor = 0;
    auto fill_gap = [&](std::size_t gap_end) {
        for (const auto& c : chunk(tokens, qualitative, cursor, gap_end)) {
            if (has_content_word(tokens, c)) result.push_back(c);
        }
    };
    for (const auto& c : chunks) {
        fill_gap(c.first);
        result.push_back(c);
        cursor = c.last;
    }
    fill_gap(tokens.size());
    return result;
}

}  // namespace dexgrasp::parser
