#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dexgrasp::parser {

/// One word of a description after cleanup.
///
/// `tag` is drawn from a small Penn-Treebank subset: NN, JJ, JJR, JJS, RB,
/// IN, CC, CD, VB, VBZ, VBD, VBG, MD, PRP, WDT, and the punctuation tags
/// ",", "." and ":". Past participles are reported as JJ.
struct TaggedToken {
    std::string surface;
    std::string lemma;
    std::string tag;
    std::size_t begin = 0;  ///< byte offset of the surface form in the input
    std::size_t end = 0;

    friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

/// Lowercases, lemmatizes, drops stop words and tags every remaining token.
/// Throws ParseError on empty or whitespace-only input.
std::vector<TaggedToken> tokenize_and_tag(std::string_view description);

/// Lemma of one lowercase word: plural nouns and third-person verbs lose
/// their inflection ("centimeters" -> "centimeter", "inches" -> "inch").
std::string lemmatize(std::string_view word);

bool is_stop_word(std::string_view lemma);

/// Value of a single number token: digits ("15.5", "1,200"), number words
/// ("ten", "twenty-five") and the fractions "half" and "quarter".
std::optional<double> number_token_value(std::string_view lemma);

}  // namespace dexgrasp::parser
