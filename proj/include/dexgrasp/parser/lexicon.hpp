#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/parser/tagger.hpp"

namespace dexgrasp::parser {

/// One keyword phrase mapped to a categorical attribute value.
struct DescriptorEntry {
    std::vector<std::string> lemmas;  ///< keyword after the tokenizer's cleanup
    std::string phrase;               ///< keyword as written in the file
    kb::Attribute field = kb::Attribute::material;
    std::string value;  ///< canonical value name, e.g. "plastic"
};

struct DescriptorMatch {
    const DescriptorEntry* entry = nullptr;
    std::size_t length = 0;  ///< tokens consumed
};

/// Synonym lexicon for qualitative descriptors.
///
/// File format, one entry per line, `#` starts a comment:
///
///     very rough -> texture:rough
///     cylindrical -> shape:prism
///
/// Keywords are run through tokenize_and_tag, so plural and singular
/// spellings match alike.
class DescriptorLexicon {
public:
    DescriptorLexicon() = default;

    static DescriptorLexicon read(std::istream& in, const std::string& source = "<stream>");
    static DescriptorLexicon load(const std::filesystem::path& path);

    /// Longest entry whose lemmas match tokens starting at `index`, limited
    /// to tokens before `last`.
    std::optional<DescriptorMatch> match(const std::vector<TaggedToken>& tokens, std::size_t index,
                                         std::size_t last) const;

    /// Keyword that renders `value` for `field` back to text: the first entry
    /// in file order, so canonical spellings should come first.
    std::optional<std::string> canonical_phrase(kb::Attribute field, const std::string& value) const;

    const std::vector<DescriptorEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::vector<DescriptorEntry> entries_;
};

}  // namespace dexgrasp::parser
