#include "dexgrasp/parser/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::parser {
namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

bool valid_value(kb::Attribute field, const std::string& value) {
    switch (field) {
        case kb::Attribute::shape: return kb::parse_shape(value).has_value();
        case kb::Attribute::rigidity: return kb::parse_rigidity(value).has_value();
        case kb::Attribute::texture: return kb::parse_texture(value).has_value();
        case kb::Attribute::fragility: return kb::parse_fragility(value).has_value();
        case kb::Attribute::material: return kb::parse_material(value).has_value();
        default: return false;
    }
}

}  // namespace

DescriptorLexicon DescriptorLexicon::read(std::istream& in, const std::string& source) {
    DescriptorLexicon lexicon;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = fmt::format("{}:{}", source, line_number);

        const auto arrow = line.find("->");
        const auto colon = line.rfind(':');
        if (arrow == std::string::npos || colon == std::string::npos || colon < arrow) {
            throw DataError(fmt::format("{}: expected 'keyword -> field:value'", where));
        }
        DescriptorEntry entry;
        entry.phrase = trim(line.substr(0, arrow));
        const std::string field = trim(line.substr(arrow + 2, colon - arrow - 2));
        entry.value = trim(line.substr(colon + 1));

        const auto attribute = kb::attribute_from_string(field);
        if (!attribute || !valid_value(*attribute, entry.value)) {
            throw DataError(fmt::format("{}: unknown descriptor target '{}:{}'", where, field, entry.value));
        }
        entry.field = *attribute;
        for (const auto& token : tokenize_and_tag(entry.phrase)) entry.lemmas.push_back(token.lemma);
        if (entry.lemmas.empty()) throw DataError(fmt::format("{}: keyword '{}' is all stop words", where, entry.phrase));
        lexicon.entries_.push_back(std::move(entry));
    }
    return lexicon;
}

DescriptorLexicon DescriptorLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open lexicon {}", path.string()));
    return read(in, path.string());
}

std::optional<DescriptorMatch> DescriptorLexicon::match(const std::vector<TaggedToken>& tokens, std::size_t index,
                                                        std::size_t last) const {
    std::optional<DescriptorMatch> best;
    for (const auto& entry : entries_) {
        const auto n = entry.lemmas.size();
        if (index + n > std::min(last, tokens.size())) continue;
        if (best && n <= best->length) continue;
        bool equal = true;
        for (std::size_t k = 0; k < n && equal; ++k) equal = tokens[index + k].lemma == entry.lemmas[k];
        if (equal) best = DescriptorMatch{&entry, n};
    }
    return best;
}

std::optional<std::string> DescriptorLexicon::canonical_phrase(kb::Attribute field, const std::string& value) const {
    for (const auto& entry : entries_) {
        if (entry.field == field && entry.value == value) return entry.phrase;
    }
    return std::nullopt;
}

}  // namespace dexgrasp::parser
