#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/parser/lexicon.hpp"

namespace dexgrasp::pipeline {

/// One value read off a page, with the text it came from.
struct ExtractedValue {
    kb::Attribute attribute = kb::Attribute::a;
    std::string value;    ///< normalized: cm, grams or a category name
    std::string snippet;  ///< matched text
    std::size_t offset = 0;  ///< of the snippet in PageExtraction::text
};

struct PageExtraction {
    std::filesystem::path source;
    bool skipped = false;
    std::string reason;  ///< why the page was skipped
    /// Visible page text; HTML tags and entities are stripped.
    std::string text;
    kb::ObjectRecord draft;
    std::vector<ExtractedValue> values;
    /// Ambiguous matches and which candidate was used.
    std::vector<std::string> notes;
    /// Attributes left for manual completion.
    std::vector<kb::Attribute> missing;
};

struct IngestResult {
    std::vector<kb::ObjectRecord> drafts;
    std::vector<PageExtraction> pages;  ///< one entry per file, sorted by name
};

/// Visible text of an HTML document: script and style blocks dropped, tags
/// replaced by spaces, common entities decoded.
std::string strip_html(std::string_view html);

/// Reads dimensions ("Product Dimensions: 21.5 x 7.2 x 7.2 cm", two or three
/// values with one trailing unit), weight and material keywords. Values
/// near a "dimension"/"size" or "weight" label win over others; the rest
/// become notes. Dimensions are sorted so a >= b >= c.
PageExtraction extract_page(std::string_view content, bool html, const parser::DescriptorLexicon& lexicon);

/// Extracts every .html, .htm and .txt file in `directory`. Drafts are
/// numbered from `first_id` in file order. Unreadable, empty, binary or
/// attribute-free files are skipped with a reason; the batch never aborts.
/// Throws DataError only when `directory` itself is missing.
IngestResult ingest_pages(const std::filesystem::path& directory, const parser::DescriptorLexicon& lexicon,
                          int first_id = 1);

}  // namespace dexgrasp::pipeline
