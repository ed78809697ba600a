#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/parser/description_parser.hpp"

namespace dexgrasp::parser {

/// One description paired with the measured record it describes.
struct CorpusEntry {
    std::string text;
    kb::ObjectRecord truth;
};

/// Reads `{"text": ..., "truth_id": ...}` lines; ids resolve against `records`.
std::vector<CorpusEntry> read_corpus_jsonl(std::istream& in, const std::vector<kb::ObjectRecord>& records,
                                           const std::string& source = "<stream>");
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path, const std::vector<kb::ObjectRecord>& records);

/// Counts indexed [truth][predicted].
struct ConfusionMatrix {
    std::vector<std::string> truth_labels;
    std::vector<std::string> predicted_labels;
    std::vector<std::vector<std::size_t>> counts;

    void add(std::size_t truth, std::size_t predicted) { ++counts.at(truth).at(predicted); }
    std::size_t total() const;
    /// Fraction of entries whose predicted label equals the truth label.
    double accuracy() const;
};

struct ParserScore {
    std::size_t descriptions = 0;
    double r2_dimensions = 0.0;  ///< pooled over a, b and c
    double r2_mass = 0.0;
    std::size_t dimension_pairs = 0;
    std::size_t mass_pairs = 0;
    /// A missing material is scored as "other".
    ConfusionMatrix material;
    /// Missing shape or rigidity lands in an extra "unspecified" column.
    ConfusionMatrix shape;
    ConfusionMatrix rigidity;
};

/// Coefficient of determination 1 - SS_res / SS_tot. Returns NaN for empty
/// input; with zero variance in `truth` it is 1 for an exact fit and 0
/// otherwise.
double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted);

/// Parses and imputes every description, then scores the values present
/// after imputation against the truth records.
ParserScore score_parser(const std::vector<CorpusEntry>& corpus, const DescriptionParser& parser,
                         const std::vector<kb::ObjectRecord>& records);

}  // namespace dexgrasp::parser
