#include "dexgrasp/parser/scoring.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::parser {
namespace {

template <typename Enum>
ConfusionMatrix make_matrix(std::size_t n, bool unspecified_column) {
    ConfusionMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
        const auto name = std::string(kb::to_string(static_cast<Enum>(i)));
        m.truth_labels.push_back(name);
        m.predicted_labels.push_back(name);
    }
    if (unspecified_column) m.predicted_labels.push_back("unspecified");
    m.counts.assign(m.truth_labels.size(), std::vector<std::size_t>(m.predicted_labels.size(), 0));
    return m;
}

}  // namespace

std::vector<CorpusEntry> read_corpus_jsonl(std::istream& in, const std::vector<kb::ObjectRecord>& records,
                                           const std::string& source) {
    std::map<int, const kb::ObjectRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;

    std::vector<CorpusEntry> corpus;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = fmt::format("{}:{}", source, line_number);
        try {
            const auto object = nlohmann::json::parse(line);
            const auto id = object.at("truth_id").get<int>();
            const auto it = by_id.find(id);
            if (it == by_id.end()) throw DataError(fmt::format("{}: unknown truth_id {}", where, id));
            corpus.push_back(CorpusEntry{object.at("text").get<std::string>(), *it->second});
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("{}: {}", where, e.what()));
        }
    }
    return corpus;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path, const std::vector<kb::ObjectRecord>& records) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open corpus {}", path.string()));
    return read_corpus_jsonl(in, records, path.string());
}

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts) {
        for (auto c : row) n += c;
    }
    return n;
}

double ConfusionMatrix::accuracy() const {
    const auto n = total();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth_labels.size(); ++i) {
        for (std::size_t j = 0; j < predicted_labels.size(); ++j) {
            if (truth_labels[i] == predicted_labels[j]) correct += counts[i][j];
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("r_squared: size mismatch");
    if (truth.empty()) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

ParserScore score_parser(const std::vector<CorpusEntry>& corpus, const DescriptionParser& parser,
                         const std::vector<kb::ObjectRecord>& records) {
    ParserScore score;
    score.material = make_matrix<kb::Material>(8, false);
    score.shape = make_matrix<kb::Shape>(5, true);
    score.rigidity = make_matrix<kb::Rigidity>(3, true);

    std::vector<double> dim_truth;
    std::vector<double> dim_parsed;
    std::vector<double> mass_truth;
    std::vector<double> mass_parsed;
    for (const auto& entry : corpus) {
        const auto parsed = parser.parse(entry.text, records).query;
        const auto& truth = entry.truth.features;
        ++score.descriptions;
        for (std::size_t i = 0; i < 3; ++i) {
            if (parsed.dimension(i) && truth.dimension(i)) {
                dim_truth.push_back(*truth.dimension(i));
                dim_parsed.push_back(*parsed.dimension(i));
            }
        }
        if (parsed.mass && truth.mass) {
            mass_truth.push_back(*truth.mass);
            mass_parsed.push_back(*parsed.mass);
        }
        if (truth.material) {
            score.material.add(static_cast<std::size_t>(*truth.material),
                               static_cast<std::size_t>(parsed.material.value_or(kb::Material::other)));
        }
        if (truth.shape) {
            score.shape.add(static_cast<std::size_t>(*truth.shape),
                            parsed.shape ? static_cast<std::size_t>(*parsed.shape) : 5);
        }
        if (truth.rigidity) {
            score.rigidity.add(static_cast<std::size_t>(*truth.rigidity),
                               parsed.rigidity ? static_cast<std::size_t>(*parsed.rigidity) : 3);
        }
    }
    score.dimension_pairs = dim_truth.size();
    score.mass_pairs = mass_truth.size();
    score.r2_dimensions = r_squared(dim_truth, dim_parsed);
    score.r2_mass = r_squared(mass_truth, mass_parsed);
    return score;
}

}  // namespace dexgrasp::parser
