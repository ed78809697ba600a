#include "dexgrasp/learner/grasp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"

namespace dexgrasp::learner {
namespace {

struct ClassInfo {
    std::string_view code;
    GraspType type;
    GraspDim dim;
};

constexpr std::array<ClassInfo, kGraspClassCount> kClasses = {{
    {"rc.ab", GraspType::rc, GraspDim::ab},
    {"rc.bc", GraspType::rc, GraspDim::bc},
    {"rp.b", GraspType::rp, GraspDim::b},
    {"rp.c", GraspType::rp, GraspDim::c},
    {"wc.abc", GraspType::wc, GraspDim::abc},
    {"wh.bc", GraspType::wh, GraspDim::bc},
    {"wh.c", GraspType::wh, GraspDim::c},
    {"wp.bc", GraspType::wp, GraspDim::bc},
    {"wt.c", GraspType::wt, GraspDim::c},
}};

constexpr std::array<std::string_view, 6> kTypeNames = {"wt", "wp", "wh", "wc", "rp", "rc"};
constexpr std::array<std::string_view, 7> kDimNames = {"a", "b", "c", "ab", "bc", "ac", "abc"};

template <typename Enum, std::size_t N>
std::optional<Enum> find_name(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

void check_aligned(const std::vector<GraspLabel>& truth, const std::vector<GraspDistribution>& predictions) {
    if (truth.size() != predictions.size()) {
        throw std::invalid_argument(
            fmt::format("{} labels but {} predictions", truth.size(), predictions.size()));
    }
}

}  // namespace

std::string_view code(GraspClass grasp) { return kClasses.at(index_of(grasp)).code; }

std::optional<GraspClass> parse_grasp_class(std::string_view text) {
    for (std::size_t i = 0; i < kGraspClassCount; ++i) {
        if (kClasses[i].code == text) return static_cast<GraspClass>(i);
    }
    return std::nullopt;
}

std::string_view to_string(GraspType type) { return kTypeNames.at(static_cast<std::size_t>(type)); }
std::string_view to_string(GraspDim dim) { return kDimNames.at(static_cast<std::size_t>(dim)); }

std::optional<GraspType> parse_grasp_type(std::string_view text) { return find_name<GraspType>(kTypeNames, text); }
std::optional<GraspDim> parse_grasp_dim(std::string_view text) { return find_name<GraspDim>(kDimNames, text); }

GraspType grasp_type(GraspClass grasp) { return kClasses.at(index_of(grasp)).type; }
GraspDim grasp_dim(GraspClass grasp) { return kClasses.at(index_of(grasp)).dim; }

std::optional<GraspClass> compose(GraspType type, GraspDim dim) {
    for (std::size_t i = 0; i < kGraspClassCount; ++i) {
        if (kClasses[i].type == type && kClasses[i].dim == dim) return static_cast<GraspClass>(i);
    }
    return std::nullopt;
}

bool GraspDistribution::valid(double tolerance) const {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tolerance;
}

GraspDistribution GraspDistribution::uniform() {
    GraspDistribution d;
    d.p.fill(1.0 / static_cast<double>(kGraspClassCount));
    return d;
}

GraspDistribution GraspDistribution::one_hot(GraspClass grasp) {
    GraspDistribution d;
    d[grasp] = 1.0;
    return d;
}

unsigned GraspLabel::total() const {
    unsigned n = 0;
    for (auto f : frequencies) n += f;
    return n;
}

unsigned GraspLabel::max_frequency() const { return *std::max_element(frequencies.begin(), frequencies.end()); }

GraspDistribution GraspLabel::distribution() const {
    const unsigned n = total();
    if (n == 0) throw DataError(fmt::format("object {} has no grasp observations", object_id));
    GraspDistribution d;
    for (std::size_t i = 0; i < kGraspClassCount; ++i) {
        d.p[i] = static_cast<double>(frequencies[i]) / static_cast<double>(n);
    }
    return d;
}

GraspClass select_grasp(const GraspDistribution& distribution) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kGraspClassCount; ++i) {
        if (distribution.p[i] > distribution.p[best]) best = i;
    }
    return static_cast<GraspClass>(best);
}

double cross_entropy(const GraspDistribution& truth, const GraspDistribution& predicted) {
    double loss = 0.0;
    for (std::size_t i = 0; i < kGraspClassCount; ++i) {
        if (truth.p[i] == 0.0) continue;
        loss -= truth.p[i] * std::log(std::clamp(predicted.p[i], 1e-12, 1.0));
    }
    return loss;
}

double feasibility_score(const std::vector<GraspLabel>& truth, const std::vector<GraspDistribution>& predictions) {
    check_aligned(truth, predictions);
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hits += truth[i].frequency(select_grasp(predictions[i])) > 0 ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double match_score(const std::vector<GraspLabel>& truth, const std::vector<GraspDistribution>& predictions) {
    check_aligned(truth, predictions);
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const unsigned f = truth[i].frequency(select_grasp(predictions[i]));
        hits += f > 0 && f == truth[i].max_frequency() ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<GraspLabel> read_labels_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_number = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = kb::split_csv_line(line);
    }
    if (header.empty()) throw DataError(fmt::format("{}: missing header", source));

    std::optional<std::size_t> id_column;
    std::array<std::optional<std::size_t>, kGraspClassCount> class_columns;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "object_id") {
            id_column = i;
        } else if (auto grasp = parse_grasp_class(header[i])) {
            class_columns[index_of(*grasp)] = i;
        } else {
            throw DataError(fmt::format("{}: unknown column '{}'", source, header[i]));
        }
    }
    if (!id_column) throw DataError(fmt::format("{}: missing column 'object_id'", source));
    for (auto grasp : kAllGraspClasses) {
        if (!class_columns[index_of(grasp)]) {
            throw DataError(fmt::format("{}: missing column '{}'", source, code(grasp)));
        }
    }

    auto parse_int = [&](const std::string& cell, std::string_view column) {
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
            throw DataError(fmt::format("{}:{}: bad {} value '{}'", source, line_number, column, cell));
        }
        return value;
    };

    std::vector<GraspLabel> labels;
    std::set<int> seen;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = kb::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(fmt::format("{}:{}: expected {} cells, got {}", source, line_number, header.size(),
                                        cells.size()));
        }
        GraspLabel label;
        label.object_id = static_cast<int>(parse_int(cells[*id_column], "object_id"));
        for (auto grasp : kAllGraspClasses) {
            const auto value = parse_int(cells[*class_columns[index_of(grasp)]], code(grasp));
            if (value < 0) {
                throw DataError(fmt::format("{}:{}: negative frequency for {}", source, line_number, code(grasp)));
            }
            label.frequencies[index_of(grasp)] = static_cast<unsigned>(value);
        }
        if (label.total() == 0) {
            throw DataError(fmt::format("{}:{}: object {} has no grasp observations", source, line_number,
                                        label.object_id));
        }
        if (!seen.insert(label.object_id).second) {
            throw DataError(fmt::format("{}:{}: duplicate object_id {}", source, line_number, label.object_id));
        }
        labels.push_back(label);
    }
    return labels;
}

std::vector<GraspLabel> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open label file {}", path.string()));
    return read_labels_csv(in, path.string());
}

void write_labels_csv(std::ostream& out, const std::vector<GraspLabel>& labels) {
    out << "object_id";
    for (auto grasp : kAllGraspClasses) out << ',' << code(grasp);
    out << '\n';
    for (const auto& label : labels) {
        out << label.object_id;
        for (auto f : label.frequencies) out << ',' << f;
        out << '\n';
    }
}

}  // namespace dexgrasp::learner
