#include "dexgrasp/kb/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::kb {
namespace {

// File column name -> attribute field name.
const std::map<std::string, std::string> kColumnAliases = {
    {"a", "a"},
    {"b", "b"},
    {"c", "c"},
    {"mass", "mass"},
    {"m", "mass"},
    {"shape", "shape"},
    {"texture", "texture"},
    {"fragility", "fragility"},
    {"material", "material"},
    {"stiffness", "rigidity"},
    {"rigidity", "rigidity"},
};

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

int parse_id(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const int id = std::stoi(text, &used);
        if (used == text.size()) return id;
    } catch (const std::exception&) {
    }
    throw DataError(fmt::format("{}: invalid id '{}'", where, text));
}

ObjectRecord make_record(int id, std::string label, const std::map<std::string, std::string>& fields,
                         const std::string& where) {
    ObjectRecord record;
    record.id = id;
    record.label = std::move(label);
    // Stored dimensions must already be ordered; normalize() would silently
    // reorder them, so check first.
    std::optional<double> previous;
    for (const char* name : {"a", "b", "c"}) {
        const auto it = fields.find(name);
        if (it == fields.end() || it->second.empty()) continue;
        double value = 0.0;
        try {
            value = std::stod(it->second);
        } catch (const std::exception&) {
            throw DataError(fmt::format("{}: field '{}' has non-numeric value '{}'", where, name, it->second));
        }
        if (previous && value > *previous) {
            throw DataError(fmt::format("{}: dimensions must satisfy a >= b >= c", where));
        }
        previous = value;
    }
    try {
        record.features = query_from_fields(fields);
    } catch (const EncodingError& e) {
        throw DataError(fmt::format("{}: {}", where, e.what()));
    }
    return record;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::vector<ObjectRecord> records) : records_(std::move(records)) {
    std::set<int> seen;
    std::vector<int> ids;
    for (const auto& record : records_) {
        if (!seen.insert(record.id).second) throw DataError(fmt::format("duplicate record id {}", record.id));
        FeatureQuery check = record.features;
        try {
            check.normalize();
        } catch (const std::invalid_argument& e) {
            throw DataError(fmt::format("record {}: {}", record.id, e.what()));
        }
        if (check != record.features) {
            throw DataError(fmt::format("record {}: dimensions must satisfy a >= b >= c", record.id));
        }
        encoded_.push_back(encode(record));
        ids.push_back(record.id);
    }
    index_ = KdTree(encoded_, std::move(ids));
}

const ObjectRecord* KnowledgeBase::find(int id) const {
    for (const auto& record : records_) {
        if (record.id == id) return &record;
    }
    return nullptr;
}

std::vector<Match> KnowledgeBase::retrieve(const FeatureQuery& query, const Metric& metric, std::size_t k) const {
    return retrieve(encode(query), metric, k);
}

std::vector<Match> KnowledgeBase::retrieve(const EncodedFeatures& query, const Metric& metric, std::size_t k) const {
    if (records_.empty()) throw RetrievalError("knowledge base is empty");
    if (k == 0 || k > records_.size()) {
        throw RetrievalError(fmt::format("k must be in [1, {}], got {}", records_.size(), k));
    }

    std::vector<Neighbor> ranked;
    if (metric.kind == MetricKind::kd_tree) {
        ranked = index_.nearest(query, k);
    } else {
        ranked.reserve(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            ranked.push_back(Neighbor{i, records_[i].id, distance(query, encoded_[i], metric)});
        }
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(), closer);
        ranked.resize(k);
    }

    std::vector<Match> matches;
    matches.reserve(ranked.size());
    for (const auto& neighbor : ranked) matches.push_back(Match{records_[neighbor.index], neighbor.distance});
    return matches;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::vector<ObjectRecord> read_records_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_number = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_number;
        if (!trim(line).empty()) header = split_csv_line(line);
    }
    if (header.empty()) throw DataError(fmt::format("{}: missing header", source));

    std::optional<std::size_t> id_column;
    std::optional<std::size_t> label_column;
    std::map<std::size_t, std::string> attribute_columns;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name = header[i];
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (name == "id") {
            id_column = i;
        } else if (name == "label") {
            label_column = i;
        } else if (auto it = kColumnAliases.find(name); it != kColumnAliases.end()) {
            attribute_columns[i] = it->second;
        } else {
            throw DataError(fmt::format("{}: unknown column '{}'", source, header[i]));
        }
    }
    if (!id_column || !label_column) throw DataError(fmt::format("{}: header needs id and label", source));

    std::vector<ObjectRecord> records;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        const std::string where = fmt::format("{}:{}", source, line_number);
        if (cells.size() != header.size()) {
            throw DataError(fmt::format("{}: expected {} cells, found {}", where, header.size(), cells.size()));
        }
        std::map<std::string, std::string> fields;
        for (const auto& [column, name] : attribute_columns) fields[name] = cells[column];
        records.push_back(make_record(parse_id(cells[*id_column], where), cells[*label_column], fields, where));
    }
    return records;
}

std::vector<ObjectRecord> read_records_jsonl(std::istream& in, const std::string& source) {
    std::vector<ObjectRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const std::string where = fmt::format("{}:{}", source, line_number);
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("{}: {}", where, e.what()));
        }
        if (!object.is_object() || !object.contains("id")) throw DataError(fmt::format("{}: missing id", where));
        std::map<std::string, std::string> fields;
        std::string label;
        int id = 0;
        for (const auto& [key, value] : object.items()) {
            if (key == "id") {
                if (!value.is_number_integer()) throw DataError(fmt::format("{}: id must be an integer", where));
                id = value.get<int>();
            } else if (key == "label") {
                label = value.get<std::string>();
            } else if (auto it = kColumnAliases.find(key); it != kColumnAliases.end()) {
                if (value.is_null()) {
                    fields[it->second] = "";
                } else if (value.is_number()) {
                    fields[it->second] = fmt::format("{}", value.get<double>());
                } else {
                    fields[it->second] = value.get<std::string>();
                }
            } else {
                throw DataError(fmt::format("{}: unknown key '{}'", where, key));
            }
        }
        records.push_back(make_record(id, std::move(label), fields, where));
    }
    return records;
}

std::vector<ObjectRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open knowledge base file {}", path.string()));
    if (path.extension() == ".jsonl") return read_records_jsonl(in, path.string());
    return read_records_csv(in, path.string());
}

void write_records_csv(std::ostream& out, const std::vector<ObjectRecord>& records) {
    out << "id,label,a,b,c,mass,shape,texture,fragility,material,stiffness\n";
    auto number = [](const std::optional<double>& v) { return v ? fmt::format("{:g}", *v) : std::string(); };
    auto category = [](const auto& v) { return v ? std::string(to_string(*v)) : std::string(); };
    for (const auto& record : records) {
        const auto& f = record.features;
        std::string label = record.label;
        if (label.find_first_of(",\"") != std::string::npos) {
            std::string escaped = "\"";
            for (char ch : label) escaped += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            label = escaped + "\"";
        }
        out << record.id << ',' << label << ',' << number(f.a) << ',' << number(f.b) << ',' << number(f.c) << ','
            << number(f.mass) << ',' << category(f.shape) << ',' << category(f.texture) << ','
            << category(f.fragility) << ',' << category(f.material) << ',' << category(f.rigidity) << '\n';
    }
}

}  // namespace dexgrasp::kb
