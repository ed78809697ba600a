#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/kb/encoding.hpp"
#include "dexgrasp/kb/kd_tree.hpp"
#include "dexgrasp/kb/metrics.hpp"

namespace dexgrasp::kb {

struct Match {
    ObjectRecord record;
    double distance = 0.0;
};

/// Immutable collection of object records with cached encodings and a K-D
/// tree index. Safe for concurrent read-only use once constructed.
class KnowledgeBase {
public:
    KnowledgeBase() = default;

    /// Throws DataError on duplicate ids or records violating a >= b >= c > 0.
    explicit KnowledgeBase(std::vector<ObjectRecord> records);

    const std::vector<ObjectRecord>& records() const { return records_; }
    const std::vector<EncodedFeatures>& encoded() const { return encoded_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const ObjectRecord* find(int id) const;

    /// The k records closest to `query`, sorted by ascending distance with
    /// ties broken by ascending id. Requires 1 <= k <= size(); an empty
    /// knowledge base raises RetrievalError.
    std::vector<Match> retrieve(const FeatureQuery& query, const Metric& metric, std::size_t k = 1) const;
    std::vector<Match> retrieve(const EncodedFeatures& query, const Metric& metric, std::size_t k = 1) const;

private:
    std::vector<ObjectRecord> records_;
    std::vector<EncodedFeatures> encoded_;
    KdTree index_;
};

/// KB file readers. CSV uses the header
/// `id,label,a,b,c,mass,shape,texture,fragility,material,stiffness`
/// (any column order, empty cell = missing); JSON-lines objects use the
/// same keys. load_records() dispatches on the extension (.csv, .jsonl).
std::vector<ObjectRecord> read_records_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<ObjectRecord> read_records_jsonl(std::istream& in, const std::string& source = "<stream>");
std::vector<ObjectRecord> load_records(const std::filesystem::path& path);

void write_records_csv(std::ostream& out, const std::vector<ObjectRecord>& records);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace dexgrasp::kb
