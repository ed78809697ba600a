#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dexgrasp::learner {

enum class GraspType { wt, wp, wh, wc, rp, rc };
enum class GraspDim { a, b, c, ab, bc, ac, abc };

/// The nine grasp classes in canonical order. Ties in select_grasp go to
/// the earliest class in this order.
enum class GraspClass { rc_ab, rc_bc, rp_b, rp_c, wc_abc, wh_bc, wh_c, wp_bc, wt_c };

inline constexpr std::size_t kGraspClassCount = 9;

inline constexpr std::array<GraspClass, kGraspClassCount> kAllGraspClasses = {
    GraspClass::rc_ab, GraspClass::rc_bc, GraspClass::rp_b, GraspClass::rp_c,  GraspClass::wc_abc,
    GraspClass::wh_bc, GraspClass::wh_c,  GraspClass::wp_bc, GraspClass::wt_c,
};

constexpr std::size_t index_of(GraspClass grasp) { return static_cast<std::size_t>(grasp); }

/// "rc.ab", "wt.c", ...
std::string_view code(GraspClass grasp);
std::optional<GraspClass> parse_grasp_class(std::string_view code);

std::string_view to_string(GraspType type);
std::string_view to_string(GraspDim dim);
std::optional<GraspType> parse_grasp_type(std::string_view text);
std::optional<GraspDim> parse_grasp_dim(std::string_view text);

GraspType grasp_type(GraspClass grasp);
GraspDim grasp_dim(GraspClass grasp);

/// Inverse of (grasp_type, grasp_dim); empty for pairs outside the nine classes.
std::optional<GraspClass> compose(GraspType type, GraspDim dim);

/// Probabilities indexed by GraspClass.
struct GraspDistribution {
    std::array<double, kGraspClassCount> p{};

    double operator[](GraspClass grasp) const { return p[index_of(grasp)]; }
    double& operator[](GraspClass grasp) { return p[index_of(grasp)]; }

    /// Entries in [0, 1] summing to 1 within `tolerance`.
    bool valid(double tolerance = 1e-9) const;

    static GraspDistribution uniform();
    static GraspDistribution one_hot(GraspClass grasp);

    friend bool operator==(const GraspDistribution&, const GraspDistribution&) = default;
};

/// How often each grasp was chosen for one object in human trials.
struct GraspLabel {
    int object_id = 0;
    std::array<unsigned, kGraspClassCount> frequencies{};

    unsigned frequency(GraspClass grasp) const { return frequencies[index_of(grasp)]; }
    unsigned total() const;
    unsigned max_frequency() const;

    /// Frequencies divided by their sum. Throws DataError when all are zero.
    GraspDistribution distribution() const;

    friend bool operator==(const GraspLabel&, const GraspLabel&) = default;
};

/// Argmax; the first class in canonical order wins ties. Takes any nine
/// scores, normalized or not.
GraspClass select_grasp(const GraspDistribution& distribution);

/// -sum_j truth_j * ln(predicted_j), predicted clamped to [1e-12, 1].
double cross_entropy(const GraspDistribution& truth, const GraspDistribution& predicted);

/// Fraction of objects whose predicted grasp was used at least once by the
/// human subjects. Throws std::invalid_argument on a length mismatch.
double feasibility_score(const std::vector<GraspLabel>& truth, const std::vector<GraspDistribution>& predictions);

/// Fraction of objects whose predicted grasp has the maximal human
/// frequency; a grasp tied with the modal one counts.
double match_score(const std::vector<GraspLabel>& truth, const std::vector<GraspDistribution>& predictions);

/// CSV with header `object_id,rc.ab,rc.bc,rp.b,rp.c,wc.abc,wh.bc,wh.c,wp.bc,wt.c`.
/// Columns may come in any order. Throws DataError on malformed rows,
/// duplicate ids or all-zero rows.
std::vector<GraspLabel> read_labels_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<GraspLabel> load_labels(const std::filesystem::path& path);
void write_labels_csv(std::ostream& out, const std::vector<GraspLabel>& labels);

}  // namespace dexgrasp::learner
