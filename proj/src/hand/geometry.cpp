#include "dexgrasp/hand/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::hand {
namespace {

constexpr std::array<std::string_view, kFingerCount> kFingerNames = {"thumb", "index", "middle", "ring", "little"};

Vec3 add(const Vec3& p, const Vec3& q) { return {p[0] + q[0], p[1] + q[1], p[2] + q[2]}; }
Vec3 scale(const Vec3& p, double s) { return {p[0] * s, p[1] * s, p[2] * s}; }

Vec3 read_vec3(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) throw DataError("expected a 3-vector");
    return {v[0], v[1], v[2]};
}

template <std::size_t N>
std::array<double, N> read_lengths(const nlohmann::json& j, std::string_view what) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != N) throw DataError(fmt::format("{} needs {} link lengths", what, N));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!(v[i] > 0.0)) throw DataError(fmt::format("{} link lengths must be positive", what));
        out[i] = v[i];
    }
    return out;
}

}  // namespace

std::string_view to_string(Finger finger) { return kFingerNames.at(index_of(finger)); }

std::optional<Finger> parse_finger(std::string_view name) {
    for (std::size_t i = 0; i < kFingerCount; ++i) {
        if (kFingerNames[i] == name) return static_cast<Finger>(i);
    }
    return std::nullopt;
}

std::vector<std::size_t> joints_of(Finger finger) {
    if (finger == Finger::thumb) return {8, 9};
    const std::size_t k = index_of(finger) - 1;
    return {2 * k, 2 * k + 1};
}

double distance(const Vec3& p, const Vec3& q) {
    return std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]));
}

bool HandGeometry::within_limits(const HandConfiguration& config, double slack) const {
    for (std::size_t j = 0; j < kJointCount; ++j) {
        const double t = config.theta[j];
        if (!(t >= servo_ranges[j].min - slack && t <= servo_ranges[j].max + slack)) return false;
    }
    return true;
}

HandGeometry geometry_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        HandGeometry g;
        const auto& fingers = j.at("fingers");
        for (std::size_t k = 0; k < 4; ++k) {
            const auto finger = static_cast<Finger>(k + 1);
            const auto it = std::find_if(fingers.begin(), fingers.end(), [&](const nlohmann::json& f) {
                return f.at("name").get<std::string>() == to_string(finger);
            });
            if (it == fingers.end()) throw DataError(fmt::format("geometry lacks finger '{}'", to_string(finger)));
            g.fingers[k].base = read_vec3(it->at("base"));
            g.fingers[k].links = read_lengths<3>(it->at("links"), to_string(finger));
        }
        g.distal_coupling = j.at("distal_coupling").get<double>();
        const auto& thumb = j.at("thumb");
        g.thumb.base = read_vec3(thumb.at("base"));
        g.thumb.links = read_lengths<2>(thumb.at("links"), "thumb");
        g.thumb.distal_coupling = thumb.at("distal_coupling").get<double>();
        g.thumb.rest_angle = thumb.at("rest_angle").get<double>();
        g.pad_offset = j.at("pad_offset").get<double>();
        if (g.pad_offset < 0.0) throw DataError("pad_offset must be non-negative");
        g.contact_tolerance = j.value("contact_tolerance", 0.05);
        g.grip_depth = j.value("grip_depth", 2.0);
        if (!(g.contact_tolerance > 0.0) || !(g.grip_depth > 0.0)) {
            throw DataError("contact_tolerance and grip_depth must be positive");
        }
        const auto ranges = j.at("servo_ranges").get<std::vector<std::vector<double>>>();
        if (ranges.size() != kJointCount) throw DataError(fmt::format("expected {} servo ranges", kJointCount));
        for (std::size_t i = 0; i < kJointCount; ++i) {
            if (ranges[i].size() != 2 || !(ranges[i][0] < ranges[i][1])) {
                throw DataError(fmt::format("servo range {} must be [min, max] with min < max", i + 1));
            }
            g.servo_ranges[i] = {ranges[i][0], ranges[i][1]};
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("bad geometry: {}", e.what()));
    }
}

HandGeometry load_geometry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open geometry {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return geometry_from_json(buffer.str());
}

std::array<double, 2> planar_chain(std::span<const double> links, std::span<const double> angles) {
    if (links.size() != angles.size()) throw KinematicsError("links and angles differ in length");
    std::array<double, 2> p{0.0, 0.0};
    double phi = 0.0;
    for (std::size_t k = 0; k < links.size(); ++k) {
        phi += angles[k];
        p[0] += links[k] * std::cos(phi);
        p[1] += links[k] * std::sin(phi);
    }
    return p;
}

HandPose forward_kinematics(const HandConfiguration& config, const HandGeometry& geometry) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
        const auto& range = geometry.servo_ranges[j];
        const double t = config.theta[j];
        if (!(t >= range.min - 1e-9 && t <= range.max + 1e-9)) {
            throw KinematicsError(
                fmt::format("joint {} angle {} outside servo range [{}, {}]", j + 1, t, range.min, range.max));
        }
    }
    HandPose pose;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& finger = geometry.fingers[k];
        const double mcp = config.theta[2 * k];
        const double pip = config.theta[2 * k + 1];
        const std::array<double, 3> angles = {mcp, pip, geometry.distal_coupling * pip};
        const auto end = planar_chain(finger.links, angles);
        const double phi = mcp + pip + angles[2];
        pose.tips[k + 1] = add(finger.base, {0.0, end[0], end[1]});
        pose.pads[k + 1] = add(pose.tips[k + 1], scale({0.0, -std::sin(phi), std::cos(phi)}, geometry.pad_offset));
    }

    // The thumb's plane holds the rest direction h and a flexion direction n
    // that opposition turns from across the palm toward +z.
    const auto& thumb = geometry.thumb;
    const double flex = config.theta[8];
    const double opposition = config.theta[9];
    const Vec3 h = {std::sin(thumb.rest_angle), std::cos(thumb.rest_angle), 0.0};
    const Vec3 across = {-std::cos(thumb.rest_angle), std::sin(thumb.rest_angle), 0.0};
    const Vec3 n = add(scale(across, std::cos(opposition)), {0.0, 0.0, std::sin(opposition)});
    const std::array<double, 2> angles = {flex, thumb.distal_coupling * flex};
    const auto end = planar_chain(thumb.links, angles);
    const double phi = angles[0] + angles[1];
    pose.tips[0] = add(thumb.base, add(scale(h, end[0]), scale(n, end[1])));
    const Vec3 normal = add(scale(h, -std::sin(phi)), scale(n, std::cos(phi)));
    pose.pads[0] = add(pose.tips[0], scale(normal, geometry.pad_offset));
    return pose;
}

Vec3 opposing_centroid(const std::array<Vec3, kFingerCount>& points, std::span<const Finger> participating) {
    Vec3 sum{0.0, 0.0, 0.0};
    std::size_t count = 0;
    for (auto finger : participating) {
        if (finger == Finger::thumb) continue;
        sum = add(sum, points[index_of(finger)]);
        ++count;
    }
    if (count == 0) throw KinematicsError("no opposing finger participates");
    return scale(sum, 1.0 / static_cast<double>(count));
}

double virtual_finger_distance(const HandPose& pose, std::span<const Finger> participating) {
    return distance(pose.tip(Finger::thumb), opposing_centroid(pose.tips, participating));
}

double pad_distance(const HandPose& pose, std::span<const Finger> participating) {
    return distance(pose.pad(Finger::thumb), opposing_centroid(pose.pads, participating));
}

}  // namespace dexgrasp::hand
