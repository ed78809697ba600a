#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dexgrasp::hand {

inline constexpr std::size_t kJointCount = 10;

enum class Finger { thumb, index, middle, ring, little };

inline constexpr std::size_t kFingerCount = 5;

inline constexpr std::array<Finger, kFingerCount> kAllFingers = {Finger::thumb, Finger::index, Finger::middle,
                                                                 Finger::ring, Finger::little};

constexpr std::size_t index_of(Finger finger) { return static_cast<std::size_t>(finger); }

std::string_view to_string(Finger finger);
std::optional<Finger> parse_finger(std::string_view name);

/// Servo indices driven by `finger`. Each finger has an MCP servo and a
/// PIP servo that also drives the DIP joint (0-7, index first); the thumb
/// owns flexion (8) and opposition (9).
std::vector<std::size_t> joints_of(Finger finger);

using Vec3 = std::array<double, 3>;

double distance(const Vec3& p, const Vec3& q);

/// Joint angles in radians, indexed by servo.
struct HandConfiguration {
    std::array<double, kJointCount> theta{};

    friend bool operator==(const HandConfiguration&, const HandConfiguration&) = default;
};

struct ServoRange {
    double min = 0.0;
    double max = 0.0;
};

/// A finger flexes in the plane spanned by the palm's distal (y) and
/// palmar (z) axes, starting from its base.
struct FingerGeometry {
    Vec3 base{};
    std::array<double, 3> links{};  ///< proximal, middle, distal (cm)
};

/// The thumb is a 2-link chain. At rest it points along
/// (sin rest_angle, cos rest_angle, 0); opposition turns its flexion
/// direction from across the palm toward the palmar axis.
struct ThumbGeometry {
    Vec3 base{};
    std::array<double, 2> links{};
    double distal_coupling = 1.0;  ///< IP angle per unit flexion servo angle
    double rest_angle = 0.0;
};

/// Palm frame: x lateral toward the thumb, y distal, z palmar. Lengths in cm.
struct HandGeometry {
    std::array<FingerGeometry, 4> fingers{};  ///< index, middle, ring, little
    double distal_coupling = 1.0;             ///< DIP angle per unit PIP angle
    ThumbGeometry thumb;
    /// Contact points sit this far from the tip along the distal pad normal.
    double pad_offset = 0.0;
    std::array<ServoRange, kJointCount> servo_ranges{};
    double contact_tolerance = 0.05;
    /// How far inside a large object's edge the grasp is taken.
    double grip_depth = 2.0;

    bool within_limits(const HandConfiguration& config, double slack = 1e-9) const;
};

/// Reads the geometry table; throws DataError on a malformed document.
HandGeometry geometry_from_json(const std::string& text);
HandGeometry load_geometry(const std::filesystem::path& path);

/// Planar serial chain starting at the origin along +x; each angle is
/// relative to the previous link and turns toward +y. Returns the end point.
std::array<double, 2> planar_chain(std::span<const double> links, std::span<const double> angles);

struct HandPose {
    std::array<Vec3, kFingerCount> tips{};
    std::array<Vec3, kFingerCount> pads{};

    const Vec3& tip(Finger finger) const { return tips[index_of(finger)]; }
    const Vec3& pad(Finger finger) const { return pads[index_of(finger)]; }
};

/// Throws KinematicsError when a joint is outside its servo range.
HandPose forward_kinematics(const HandConfiguration& config, const HandGeometry& geometry);

/// Thumb tip to the centroid of the participating non-thumb tips.
/// Throws KinematicsError when no opposing finger is listed.
double virtual_finger_distance(const HandPose& pose, std::span<const Finger> participating);

/// The same measure between contact pads: the object size held at this pose.
double pad_distance(const HandPose& pose, std::span<const Finger> participating);

Vec3 opposing_centroid(const std::array<Vec3, kFingerCount>& points, std::span<const Finger> participating);

}  // namespace dexgrasp::hand
