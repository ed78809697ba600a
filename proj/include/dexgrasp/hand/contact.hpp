#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/hand/planner.hpp"
#include "dexgrasp/hand/topology.hpp"
#include "dexgrasp/kb/attributes.hpp"

namespace dexgrasp::hand {

enum class PrimitiveShape { box, sphere };

/// Box or sphere in the palm frame. Box `half_extents` run along `axes`.
struct ObjectPrimitive {
    PrimitiveShape shape = PrimitiveShape::sphere;
    Vec3 center{};
    std::array<Vec3, 3> axes = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    Vec3 half_extents{};
    double radius = 0.0;

    /// Negative inside, positive outside.
    double signed_distance(const Vec3& p) const;

    static ObjectPrimitive sphere(const Vec3& center, double diameter);
    static ObjectPrimitive box(const Vec3& center, const std::array<Vec3, 3>& axes, const Vec3& extents);
};

/// The grasp frame of a plan: centered between the thumb pad and the
/// opposing pad centroid at the contact pose, first axis pointing from the
/// thumb to the fingers, second axis closest to the palm's lateral axis.
struct GraspFrame {
    Vec3 center{};
    std::array<Vec3, 3> axes{};
};

GraspFrame grasp_frame(const GraspPlan& plan, const HandGeometry& geometry);

/// Object stand-in for a planned grasp. Circular grasps (rc, wc) hold a
/// sphere of diameter d_o centered at the grasp frame. Other grasps hold a
/// box with d_o along the grasp axis; the lateral axis takes the remaining
/// dimension (bc grasps) or the larger remaining one (single-dimension
/// grasps), and the third axis takes d_o or the smaller remaining one.
/// A box reaching more than `geometry.grip_depth` past the frame on an
/// axis is slid along that axis so the frame sits grip_depth inside its
/// edge, on the first side (+l+w, +l-w, -l+w, -l-w) where no participating
/// pad of the open pose starts inside it.
ObjectPrimitive object_for_plan(const GraspPlan& plan, const kb::ObjectRecord& record, const GraspTopology& topology,
                                const HandGeometry& geometry);

struct FingerContact {
    Finger finger = Finger::thumb;
    bool contact = false;
    /// The pad started inside the object, so the finger never closed on it.
    bool blocked = false;
    double stop_alpha = 1.0;  ///< topology completion where the finger halted
};

struct ContactReport {
    std::vector<FingerContact> fingers;  ///< participating fingers only
    bool secured = false;
    /// Completion at which the thumb and the first opposing finger both touch.
    std::optional<double> secured_alpha;
    HandConfiguration final_config;
    double final_d_vf = 0.0;

    const FingerContact* finger(Finger f) const;
};

/// Closes every participating finger along the plan's topology, past the
/// planned pose up to full closure, halting each one when its pad reaches
/// the object surface (within geometry.contact_tolerance). The grasp is
/// secured when the thumb and at least one opposing finger touch.
ContactReport simulate_contact(const GraspPlan& plan, const ObjectPrimitive& object, const GraspTopology& topology,
                               const HandGeometry& geometry);

}  // namespace dexgrasp::hand
