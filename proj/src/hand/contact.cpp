#include "dexgrasp/hand/contact.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::hand {
namespace {

constexpr double kScanStep = 0.002;

Vec3 sub(const Vec3& p, const Vec3& q) { return {p[0] - q[0], p[1] - q[1], p[2] - q[2]}; }
double dot(const Vec3& p, const Vec3& q) { return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]; }
Vec3 cross(const Vec3& p, const Vec3& q) {
    return {p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
}
Vec3 normalized(const Vec3& p) {
    const double n = std::sqrt(dot(p, p));
    return {p[0] / n, p[1] / n, p[2] / n};
}

double pad_signed_distance(Finger finger, double completion, const ObjectPrimitive& object,
                           const GraspTopology& topology, const HandGeometry& geometry) {
    std::array<double, kFingerCount> alphas{};
    alphas[index_of(finger)] = completion;
    return object.signed_distance(forward_kinematics(topology.at(alphas), geometry).pad(finger));
}

FingerContact close_finger(Finger finger, const ObjectPrimitive& object, const GraspTopology& topology,
                           const HandGeometry& geometry) {
    FingerContact result{finger, false, false, 1.0};
    const double tolerance = geometry.contact_tolerance;
    double previous = pad_signed_distance(finger, 0.0, object, topology, geometry);
    if (previous < -tolerance) {
        result.blocked = true;
        result.stop_alpha = 0.0;
        return result;
    }
    if (previous <= tolerance) {
        result.contact = true;
        result.stop_alpha = 0.0;
        return result;
    }
    double lo = 0.0;
    while (lo < 1.0) {
        const double hi = std::min(1.0, lo + kScanStep);
        const double current = pad_signed_distance(finger, hi, object, topology, geometry);
        if (current <= tolerance) {
            // Refine to the surface crossing; any point within tolerance stops the finger.
            double a = lo;
            double b = hi;
            while (b - a > 1e-9) {
                const double mid = 0.5 * (a + b);
                const double d = pad_signed_distance(finger, mid, object, topology, geometry);
                if (std::abs(d) <= tolerance * 0.5) {
                    a = b = mid;
                    break;
                }
                if (d > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            result.contact = true;
            result.stop_alpha = b;
            return result;
        }
        previous = current;
        lo = hi;
    }
    return result;
}

}  // namespace

double ObjectPrimitive::signed_distance(const Vec3& p) const {
    const Vec3 d = sub(p, center);
    if (shape == PrimitiveShape::sphere) return std::sqrt(dot(d, d)) - radius;
    Vec3 q{};
    for (std::size_t i = 0; i < 3; ++i) q[i] = std::abs(dot(d, axes[i])) - half_extents[i];
    const double inside = std::min(0.0, std::max({q[0], q[1], q[2]}));
    double outside = 0.0;
    for (double v : q) outside += std::max(0.0, v) * std::max(0.0, v);
    return std::sqrt(outside) + inside;
}

ObjectPrimitive ObjectPrimitive::sphere(const Vec3& center, double diameter) {
    ObjectPrimitive o;
    o.shape = PrimitiveShape::sphere;
    o.center = center;
    o.radius = 0.5 * diameter;
    return o;
}

ObjectPrimitive ObjectPrimitive::box(const Vec3& center, const std::array<Vec3, 3>& axes, const Vec3& extents) {
    ObjectPrimitive o;
    o.shape = PrimitiveShape::box;
    o.center = center;
    o.axes = axes;
    o.half_extents = {0.5 * extents[0], 0.5 * extents[1], 0.5 * extents[2]};
    return o;
}

GraspFrame grasp_frame(const GraspPlan& plan, const HandGeometry& geometry) {
    if (plan.trajectory.empty()) throw PlanError("plan has no trajectory");
    const auto pose = forward_kinematics(plan.trajectory.back(), geometry);
    const Vec3 thumb = pose.pad(Finger::thumb);
    const Vec3 fingers = opposing_centroid(pose.pads, plan.participating);
    GraspFrame frame;
    frame.center = {0.5 * (thumb[0] + fingers[0]), 0.5 * (thumb[1] + fingers[1]), 0.5 * (thumb[2] + fingers[2])};
    const Vec3 u = normalized(sub(fingers, thumb));
    const Vec3 x = {1.0, 0.0, 0.0};
    Vec3 lateral = sub(x, {u[0] * u[0], u[0] * u[1], u[0] * u[2]});
    if (dot(lateral, lateral) < 1e-12) lateral = cross(u, {0.0, 0.0, 1.0});
    lateral = normalized(lateral);
    frame.axes = {u, lateral, cross(u, lateral)};
    return frame;
}

ObjectPrimitive object_for_plan(const GraspPlan& plan, const kb::ObjectRecord& record, const GraspTopology& topology,
                                const HandGeometry& geometry) {
    const auto frame = grasp_frame(plan, geometry);
    const auto type = learner::grasp_type(plan.grasp);
    if (type == learner::GraspType::rc || type == learner::GraspType::wc) {
        return ObjectPrimitive::sphere(frame.center, plan.d_o);
    }

    const auto dims = learner::to_string(learner::grasp_dim(plan.grasp));
    std::vector<double> rest;
    for (std::size_t i = 0; i < 3; ++i) {
        if (dims.find(static_cast<char>('a' + i)) != std::string_view::npos) continue;
        const auto& value = record.features.dimension(i);
        rest.push_back(value ? *value : plan.d_o);
    }
    std::sort(rest.begin(), rest.end(), std::greater<>());
    const Vec3 extents = {plan.d_o, rest[0], rest.size() > 1 ? rest[1] : plan.d_o};

    const double slide_l = std::max(0.0, 0.5 * extents[1] - geometry.grip_depth);
    const double slide_w = std::max(0.0, 0.5 * extents[2] - geometry.grip_depth);
    const auto open = forward_kinematics(topology.at(0.0), geometry);
    ObjectPrimitive best;
    std::size_t best_inside = kFingerCount + 1;
    for (const auto& [sl, sw] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}}) {
        Vec3 center = frame.center;
        for (std::size_t k = 0; k < 3; ++k) {
            center[k] += sl * slide_l * frame.axes[1][k] + sw * slide_w * frame.axes[2][k];
        }
        auto candidate = ObjectPrimitive::box(center, frame.axes, extents);
        std::size_t inside = 0;
        for (auto finger : topology.participating) {
            if (candidate.signed_distance(open.pad(finger)) < -geometry.contact_tolerance) ++inside;
        }
        if (inside < best_inside) {
            best = candidate;
            best_inside = inside;
        }
        if (inside == 0) break;
    }
    return best;
}

const FingerContact* ContactReport::finger(Finger f) const {
    for (const auto& c : fingers) {
        if (c.finger == f) return &c;
    }
    return nullptr;
}

ContactReport simulate_contact(const GraspPlan& plan, const ObjectPrimitive& object, const GraspTopology& topology,
                               const HandGeometry& geometry) {
    ContactReport report;
    std::array<double, kFingerCount> stops{};
    std::optional<double> thumb;
    std::optional<double> opposing;
    for (auto finger : topology.participating) {
        const auto contact = close_finger(finger, object, topology, geometry);
        stops[index_of(finger)] = contact.blocked ? 0.0 : contact.stop_alpha;
        if (contact.contact) {
            if (finger == Finger::thumb) {
                thumb = contact.stop_alpha;
            } else {
                opposing = std::min(opposing.value_or(1.0), contact.stop_alpha);
            }
        }
        report.fingers.push_back(contact);
    }
    report.secured = thumb && opposing;
    if (report.secured) report.secured_alpha = std::max(*thumb, *opposing);
    report.final_config = topology.at(stops);
    report.final_d_vf =
        virtual_finger_distance(forward_kinematics(report.final_config, geometry), plan.participating);
    return report;
}

}  // namespace dexgrasp::hand
