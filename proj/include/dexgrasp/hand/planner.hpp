#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "dexgrasp/hand/closure.hpp"
#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/hand/topology.hpp"
#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/learner/grasp.hpp"

namespace dexgrasp::hand {

/// Object size across which `grasp` closes: the named dimension, or the
/// mean of the named dimensions for ab, bc, ac and abc. Throws PlanError
/// when a needed dimension is missing.
double grasp_dimension_size(learner::GraspClass grasp, const kb::ObjectRecord& record);

struct GraspPlan {
    learner::GraspClass grasp = learner::GraspClass::rc_ab;
    std::vector<Finger> participating;
    double d_o = 0.0;         ///< object size, cm
    double d_vf = 0.0;        ///< target virtual finger distance, cm
    double d_start = 0.0;     ///< virtual finger distance at the open pose
    double alpha_star = 0.0;  ///< topology completion at the contact pose

    /// Per-sample values over normalized time [0, 1]. `alpha` rises from 0
    /// to 1 and `completion` = alpha * alpha_star is the joint-space
    /// fraction between the open and closed topology poses.
    std::vector<double> time;
    std::vector<double> alpha;
    std::vector<double> completion;
    std::vector<HandConfiguration> trajectory;
    std::vector<double> d_vf_profile;  ///< FK virtual finger distance per sample
};

/// Completion in [0, 1] at which the topology's virtual finger distance
/// equals `d_vf`. Throws PlanError when no completion reaches it.
double completion_for(double d_vf, const GraspTopology& topology, const HandGeometry& geometry);

/// Plans a straight-line closure from the open pose to d_vf = w1 * d_o + w0.
/// The time profile keeps the virtual finger distance linear in time.
/// Throws PlanError "object dimension outside grasp envelope" when d_o is
/// outside the closure model's range or unreachable, and for steps < 2 or
/// mismatched classes.
GraspPlan plan_grasp(learner::GraspClass grasp, const kb::ObjectRecord& record, const ClosureModel& closure,
                     const GraspTopology& topology, const HandGeometry& geometry, std::size_t steps = 50);

/// CSV `t,theta_1,...,theta_10,d_vf`, one row per trajectory sample.
void write_plan_csv(std::ostream& out, const GraspPlan& plan);

}  // namespace dexgrasp::hand
