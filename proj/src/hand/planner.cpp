#include "dexgrasp/hand/planner.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::hand {
namespace {

double d_vf_at(double completion, const GraspTopology& topology, const HandGeometry& geometry) {
    return virtual_finger_distance(forward_kinematics(topology.at(completion), geometry), topology.participating);
}

// Root of d_vf(s) = target on [lo, hi], d_vf decreasing in s.
double bisect(double target, double lo, double hi, const GraspTopology& topology, const HandGeometry& geometry) {
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (d_vf_at(mid, topology, geometry) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double grasp_dimension_size(learner::GraspClass grasp, const kb::ObjectRecord& record) {
    const std::string_view dims = learner::to_string(learner::grasp_dim(grasp));
    double sum = 0.0;
    for (char letter : dims) {
        const std::size_t i = static_cast<std::size_t>(letter - 'a');
        const auto& value = record.features.dimension(i);
        if (!value) {
            throw PlanError(fmt::format("{} needs dimension {} of object {} ('{}')", learner::code(grasp), letter,
                                        record.id, record.label));
        }
        sum += *value;
    }
    return sum / static_cast<double>(dims.size());
}

double completion_for(double d_vf, const GraspTopology& topology, const HandGeometry& geometry) {
    const double open = d_vf_at(0.0, topology, geometry);
    const double closed = d_vf_at(1.0, topology, geometry);
    if (!(d_vf <= open && d_vf >= closed)) {
        throw PlanError(fmt::format("object dimension outside grasp envelope: {} needs d_vf {:.3f} cm, reachable "
                                    "[{:.3f}, {:.3f}]",
                                    learner::code(topology.grasp), d_vf, closed, open));
    }
    return bisect(d_vf, 0.0, 1.0, topology, geometry);
}

GraspPlan plan_grasp(learner::GraspClass grasp, const kb::ObjectRecord& record, const ClosureModel& closure,
                     const GraspTopology& topology, const HandGeometry& geometry, std::size_t steps) {
    if (steps < 2) throw PlanError(fmt::format("a plan needs at least two steps, got {}", steps));
    if (closure.grasp != grasp || topology.grasp != grasp) {
        throw PlanError(fmt::format("closure model or topology does not belong to {}", learner::code(grasp)));
    }
    GraspPlan plan;
    plan.grasp = grasp;
    plan.participating = topology.participating;
    plan.d_o = grasp_dimension_size(grasp, record);
    if (!closure.in_range(plan.d_o)) {
        throw PlanError(fmt::format("object dimension outside grasp envelope: {} d_o {:.3f} cm, valid [{:.3f}, {:.3f}]",
                                    learner::code(grasp), plan.d_o, closure.d_o_min, closure.d_o_max));
    }
    plan.d_vf = closure.d_vf(plan.d_o);
    plan.d_start = d_vf_at(0.0, topology, geometry);
    plan.alpha_star = completion_for(plan.d_vf, topology, geometry);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
        double completion = 0.0;
        if (k + 1 == steps) {
            completion = plan.alpha_star;
        } else if (k > 0) {
            const double target = plan.d_start + t * (plan.d_vf - plan.d_start);
            completion = bisect(target, 0.0, plan.alpha_star, topology, geometry);
        }
        const auto config = topology.at(completion);
        plan.time.push_back(t);
        plan.completion.push_back(completion);
        plan.alpha.push_back(plan.alpha_star > 0.0 ? completion / plan.alpha_star : t);
        plan.trajectory.push_back(config);
        plan.d_vf_profile.push_back(
            virtual_finger_distance(forward_kinematics(config, geometry), topology.participating));
    }
    return plan;
}

void write_plan_csv(std::ostream& out, const GraspPlan& plan) {
    out << 't';
    for (std::size_t j = 1; j <= kJointCount; ++j) out << ",theta_" << j;
    out << ",d_vf\n";
    for (std::size_t k = 0; k < plan.trajectory.size(); ++k) {
        out << fmt::format("{:.6f}", plan.time[k]);
        for (double theta : plan.trajectory[k].theta) out << fmt::format(",{:.6f}", theta);
        out << fmt::format(",{:.6f}\n", plan.d_vf_profile[k]);
    }
}

}  // namespace dexgrasp::hand
