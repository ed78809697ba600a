#pragma once

#include <cstddef>
#include <vector>

#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/hand/topology.hpp"
#include "dexgrasp/learner/grasp.hpp"

namespace dexgrasp::hand {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws FitError for
/// fewer than two points, mismatched lengths or constant x or y.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// One closure sample: completion, contact pad distance (the object size
/// held) and tip-to-tip virtual finger distance.
struct ClosureSample {
    double alpha = 0.0;
    double d_o = 0.0;
    double d_vf = 0.0;
};

/// `samples` evenly spaced completions over the topology's operating range.
std::vector<ClosureSample> sample_closure(const GraspTopology& topology, const HandGeometry& geometry,
                                          std::size_t samples);

/// d_vf = w1 * d_o + w0 for one grasp class.
struct ClosureModel {
    learner::GraspClass grasp = learner::GraspClass::rc_ab;
    double w1 = 1.0;
    double w0 = 0.0;
    double d_o_min = 0.0;  ///< valid object sizes, cm
    double d_o_max = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;

    double d_vf(double d_o) const { return w1 * d_o + w0; }
    bool in_range(double d_o) const { return d_o >= d_o_min && d_o <= d_o_max; }
};

/// Samples the closure and fits d_vf against d_o. Throws FitError for
/// samples < 2, a degenerate sweep or a non-positive slope.
ClosureModel fit_closure_model(const GraspTopology& topology, const HandGeometry& geometry, std::size_t samples = 50);

}  // namespace dexgrasp::hand
