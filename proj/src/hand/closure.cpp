#include "dexgrasp/hand/closure.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::hand {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw FitError(fmt::format("{} x values but {} y values", x.size(), y.size()));
    if (x.size() < 2) throw FitError("need at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw FitError("samples have constant x");
    if (syy == 0.0) throw FitError("samples have constant y");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = 1.0 - ss_res / syy;
    return fit;
}

std::vector<ClosureSample> sample_closure(const GraspTopology& topology, const HandGeometry& geometry,
                                          std::size_t samples) {
    if (samples < 2) throw FitError(fmt::format("need at least two samples, got {}", samples));
    std::vector<ClosureSample> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
        const double alpha = topology.range_min + t * (topology.range_max - topology.range_min);
        const auto pose = forward_kinematics(topology.at(alpha), geometry);
        out.push_back({alpha, pad_distance(pose, topology.participating),
                       virtual_finger_distance(pose, topology.participating)});
    }
    return out;
}

ClosureModel fit_closure_model(const GraspTopology& topology, const HandGeometry& geometry, std::size_t samples) {
    const auto sweep = sample_closure(topology, geometry, samples);
    std::vector<double> d_o;
    std::vector<double> d_vf;
    for (const auto& s : sweep) {
        d_o.push_back(s.d_o);
        d_vf.push_back(s.d_vf);
    }
    const auto fit = fit_line(d_o, d_vf);
    if (!(fit.slope > 0.0)) {
        throw FitError(fmt::format("{}: closure slope {} is not positive", learner::code(topology.grasp), fit.slope));
    }
    ClosureModel model;
    model.grasp = topology.grasp;
    model.w1 = fit.slope;
    model.w0 = fit.intercept;
    model.r2 = fit.r2;
    model.samples = samples;
    model.d_o_min = *std::min_element(d_o.begin(), d_o.end());
    model.d_o_max = *std::max_element(d_o.begin(), d_o.end());
    return model;
}

}  // namespace dexgrasp::hand
