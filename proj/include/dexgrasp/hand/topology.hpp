#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/learner/grasp.hpp"

namespace dexgrasp::hand {

/// Canonical pose pair for one grasp class. Closing moves the participating
/// fingers' joints along the straight joint-space line from `open_pose` to
/// `closed_pose`; other fingers hold `open_pose`.
struct GraspTopology {
    learner::GraspClass grasp = learner::GraspClass::rc_ab;
    HandConfiguration open_pose;
    HandConfiguration closed_pose;  ///< h_k
    std::vector<Finger> participating;
    /// Completion interval used when fitting the closure model.
    double range_min = 0.0;
    double range_max = 1.0;

    bool participates(Finger finger) const;

    /// open_pose + alpha * (closed_pose - open_pose) on participating joints.
    HandConfiguration at(double alpha) const;

    /// As at(), with each finger at its own completion (indexed by Finger).
    HandConfiguration at(const std::array<double, kFingerCount>& alphas) const;
};

class TopologyTable {
public:
    TopologyTable() = default;
    explicit TopologyTable(std::vector<GraspTopology> topologies);

    /// Throws PlanError for a class without a topology.
    const GraspTopology& get(learner::GraspClass grasp) const;
    bool contains(learner::GraspClass grasp) const { return table_.count(grasp) != 0; }
    std::size_t size() const { return table_.size(); }

private:
    std::map<learner::GraspClass, GraspTopology> table_;
};

/// Reads `{"topologies": [{"grasp", "participating", "open_pose",
/// "closed_pose", "operating_range"}, ...]}`. Poses must lie within the
/// servo ranges of `geometry`, and each topology needs the thumb and at
/// least one opposing finger. Throws DataError.
TopologyTable topologies_from_json(const std::string& text, const HandGeometry& geometry);
TopologyTable load_topologies(const std::filesystem::path& path, const HandGeometry& geometry);

}  // namespace dexgrasp::hand
