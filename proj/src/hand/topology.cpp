#include "dexgrasp/hand/topology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::hand {
namespace {

HandConfiguration read_pose(const nlohmann::json& j, const std::string& what) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != kJointCount) throw DataError(fmt::format("{} needs {} joint angles", what, kJointCount));
    HandConfiguration config;
    std::copy(v.begin(), v.end(), config.theta.begin());
    return config;
}

}  // namespace

bool GraspTopology::participates(Finger finger) const {
    return std::find(participating.begin(), participating.end(), finger) != participating.end();
}

HandConfiguration GraspTopology::at(double alpha) const {
    std::array<double, kFingerCount> alphas;
    alphas.fill(alpha);
    return at(alphas);
}

HandConfiguration GraspTopology::at(const std::array<double, kFingerCount>& alphas) const {
    HandConfiguration config = open_pose;
    for (auto finger : participating) {
        const double alpha = alphas[index_of(finger)];
        for (auto j : joints_of(finger)) {
            config.theta[j] = open_pose.theta[j] + alpha * (closed_pose.theta[j] - open_pose.theta[j]);
        }
    }
    return config;
}

TopologyTable::TopologyTable(std::vector<GraspTopology> topologies) {
    for (auto& t : topologies) {
        const auto grasp = t.grasp;
        if (!table_.emplace(grasp, std::move(t)).second) {
            throw DataError(fmt::format("duplicate topology for {}", learner::code(grasp)));
        }
    }
}

const GraspTopology& TopologyTable::get(learner::GraspClass grasp) const {
    const auto it = table_.find(grasp);
    if (it == table_.end()) throw PlanError(fmt::format("no topology for {}", learner::code(grasp)));
    return it->second;
}

TopologyTable topologies_from_json(const std::string& text, const HandGeometry& geometry) {
    std::vector<GraspTopology> topologies;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& item : j.at("topologies")) {
            GraspTopology t;
            const auto name = item.at("grasp").get<std::string>();
            const auto grasp = learner::parse_grasp_class(name);
            if (!grasp) throw DataError(fmt::format("unknown grasp class '{}'", name));
            t.grasp = *grasp;
            t.open_pose = read_pose(item.at("open_pose"), name + " open_pose");
            t.closed_pose = read_pose(item.at("closed_pose"), name + " closed_pose");
            for (const auto& f : item.at("participating")) {
                const auto finger = parse_finger(f.get<std::string>());
                if (!finger) throw DataError(fmt::format("{}: unknown finger '{}'", name, f.get<std::string>()));
                if (!t.participates(*finger)) t.participating.push_back(*finger);
            }
            if (!t.participates(Finger::thumb) || t.participating.size() < 2) {
                throw DataError(fmt::format("{}: needs the thumb and an opposing finger", name));
            }
            if (item.contains("operating_range")) {
                const auto range = item.at("operating_range").get<std::vector<double>>();
                if (range.size() != 2 || !(0.0 <= range[0] && range[0] < range[1] && range[1] <= 1.0)) {
                    throw DataError(fmt::format("{}: operating_range must satisfy 0 <= lo < hi <= 1", name));
                }
                t.range_min = range[0];
                t.range_max = range[1];
            }
            if (!geometry.within_limits(t.open_pose) || !geometry.within_limits(t.closed_pose)) {
                throw DataError(fmt::format("{}: pose outside servo ranges", name));
            }
            topologies.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("bad topology table: {}", e.what()));
    }
    return TopologyTable(std::move(topologies));
}

TopologyTable load_topologies(const std::filesystem::path& path, const HandGeometry& geometry) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open topology table {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return topologies_from_json(buffer.str(), geometry);
}

}  // namespace dexgrasp::hand
