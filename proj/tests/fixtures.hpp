#pragma once

#include <string>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/learner/grasp.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(DEXGRASP_DATA_DIR) + "/" + name; }

inline dexgrasp::kb::ObjectRecord record(int id, std::string label, double a, double b, double c, double mass,
                                         dexgrasp::kb::Shape shape, dexgrasp::kb::Texture texture,
                                         dexgrasp::kb::Fragility fragility, dexgrasp::kb::Material material,
                                         dexgrasp::kb::Rigidity rigidity) {
    dexgrasp::kb::ObjectRecord r;
    r.id = id;
    r.label = std::move(label);
    r.features.a = a;
    r.features.b = b;
    r.features.c = c;
    r.features.mass = mass;
    r.features.shape = shape;
    r.features.texture = texture;
    r.features.fragility = fragility;
    r.features.material = material;
    r.features.rigidity = rigidity;
    return r;
}

/// The ten-object knowledge base table, typed in by hand.
inline std::vector<dexgrasp::kb::ObjectRecord> kb_rows() {
    using namespace dexgrasp::kb;
    return {
        record(1, "calculator", 15.4, 7.9, 1.5, 116, Shape::thin, Texture::medium, Fragility::medium,
               Material::plastic, Rigidity::rigid),
        record(2, "water bottle", 21.5, 7.2, 7.2, 660, Shape::prism, Texture::smooth, Fragility::sturdy,
               Material::metal, Rigidity::rigid),
        record(3, "salt shaker", 8.2, 3.1, 3.1, 82, Shape::prism, Texture::smooth, Fragility::sturdy,
               Material::metal, Rigidity::rigid),
        record(4, "computer mouse", 10.6, 5.9, 2.5, 79, Shape::prism, Texture::medium, Fragility::medium,
               Material::plastic, Rigidity::rigid),
        record(5, "mini rubix cube", 3.0, 3.0, 3.0, 12, Shape::compact, Texture::smooth, Fragility::sturdy,
               Material::plastic, Rigidity::rigid),
        record(6, "wood wedge", 6.0, 3.0, 1.5, 11, Shape::prism, Texture::rough, Fragility::sturdy, Material::wood,
               Rigidity::rigid),
        record(7, "wood disk", 7.2, 7.2, 2.0, 60, Shape::compact, Texture::rough, Fragility::sturdy,
               Material::wood, Rigidity::rigid),
        record(8, "tennis ball", 6.4, 6.4, 6.4, 56, Shape::radial, Texture::rough, Fragility::medium,
               Material::fabric, Rigidity::squeezable),
        record(9, "stapler", 13.2, 6.8, 3.6, 151, Shape::prism, Texture::smooth, Fragility::sturdy,
               Material::plastic, Rigidity::rigid),
        record(10, "kitchen scale", 20, 20, 1.8, 830, Shape::thin, Texture::smooth, Fragility::sturdy,
               Material::glass, Rigidity::rigid),
    };
}

/// The ten grasp frequency rows typed in by hand, keyed by knowledge-base
/// id. Columns: rc.ab rc.bc rp.b rp.c wc.abc wh.bc wh.c wp.bc wt.c.
inline std::vector<dexgrasp::learner::GraspLabel> label_rows() {
    return {
        {1, {0, 0, 5, 2, 0, 0, 0, 0, 2}},   // calculator
        {2, {0, 1, 1, 2, 0, 5, 0, 0, 0}},   // water bottle
        {11, {0, 2, 5, 2, 0, 0, 0, 0, 0}},  // wood cylinder
        {12, {0, 0, 5, 2, 0, 0, 0, 0, 2}},  // cardboard box
        {5, {1, 4, 3, 1, 0, 0, 0, 0, 0}},   // mini rubik's cube
        {6, {0, 2, 4, 2, 0, 0, 0, 0, 1}},   // wood wedge
        {7, {4, 0, 2, 2, 0, 0, 0, 0, 1}},   // wood disk
        {8, {1, 1, 2, 1, 4, 0, 0, 0, 0}},   // tennis ball
        {13, {2, 4, 2, 1, 0, 0, 0, 0, 0}},  // wood piece
        {14, {5, 0, 2, 1, 0, 0, 0, 0, 1}},  // plastic cap
    };
}

}  // namespace fixtures
