#ifndef CAT0_SERIALIZATION_HPP
#define CAT0_SERIALIZATION_HPP

#include <json.hpp>

#include "cat0/boundary_metrics.hpp"
#include "cat0/rescaling.hpp"
#include "cat0/space_models.hpp"

namespace cat0 {

using json = nlohmann::ordered_json;

/*
 * Space descriptions:
 *   {"kind": "euclidean", "dimension": 2}
 *   {"kind": "tree", "vertices": [...], "edges": [{"a", "b", "length"}], "basepoint": id}
 *   {"kind": "tree", "regular": k, "edge_length": 1}
 *   {"kind": "product", "left": space, "right": space}
 *   {"kind": "seaweed", "basepoint": {"r": 1, "theta": 0}}
 * All parse errors throw std::invalid_argument.
 */
SpaceModel space_from_json(const json& j);
json space_to_json(const SpaceModel& space);

/*
 * Ray descriptors:
 *   {"direction": [x, y]}, {"word": {"head": [...], "cycle": [...]}},
 *   {"leaf": vertex} (finite trees: the branch through the leaf),
 *   {"straight": theta}, {"spiral": "+"},
 *   {"product": {"left": ray, "right": ray, "a": a, "b": b}}
 */
GeodesicRay ray_from_json(const SpaceModel& space, const json& j);
json ray_to_json(const SpaceModel& space, const GeodesicRay& ray);

Point point_from_json(const SpaceModel& space, const json& j);
json point_to_json(const SpaceModel& space, const Point& p);

/// {"kind": "geometric", "base", "ratio"} | {"kind": "polynomial", "exponent"}
/// | {"kind": "explicit", "values": [...]}
ScaleSequence schedule_from_json(const json& j);
/// Prefix of the schedule: "count" entries, or every explicit value.
std::vector<double> schedule_prefix(const json& j);

json estimate_to_json(const ConvergenceEstimate& e);

}  // namespace cat0

#endif
