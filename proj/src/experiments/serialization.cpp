#include "cat0/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cat0 {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw std::invalid_argument(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number()) {
        throw std::invalid_argument(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

std::vector<EdgeId> letters(const json& j) {
    if (!j.is_array()) {
        throw std::invalid_argument("edge word letters must be an array");
    }
    std::vector<EdgeId> out;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw std::invalid_argument("edge ids must be non-negative integers");
        }
        out.push_back(v.get<EdgeId>());
    }
    return out;
}

json word_to_json(const EdgeWord& w) {
    json j{{"head", w.head()}, {"cycle", w.cycle()}};
    if (!w.is_infinite()) {
        j["size"] = w.size();
    }
    return j;
}

EdgeWord word_from_json(const json& j) {
    auto head = letters(field(j, "head"));
    auto cycle = j.contains("cycle") ? letters(j.at("cycle")) : std::vector<EdgeId>{};
    if (j.contains("size")) {
        return EdgeWord(std::move(head), std::move(cycle), j.at("size").get<std::size_t>());
    }
    if (cycle.empty()) {
        const auto n = head.size();
        return EdgeWord(std::move(head), {}, n);
    }
    return EdgeWord(std::move(head), std::move(cycle));
}

}  // namespace

SpaceModel space_from_json(const json& j) {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "euclidean") {
        return SpaceModel::euclidean(j.value("dimension", 2));
    }
    if (kind == "tree") {
        if (j.contains("regular")) {
            return SpaceModel::tree(MetricTree::regular(j.at("regular").get<std::size_t>(),
                                                        number_or(j, "edge_length", 1.0)));
        }
        std::vector<std::string> vertices;
        for (const auto& v : field(j, "vertices")) {
            vertices.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        std::vector<TreeEdgeSpec> edges;
        for (const auto& e : field(j, "edges")) {
            auto name = [&](const char* key) {
                const auto& v = field(e, key);
                return v.is_string() ? v.get<std::string>() : v.dump();
            };
            edges.push_back(TreeEdgeSpec{name("a"), name("b"), number(e, "length")});
        }
        const auto& base = field(j, "basepoint");
        return SpaceModel::tree(MetricTree::from_edges(vertices, edges,
                                                       base.is_string() ? base.get<std::string>() : base.dump(),
                                                       number_or(j, "hair_length", 1.0)));
    }
    if (kind == "product") {
        return SpaceModel::product(space_from_json(field(j, "left")), space_from_json(field(j, "right")));
    }
    if (kind == "seaweed") {
        SeaweedPoint base{1.0, 0.0};
        if (j.contains("basepoint")) {
            base = SeaweedPoint{number(j.at("basepoint"), "r"), number(j.at("basepoint"), "theta")};
        }
        return SpaceModel::seaweed(base);
    }
    throw std::invalid_argument("unknown space kind '" + kind + "'");
}

json space_to_json(const SpaceModel& space) {
    if (space.is_euclidean()) {
        return json{{"kind", "euclidean"}, {"dimension", space.dimension()}};
    }
    if (space.is_product()) {
        return json{{"kind", "product"}, {"left", space_to_json(space.left())},
                    {"right", space_to_json(space.right())}};
    }
    if (space.is_seaweed()) {
        const auto& b = std::get<SeaweedPoint>(space.basepoint().value);
        return json{{"kind", "seaweed"}, {"basepoint", {{"r", b.r}, {"theta", b.theta}}}};
    }
    const auto& tree = space.metric_tree();
    if (tree.hair_edges().empty() && tree.type_count() == 1) {
        return json{{"kind", "tree"}, {"regular", tree.edge_count()}, {"edge_length", tree.edge(0).length}};
    }
    json edges = json::array();
    double hair = 1.0;
    for (EdgeId e = 0; e < tree.edge_count(); ++e) {
        const auto& edge = tree.edge(e);
        if (std::find(tree.hair_edges().begin(), tree.hair_edges().end(), e) != tree.hair_edges().end()) {
            hair = edge.length;
            continue;
        }
        edges.push_back({{"a", tree.type_names()[edge.tail]}, {"b", tree.type_names()[edge.head]},
                         {"length", edge.length}});
    }
    json out{{"kind", "tree"}, {"vertices", tree.type_names()}, {"edges", edges},
             {"basepoint", tree.type_names()[tree.root_type()]}};
    if (hair != 1.0) {
        out["hair_length"] = hair;
    }
    return out;
}

GeodesicRay ray_from_json(const SpaceModel& space, const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("ray descriptor must be an object");
    }
    GeodesicRay ray;
    if (j.contains("direction")) {
        const auto v = j.at("direction").get<std::vector<double>>();
        ray = GeodesicRay::euclidean(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    } else if (j.contains("word")) {
        ray = GeodesicRay::tree(word_from_json(j.at("word")));
    } else if (j.contains("leaf")) {
        if (!space.is_tree()) {
            throw std::invalid_argument("leaf rays need a tree model");
        }
        const auto& tree = space.metric_tree();
        const auto& leaf = j.at("leaf");
        const auto name = leaf.is_string() ? leaf.get<std::string>() : leaf.dump();
        const auto rays = tree.hair_rays();
        bool found = false;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (tree.type_names()[tree.edge(tree.hair_edges()[i]).tail] == name) {
                ray = GeodesicRay::tree(rays[i]);
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("no leaf named '" + name + "'");
        }
    } else if (j.contains("straight")) {
        ray = GeodesicRay::straight(j.at("straight").get<double>());
    } else if (j.contains("spiral")) {
        const auto sign = j.at("spiral").get<std::string>();
        if (sign != "+" && sign != "-") {
            throw std::invalid_argument("spiral sign must be \"+\" or \"-\"");
        }
        ray = GeodesicRay::spiral(sign == "+" ? 1 : -1);
    } else if (j.contains("product")) {
        if (!space.is_product()) {
            throw std::invalid_argument("product rays need a product model");
        }
        const auto& p = j.at("product");
        ray = GeodesicRay::product(ray_from_json(space.left(), field(p, "left")),
                                   ray_from_json(space.right(), field(p, "right")), number(p, "a"),
                                   number(p, "b"));
    } else {
        throw std::invalid_argument("unrecognized ray descriptor");
    }
    validate_ray(space, ray);
    return ray;
}

json ray_to_json(const SpaceModel& space, const GeodesicRay& ray) {
    if (space.is_euclidean()) {
        const auto& d = std::get<EuclideanRay>(ray.value).direction;
        return json{{"direction", std::vector<double>(d.data(), d.data() + d.size())}};
    }
    if (space.is_tree()) {
        return json{{"word", word_to_json(std::get<TreeRay>(ray.value).word)}};
    }
    if (space.is_product()) {
        const auto& p = std::get<ProductRay>(ray.value);
        return json{{"product",
                     {{"left", ray_to_json(space.left(), *p.left)},
                      {"right", ray_to_json(space.right(), *p.right)},
                      {"a", p.a},
                      {"b", p.b}}}};
    }
    const auto& s = std::get<SeaweedRay>(ray.value);
    if (s.kind == SeaweedRay::Kind::spiral) {
        return json{{"spiral", s.sign > 0 ? "+" : "-"}};
    }
    return json{{"straight", s.theta}};
}

Point point_from_json(const SpaceModel& space, const json& j) {
    Point p;
    if (space.is_euclidean()) {
        const auto v = j.get<std::vector<double>>();
        p = Point(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
    } else if (space.is_tree()) {
        p = Point(TreePoint{word_from_json(field(j, "word")), number(j, "offset")});
    } else if (space.is_product()) {
        p = make_product_point(point_from_json(space.left(), field(j, "left")),
                               point_from_json(space.right(), field(j, "right")));
    } else {
        p = Point(SeaweedPoint{number(j, "r"), number(j, "theta")});
    }
    validate_point(space, p);
    return canonical_point(space, p);
}

json point_to_json(const SpaceModel& space, const Point& p) {
    if (space.is_euclidean()) {
        const auto& v = std::get<Eigen::VectorXd>(p.value);
        return json(std::vector<double>(v.data(), v.data() + v.size()));
    }
    if (space.is_tree()) {
        const auto& t = std::get<TreePoint>(p.value);
        return json{{"word", word_to_json(t.word)}, {"offset", t.offset}};
    }
    if (space.is_product()) {
        const auto& q = std::get<ProductPoint>(p.value);
        return json{{"left", point_to_json(space.left(), *q.left)}, {"right", point_to_json(space.right(), *q.right)}};
    }
    const auto& s = std::get<SeaweedPoint>(p.value);
    return json{{"r", s.r}, {"theta", s.theta}};
}

ScaleSequence schedule_from_json(const json& j) {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "geometric") {
        return ScaleSequence::geometric(number_or(j, "base", 1.0), number(j, "ratio"));
    }
    if (kind == "polynomial") {
        return ScaleSequence::polynomial(number(j, "exponent"), number_or(j, "coefficient", 1.0));
    }
    if (kind == "explicit") {
        return ScaleSequence::from_values(field(j, "values").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown schedule kind '" + kind + "'");
}

std::vector<double> schedule_prefix(const json& j) {
    const auto seq = schedule_from_json(j);
    std::size_t count = 0;
    if (seq.size()) {
        count = *seq.size();
    } else {
        if (!j.contains("count")) {
            throw std::invalid_argument("schedule needs a 'count' for its evaluated prefix");
        }
        count = j.at("count").get<std::size_t>();
    }
    if (count == 0) {
        throw std::invalid_argument("schedule prefix is empty");
    }
    return seq.prefix(count);
}

json estimate_to_json(const ConvergenceEstimate& e) {
    json increments = json::array();
    for (std::size_t i = 1; i < e.values.size(); ++i) {
        increments.push_back(e.values[i] - e.values[i - 1]);
    }
    return json{{"value", e.value},
                {"last_increment", e.last_increment},
                {"status", to_string(e.status)},
                {"scales", e.scales},
                {"values", e.values},
                {"increments", increments}};
}

}  // namespace cat0
