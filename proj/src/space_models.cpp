#include "cat0/space_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cat0/errors.hpp"

namespace cat0 {

namespace {

template <class T>
const T& expect(const Point& p, const char* model) {
    const T* value = std::get_if<T>(&p.value);
    if (value == nullptr) {
        throw std::invalid_argument(std::string("point does not belong to the ") + model + " model");
    }
    return *value;
}

}  // namespace

Point make_product_point(Point left, Point right) {
    return Point(ProductPoint{std::make_shared<const Point>(std::move(left)),
                              std::make_shared<const Point>(std::move(right))});
}

SpaceModel SpaceModel::euclidean(int dimension) {
    if (dimension < 1) {
        throw std::invalid_argument("euclidean: dimension must be positive");
    }
    return SpaceModel(EuclideanSpace{dimension}, Point(Eigen::VectorXd::Zero(dimension)));
}

SpaceModel SpaceModel::tree(MetricTree tree) {
    TreePoint root{EdgeWord({}, {}, 0), 0.0};
    return SpaceModel(std::make_shared<const MetricTree>(std::move(tree)), Point(std::move(root)));
}

SpaceModel SpaceModel::product(SpaceModel left, SpaceModel right) {
    Point base = make_product_point(left.basepoint(), right.basepoint());
    return SpaceModel(ProductSpace{std::make_shared<const SpaceModel>(std::move(left)),
                                   std::make_shared<const SpaceModel>(std::move(right))},
                      std::move(base));
}

SpaceModel SpaceModel::seaweed(SeaweedPoint basepoint) {
    seaweed::validate(basepoint);
    return SpaceModel(SeaweedCover{basepoint}, Point(basepoint));
}

std::string SpaceModel::name() const {
    if (is_euclidean()) {
        return "euclidean" + std::to_string(dimension());
    }
    if (is_tree()) {
        return "tree";
    }
    if (is_product()) {
        return "product(" + left().name() + "," + right().name() + ")";
    }
    return "seaweed";
}

int SpaceModel::dimension() const {
    return std::get<EuclideanSpace>(kind_).dimension;
}

const MetricTree& SpaceModel::metric_tree() const {
    return *std::get<std::shared_ptr<const MetricTree>>(kind_);
}

const SpaceModel& SpaceModel::left() const {
    return *std::get<ProductSpace>(kind_).left;
}

const SpaceModel& SpaceModel::right() const {
    return *std::get<ProductSpace>(kind_).right;
}

namespace tree_geometry {

double depth(const MetricTree& tree, const TreePoint& p) {
    if (p.word.empty()) {
        return 0.0;
    }
    return tree.prefix_depth(p.word, p.word.size() - 1) + p.offset;
}

TreePoint at_depth(const MetricTree& tree, const EdgeWord& word, double depth) {
    if (!(depth > 0.0)) {
        return TreePoint{word.truncated(0), 0.0};
    }
    if (!word.is_infinite()) {
        const double total = tree.prefix_depth(word, word.size());
        if (depth >= total) {
            if (word.empty()) {
                return TreePoint{word, 0.0};
            }
            return TreePoint{word, tree.edge(word[word.size() - 1]).length};
        }
    }
    const std::size_t n = tree.edges_to_reach(word, depth);
    const double length = tree.edge(word[n - 1]).length;
    const double offset = depth - tree.prefix_depth(word, n - 1);
    if (offset <= 0.0) {
        // rounding put us on the tail vertex
        if (n == 1) {
            return TreePoint{word.truncated(0), 0.0};
        }
        return TreePoint{word.truncated(n - 1), tree.edge(word[n - 2]).length};
    }
    return TreePoint{word.truncated(n), std::min(offset, length)};
}

double meet_depth(const MetricTree& tree, const TreePoint& p, const TreePoint& q) {
    const std::size_t np = p.word.size();
    const std::size_t nq = q.word.size();
    const std::size_t k = EdgeWord::common_prefix(p.word, q.word);
    if (k == np && k == nq) {
        return std::min(depth(tree, p), depth(tree, q));
    }
    if (k == np) {
        return depth(tree, p);
    }
    if (k == nq) {
        return depth(tree, q);
    }
    return tree.prefix_depth(p.word, k);
}

}  // namespace tree_geometry

void validate_point(const SpaceModel& space, const Point& p) {
    if (space.is_euclidean()) {
        const auto& v = expect<Eigen::VectorXd>(p, "euclidean");
        if (v.size() != space.dimension()) {
            throw std::invalid_argument("euclidean: point has wrong dimension");
        }
        if (!v.allFinite()) {
            throw std::invalid_argument("euclidean: non-finite coordinates");
        }
    } else if (space.is_tree()) {
        const auto& tp = expect<TreePoint>(p, "tree");
        const auto& tree = space.metric_tree();
        tree.validate_word(tp.word);
        if (tp.word.is_infinite()) {
            throw std::invalid_argument("tree: a point needs a finite word");
        }
        if (tp.word.empty()) {
            if (tp.offset != 0.0) {
                throw std::invalid_argument("tree: the root has offset 0");
            }
            return;
        }
        const double length = tree.edge(tp.word[tp.word.size() - 1]).length;
        if (!(tp.offset >= 0.0 && tp.offset <= length)) {
            throw std::invalid_argument("tree: offset outside [0, edge length]");
        }
    } else if (space.is_product()) {
        const auto& pp = expect<ProductPoint>(p, "product");
        if (!pp.left || !pp.right) {
            throw std::invalid_argument("product: missing component");
        }
        validate_point(space.left(), *pp.left);
        validate_point(space.right(), *pp.right);
    } else {
        seaweed::validate(expect<SeaweedPoint>(p, "seaweed"));
    }
}

Point canonical_point(const SpaceModel& space, const Point& p) {
    if (space.is_tree()) {
        const auto& tp = expect<TreePoint>(p, "tree");
        if (tp.word.empty() || tp.offset > 0.0) {
            return p;
        }
        const auto n = tp.word.size();
        if (n == 1) {
            return Point(TreePoint{tp.word.truncated(0), 0.0});
        }
        const double length = space.metric_tree().edge(tp.word[n - 2]).length;
        return Point(TreePoint{tp.word.truncated(n - 1), length});
    }
    if (space.is_product()) {
        const auto& pp = expect<ProductPoint>(p, "product");
        return make_product_point(canonical_point(space.left(), *pp.left),
                                  canonical_point(space.right(), *pp.right));
    }
    return p;
}

double distance(const SpaceModel& space, const Point& p, const Point& q) {
    if (space.is_euclidean()) {
        return (expect<Eigen::VectorXd>(p, "euclidean") - expect<Eigen::VectorXd>(q, "euclidean")).norm();
    }
    if (space.is_tree()) {
        const auto& tree = space.metric_tree();
        const auto& a = expect<TreePoint>(p, "tree");
        const auto& b = expect<TreePoint>(q, "tree");
        const double meet = tree_geometry::meet_depth(tree, a, b);
        return std::max(0.0, tree_geometry::depth(tree, a) + tree_geometry::depth(tree, b) - 2.0 * meet);
    }
    if (space.is_product()) {
        const auto& a = expect<ProductPoint>(p, "product");
        const auto& b = expect<ProductPoint>(q, "product");
        return std::hypot(distance(space.left(), *a.left, *b.left),
                          distance(space.right(), *a.right, *b.right));
    }
    return seaweed::distance(expect<SeaweedPoint>(p, "seaweed"), expect<SeaweedPoint>(q, "seaweed"));
}

Point geodesic_eval(const SpaceModel& space, const Point& p, const Point& q, double t) {
    const double total = distance(space, p, q);
    if (!(t >= 0.0) || t > total * (1.0 + 1e-12) + 1e-12) {
        throw std::out_of_range("geodesic parameter outside [0, d(p, q)]");
    }
    t = std::min(t, total);
    if (t == 0.0) {
        return p;
    }
    if (t == total) {
        return q;
    }
    if (space.is_euclidean()) {
        const auto& a = expect<Eigen::VectorXd>(p, "euclidean");
        const auto& b = expect<Eigen::VectorXd>(q, "euclidean");
        return Point(Eigen::VectorXd(a + (t / total) * (b - a)));
    }
    if (space.is_tree()) {
        const auto& tree = space.metric_tree();
        const auto& a = expect<TreePoint>(p, "tree");
        const auto& b = expect<TreePoint>(q, "tree");
        const double meet = tree_geometry::meet_depth(tree, a, b);
        const double da = tree_geometry::depth(tree, a);
        const double up = da - meet;
        if (t <= up) {
            return Point(tree_geometry::at_depth(tree, a.word, da - t));
        }
        return Point(tree_geometry::at_depth(tree, b.word, meet + (t - up)));
    }
    if (space.is_product()) {
        const auto& a = expect<ProductPoint>(p, "product");
        const auto& b = expect<ProductPoint>(q, "product");
        const double d1 = distance(space.left(), *a.left, *b.left);
        const double d2 = distance(space.right(), *a.right, *b.right);
        const double s = t / total;
        return make_product_point(geodesic_eval(space.left(), *a.left, *b.left, std::min(d1, s * d1)),
                                  geodesic_eval(space.right(), *a.right, *b.right, std::min(d2, s * d2)));
    }
    return Point(seaweed::geodesic(expect<SeaweedPoint>(p, "seaweed"),
                                   expect<SeaweedPoint>(q, "seaweed"), t));
}

double comparison_angle(const SpaceModel& space, const Point& x, const Point& y, const Point& z) {
    double a = distance(space, x, y);
    double b = distance(space, x, z);
    double c = distance(space, y, z);
    if (a == 0.0 || b == 0.0) {
        throw PreconditionError("comparison angle: degenerate triangle (y = x or z = x)");
    }
    const double scale = std::max({a, b, c});
    a /= scale;
    b /= scale;
    c /= scale;
    const double cosine = (a * a + b * b - c * c) / (2.0 * a * b);
    if (std::abs(cosine) > 1.0 + 1e-12) {
        throw std::domain_error("comparison angle: law-of-cosines argument outside [-1, 1]");
    }
    return std::acos(std::clamp(cosine, -1.0, 1.0));
}

Point retraction_xi(const SpaceModel& space, const Point& x, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("retraction: negative radius");
    }
    const double reach = distance(space, space.basepoint(), x);
    if (t >= reach) {
        return x;
    }
    return geodesic_eval(space, space.basepoint(), x, t);
}

bool same_point(const SpaceModel& space, const Point& p, const Point& q, double tolerance) {
    return distance(space, p, q) <= tolerance;
}

}  // namespace cat0
