#ifndef CAT0_SPACE_MODELS_HPP
#define CAT0_SPACE_MODELS_HPP

#include <memory>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "cat0/metric_tree.hpp"
#include "cat0/seaweed.hpp"

namespace cat0 {

struct Point;

/// Tree point: path from the root and an offset in (0, length] on its last
/// edge. The root is the empty word with offset 0.
struct TreePoint {
    EdgeWord word;
    double offset = 0.0;
};

struct ProductPoint {
    std::shared_ptr<const Point> left;
    std::shared_ptr<const Point> right;
};

struct Point {
    std::variant<Eigen::VectorXd, TreePoint, ProductPoint, SeaweedPoint> value;

    Point() = default;
    Point(Eigen::VectorXd v) : value(std::move(v)) {}
    Point(TreePoint p) : value(std::move(p)) {}
    Point(ProductPoint p) : value(std::move(p)) {}
    Point(SeaweedPoint p) : value(p) {}
};

Point make_product_point(Point left, Point right);

class SpaceModel;

struct EuclideanSpace {
    int dimension = 2;
};

struct ProductSpace {
    std::shared_ptr<const SpaceModel> left;
    std::shared_ptr<const SpaceModel> right;
};

struct SeaweedCover {
    SeaweedPoint basepoint{1.0, 0.0};
};

/*
 * One of the four model CAT(0) spaces with its basepoint. Immutable; copies
 * share the underlying tree and factor models.
 */
class SpaceModel {
public:
    using Kind = std::variant<EuclideanSpace, std::shared_ptr<const MetricTree>, ProductSpace,
                              SeaweedCover>;

    static SpaceModel euclidean(int dimension);
    static SpaceModel tree(MetricTree tree);
    static SpaceModel product(SpaceModel left, SpaceModel right);
    static SpaceModel seaweed(SeaweedPoint basepoint = {1.0, 0.0});

    const Kind& kind() const { return kind_; }
    const Point& basepoint() const { return basepoint_; }
    std::string name() const;

    bool is_euclidean() const { return std::holds_alternative<EuclideanSpace>(kind_); }
    bool is_tree() const { return std::holds_alternative<std::shared_ptr<const MetricTree>>(kind_); }
    bool is_product() const { return std::holds_alternative<ProductSpace>(kind_); }
    bool is_seaweed() const { return std::holds_alternative<SeaweedCover>(kind_); }

    int dimension() const;                 // Euclidean only
    const MetricTree& metric_tree() const;  // tree only
    const SpaceModel& left() const;         // product only
    const SpaceModel& right() const;        // product only

private:
    SpaceModel(Kind kind, Point basepoint) : kind_(std::move(kind)), basepoint_(std::move(basepoint)) {}

    Kind kind_;
    Point basepoint_;
};

/// Throws std::invalid_argument if p is not a valid point of the model.
void validate_point(const SpaceModel& space, const Point& p);

/// Canonical form: tree points with offset 0 move to the tail vertex.
Point canonical_point(const SpaceModel& space, const Point& p);

double distance(const SpaceModel& space, const Point& p, const Point& q);

/// Point at arclength t along the unique geodesic from p to q.
Point geodesic_eval(const SpaceModel& space, const Point& p, const Point& q, double t);

/// Euclidean comparison angle at x between y and z, in [0, pi].
double comparison_angle(const SpaceModel& space, const Point& x, const Point& y, const Point& z);

/// Geodesic retraction to the basepoint: x if t >= d(x0, x), else the point of
/// [x0, x] at distance t from x0.
Point retraction_xi(const SpaceModel& space, const Point& x, double t);

bool same_point(const SpaceModel& space, const Point& p, const Point& q, double tolerance = 0.0);

namespace tree_geometry {

double depth(const MetricTree& tree, const TreePoint& p);
/// Point at the given depth along the word (its continuation is kept).
TreePoint at_depth(const MetricTree& tree, const EdgeWord& word, double depth);
/// Depth of the last common point of the root paths to p and q.
double meet_depth(const MetricTree& tree, const TreePoint& p, const TreePoint& q);

}  // namespace tree_geometry

}  // namespace cat0

#endif
