#include "cat0/rescaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cat0/errors.hpp"

namespace cat0 {

ScaleSequence::ScaleSequence(Generator generator, std::optional<Generator> certificate,
                             std::string description)
    : generator_(std::move(generator)),
      certificate_(std::move(certificate)),
      description_(std::move(description)) {
    if (!generator_) {
        throw std::invalid_argument("scale sequence: missing generator");
    }
}

ScaleSequence ScaleSequence::geometric(double base, double ratio) {
    if (!(base > 0.0) || !(ratio > 1.0)) {
        throw std::invalid_argument("geometric scales: need base > 0 and ratio > 1");
    }
    auto g = [base, ratio](std::size_t n) {
        return base * std::pow(ratio, static_cast<double>(n - 1));
    };
    return ScaleSequence(g, g, "geometric");
}

ScaleSequence ScaleSequence::polynomial(double exponent, double coefficient) {
    if (!(exponent > 0.0) || !(coefficient > 0.0)) {
        throw std::invalid_argument("polynomial scales: need exponent > 0 and coefficient > 0");
    }
    auto g = [exponent, coefficient](std::size_t n) {
        return coefficient * std::pow(static_cast<double>(n), exponent);
    };
    return ScaleSequence(g, g, "polynomial");
}

ScaleSequence ScaleSequence::from_values(std::vector<double> values) {
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("explicit scales: values must be positive and finite");
        }
    }
    const std::size_t n = values.size();
    ScaleSequence seq(
        [values = std::move(values)](std::size_t i) {
            if (i == 0 || i > values.size()) {
                throw std::out_of_range("explicit scales: index past the stored values");
            }
            return values[i - 1];
        },
        std::nullopt, "explicit");
    seq.size_ = n;
    return seq;
}

double ScaleSequence::operator()(std::size_t n) const {
    if (n == 0) {
        throw std::out_of_range("scale sequence indices start at 1");
    }
    const double value = generator_(n);
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::domain_error("scale sequence: non-positive value at index " + std::to_string(n));
    }
    if (certificate_ && value < (*certificate_)(n)) {
        throw ConvergenceError("scale sequence: value below its divergence certificate", n);
    }
    return value;
}

std::vector<double> ScaleSequence::prefix(std::size_t length) const {
    std::vector<double> out;
    out.reserve(length);
    for (std::size_t n = 1; n <= length; ++n) {
        out.push_back((*this)(n));
    }
    return out;
}

ScaledView::ScaledView(SpaceModel space_, double scale_) : space(std::move(space_)), scale(scale_) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("scaled view: scale must be positive");
    }
}

double ScaledView::distance(const Point& p, const Point& q) const {
    return cat0::distance(space, p, q) / scale;
}

Point psi_eval(const SpaceModel& space, double s, double t, const GeodesicRay& ray) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("psi: scale must be positive");
    }
    if (!(t >= 0.0)) {
        throw std::invalid_argument("psi: radius must be non-negative");
    }
    return ray_eval(space, ray, t * s);
}

Point theta_map(const SpaceModel& space, double s, double s_lower, const Point& x) {
    if (!(s_lower > 0.0)) {
        throw std::invalid_argument("theta: scales must be positive");
    }
    if (s_lower > s) {
        throw std::invalid_argument("theta: the target scale exceeds the source scale");
    }
    if (s_lower == s) {
        return x;
    }
    return retraction_xi(space, x, (s_lower / s) * distance(space, space.basepoint(), x));
}

ConvergenceEstimate cone_distance_at_scale(const SpaceModel& space, const ConePoint& a,
                                           const ConePoint& b, std::span<const double> schedule,
                                           double tolerance) {
    if (schedule.empty()) {
        throw std::invalid_argument("cone distance: empty schedule");
    }
    std::vector<double> values;
    values.reserve(schedule.size());
    for (double s : schedule) {
        const Point p = psi_eval(space, s, a.t, a.ray);
        const Point q = psi_eval(space, s, b.t, b.ray);
        values.push_back(distance(space, p, q) / s);
    }
    return make_estimate({schedule.begin(), schedule.end()}, std::move(values), tolerance);
}

double inverse_limit_distance(const SpaceModel& space, const ConePoint& a, const ConePoint& b,
                              std::span<const double> scales) {
    if (scales.empty()) {
        throw std::invalid_argument("inverse limit: empty scale set");
    }
    double sup = 0.0;
    for (double s : scales) {
        sup = std::max(sup, distance(space, psi_eval(space, s, a.t, a.ray),
                                     psi_eval(space, s, b.t, b.ray)) / s);
    }
    return sup;
}

CollapseReport collapse_schedule(const SpaceModel& space, std::span<const GeodesicRay> rays,
                                 const GeodesicRay& target, double c,
                                 const CollapseOptions& options) {
    if (rays.empty()) {
        throw std::invalid_argument("collapse: empty ray family");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("collapse: C must be positive");
    }
    CollapseReport report;
    for (std::size_t n = 0; n < rays.size(); ++n) {
        const auto dc = visual_distance(space, target, rays[n], c);
        if (dc.value == 0.0) {
            throw ConvergenceError("collapse: d_C vanishes, the schedule is undefined", n + 1);
        }
        if (n > 0 && dc.value > report.visual.back() * (1.0 + 1e-9)) {
            throw ConvergenceError("collapse: d_C increases along the family", n + 1);
        }
        report.visual.push_back(dc.value);
        report.schedule.push_back(std::sqrt(1.0 / dc.value));
    }

    for (std::size_t n = 0; n < rays.size(); ++n) {
        const double dn = report.schedule[n];
        for (double fraction : options.lower_fractions) {
            const double lower = fraction * dn;
            // the bound is claimed for rescaled radii t <= d'
            const double t_top = std::min(options.t_max, lower);
            for (std::size_t k = 1; k <= options.t_samples; ++k) {
                const double t = t_top * static_cast<double>(k) / static_cast<double>(options.t_samples);
                const double gap = distance(space, ray_eval(space, rays[n], t * lower),
                                            ray_eval(space, target, t * lower)) / lower;
                const double ratio = gap / (c / lower);
                report.worst_bound_ratio = std::max(report.worst_bound_ratio, ratio);
                report.bound_holds = report.bound_holds && ratio <= 1.0 + 1e-9;
                ++report.bound_checks;
            }
        }
        // convexity of the gap function gives d_C <= max(gap / (C t0), 1 / (t0 d_n))
        const double t0 = options.converse_t;
        const double gap = distance(space, ray_eval(space, rays[n], t0 * dn),
                                    ray_eval(space, target, t0 * dn)) / dn;
        report.gaps.push_back(gap);
        const double bound = std::max(gap / (c * t0), 1.0 / (t0 * dn));
        const double ratio = report.visual[n] / bound;
        report.worst_converse_ratio = std::max(report.worst_converse_ratio, ratio);
        report.converse_holds = report.converse_holds && ratio <= 1.0 + 1e-9;
    }
    return report;
}

LatticeBounds scale_lattice_bounds(std::span<const ScaleSequence> sequences, std::size_t length) {
    if (sequences.empty()) {
        throw std::invalid_argument("scale lattice: no sequences");
    }
    const std::size_t m = sequences.size();
    std::vector<std::vector<double>> values;
    values.reserve(m);
    for (const auto& seq : sequences) {
        values.push_back(seq.prefix(length));
    }
    LatticeBounds out;
    out.upper.resize(length);
    out.lower.resize(length);
    out.level.resize(length);
    for (std::size_t n = 1; n <= length; ++n) {
        double upper = 0.0;
        for (std::size_t i = 1; i <= std::min(n, m); ++i) {
            upper = std::max(upper, values[i - 1][n - 1]);
        }
        // n lies in A_i iff min over j <= i of d^j_n exceeds i - 1; the A_i are nested
        std::size_t level = 0;
        double running_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i <= m; ++i) {
            running_min = std::min(running_min, values[i - 1][n - 1]);
            if (!(running_min > static_cast<double>(i) - 1.0)) {
                break;
            }
            level = i;
        }
        if (level == m) {
            // past the last sequence the condition reads running_min > i - 1
            level = std::max(m, static_cast<std::size_t>(std::min(std::ceil(running_min), 1e18)));
        }
        double lower = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= std::min(std::max<std::size_t>(level, 1), m); ++j) {
            lower = std::min(lower, values[j - 1][n - 1]);
        }
        out.upper[n - 1] = upper;
        out.lower[n - 1] = lower;
        out.level[n - 1] = level;
    }
    return out;
}

CutPointWitness cut_point_witness(const SpaceModel& space, const GeodesicRay& a,
                                  const GeodesicRay& b, double t, double s) {
    if (!space.is_tree()) {
        throw UnsupportedError("cut point witness: defined for metric trees only");
    }
    if (!(t > 0.0) || !(s > 0.0)) {
        throw std::invalid_argument("cut point witness: t and s must be positive");
    }
    if (same_ray(space, a, b)) {
        throw PreconditionError("cut point witness: the rays are equal");
    }
    const double branch = separation_time(space, a, b);
    if (!(t * s > branch)) {
        throw PreconditionError("cut point witness: scale below the shared-prefix threshold");
    }
    const auto& tree = space.metric_tree();
    const Point p = psi_eval(space, s, t, a);
    const Point q = psi_eval(space, s, t, b);
    const auto& tp = std::get<TreePoint>(p.value);
    const auto& tq = std::get<TreePoint>(q.value);
    const double meet = tree_geometry::meet_depth(tree, tp, tq);
    const Point m(tree_geometry::at_depth(tree, tp.word, meet));
    const double dpm = distance(space, p, m);
    const double dmq = distance(space, m, q);

    CutPointWitness w;
    w.branch_depth = branch;
    w.rescaled_branch = branch / s;
    const double slack = 1e-12 * std::max(1.0, t * s);
    w.separated = dpm > 0.0 && dmq > 0.0 && std::abs(distance(space, p, q) - (dpm + dmq)) <= slack &&
                  distance(space, space.basepoint(), m) <= branch + slack;
    return w;
}

}  // namespace cat0
