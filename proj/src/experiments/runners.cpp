#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cat0/errors.hpp"
#include "cat0/experiments/sampling.hpp"
#include "cat0/experiments/scenario.hpp"
#include "cat0/oracle/polar_grid.hpp"
#include "cat0/quasi_isometry.hpp"
#include "cat0/rescaling.hpp"

namespace cat0::experiments {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Aggregates one named assertion over many evaluations.
struct Tally {
    std::string name;
    std::size_t total = 0;
    std::size_t failed = 0;
    double worst = 0.0;
    std::string first_failure;

    void add(bool ok, double measure = 0.0, const std::string& where = {}) {
        ++total;
        if (std::isnan(measure) || measure > worst) {
            worst = measure;
        }
        if (!ok && failed++ == 0) {
            first_failure = where;
        }
    }

    Check check() const {
        std::string detail = std::to_string(total - failed) + "/" + std::to_string(total) +
                             " held, worst " + short_number(worst);
        if (failed > 0 && !first_failure.empty()) {
            detail += ", first failure at " + first_failure;
        }
        return Check{name, failed == 0 && total > 0, detail};
    }
};

class Run {
public:
    explicit Run(const Scenario& s) : sc(s), rng(s.seed) {}

    const Scenario& sc;
    Sampler rng;
    Report report;

    const json& param(const char* key) const {
        if (!sc.params.contains(key)) {
            throw InvalidScenario(std::string("missing parameter '") + key + "'");
        }
        return sc.params.at(key);
    }

    double num(const char* key) const {
        const auto& v = param(key);
        if (!v.is_number()) {
            throw InvalidScenario(std::string("parameter '") + key + "' must be a number");
        }
        return v.get<double>();
    }

    std::size_t count(const char* key) const {
        const auto& v = param(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw InvalidScenario(std::string("parameter '") + key + "' must be a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    std::vector<double> nums(const char* key) const {
        const auto& v = param(key);
        if (!v.is_array() || v.empty() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
            throw InvalidScenario(std::string("parameter '") + key + "' must be a list of numbers");
        }
        return v.get<std::vector<double>>();
    }

    std::vector<std::string> names(const char* key) const {
        const auto& v = param(key);
        if (!v.is_array() || v.empty() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); })) {
            throw InvalidScenario(std::string("parameter '") + key + "' must be a list of names");
        }
        return v.get<std::vector<std::string>>();
    }

    std::optional<double> expected() const {
        const auto& v = param("expected");
        if (v.is_null()) {
            return std::nullopt;
        }
        if (v.is_string() && v.get<std::string>() == "inf") {
            return inf;
        }
        if (!v.is_number()) {
            throw InvalidScenario("parameter 'expected' must be a number, \"inf\" or null");
        }
        return v.get<double>();
    }

    SpaceModel space() const { return space_from_json(sc.space); }

    std::pair<GeodesicRay, GeodesicRay> ray_pair(const SpaceModel& space) const {
        if (!sc.rays.is_array() || sc.rays.size() != 2) {
            throw InvalidScenario("operation needs two rays");
        }
        return {ray_from_json(space, sc.rays[0]), ray_from_json(space, sc.rays[1])};
    }

    std::vector<double> schedule() const {
        if (sc.schedule.is_null()) {
            throw InvalidScenario("operation needs a schedule");
        }
        return schedule_prefix(sc.schedule);
    }

    void columns(std::vector<std::string> names) { report.columns = std::move(names); }
    void row(json cells) { report.rows.push_back(std::move(cells)); }

    Tally& tally(const std::string& name) {
        for (auto& t : tallies_) {
            if (t.name == name) {
                return t;
            }
        }
        tallies_.emplace_back().name = name;
        return tallies_.back();
    }

    void fail(const std::string& name, const std::string& detail) {
        report.checks.push_back(Check{name, false, detail});
    }

    void pass(const std::string& name, const std::string& detail) {
        report.checks.push_back(Check{name, true, detail});
    }

    Report finish() {
        for (const auto& t : tallies_) {
            report.checks.push_back(t.check());
        }
        return std::move(report);
    }

private:
    std::deque<Tally> tallies_;  // stable references
};

SpaceModel named_model(const std::string& name) {
    if (name == "euclidean") {
        return SpaceModel::euclidean(2);
    }
    if (name == "tree") {
        return SpaceModel::tree(MetricTree::regular(3));
    }
    if (name == "product") {
        return SpaceModel::product(SpaceModel::tree(MetricTree::regular(3)), SpaceModel::euclidean(1));
    }
    if (name == "seaweed") {
        return SpaceModel::seaweed();
    }
    throw InvalidScenario("unknown model '" + name + "'");
}

GeodesicRay direction(double angle) {
    Eigen::VectorXd v(2);
    v << std::cos(angle), std::sin(angle);
    return GeodesicRay::euclidean(v);
}

GeodesicRay branch(std::size_t prefix, EdgeId turn) {
    std::vector<EdgeId> head(prefix, 0);
    head.push_back(turn);
    return GeodesicRay::tree(EdgeWord(std::move(head), {0}));
}

double wrapped_gap(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * pi));
}

void add_estimate_rows(Run& run, const std::string& label, const ConvergenceEstimate& e) {
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        const double increment = i ? e.values[i] - e.values[i - 1] : 0.0;
        run.row({label, e.scales[i], e.values[i], increment});
    }
}

bool nondecreasing(const std::vector<double>& values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1] - 1e-12 * std::max(1.0, std::abs(values[i - 1]))) {
            return false;
        }
    }
    return true;
}

// --- acceptance templates -------------------------------------------------

Report metric_audit(Run& run) {
    const auto triples = run.count("triples");
    const double c = run.num("c");
    const double tol = run.num("triangle_tolerance");
    const auto repeat = run.count("repeat_every");
    run.columns({"model", "triple", "d_ab", "d_bc", "d_ac", "triangle_excess", "symmetric"});
    for (const auto& model : run.names("models")) {
        auto& triangle = run.tally(model + ": triangle inequality");
        auto& symmetric = run.tally(model + ": symmetry");
        auto& zero = run.tally(model + ": zero iff equal");
        for (std::size_t i = 0; i < triples; ++i) {
            const SpaceModel space = model == "tree"
                                         ? SpaceModel::tree(random_tree(run.rng, run.count("max_vertices")))
                                         : named_model(model);
            std::vector<GeodesicRay> rays{random_ray(space, run.rng), random_ray(space, run.rng),
                                          random_ray(space, run.rng)};
            if (repeat > 0 && i % repeat == 0) {
                rays[2] = rays[0];
            }
            double d[3][3];
            bool sym = true;
            for (int x = 0; x < 3; ++x) {
                for (int y = 0; y < 3; ++y) {
                    d[x][y] = visual_distance(space, rays[x], rays[y], c).value;
                }
            }
            for (int x = 0; x < 3; ++x) {
                for (int y = 0; y < 3; ++y) {
                    sym = sym && d[x][y] == d[y][x];
                    const bool equal = same_ray(space, rays[x], rays[y]);
                    zero.add((d[x][y] == 0.0) == equal, 0.0, model + " triple " + std::to_string(i));
                }
            }
            double excess = -inf;
            for (int x = 0; x < 3; ++x) {
                for (int y = 0; y < 3; ++y) {
                    for (int z = 0; z < 3; ++z) {
                        excess = std::max(excess, d[x][z] - d[x][y] - d[y][z]);
                    }
                }
            }
            triangle.add(excess <= tol, excess, model + " triple " + std::to_string(i));
            symmetric.add(sym, 0.0, model + " triple " + std::to_string(i));
            run.row({model, i, d[0][1], d[1][2], d[0][2], excess, sym});
        }
    }
    return run.finish();
}

Report sine_formula(Run& run) {
    const auto schedule = run.schedule();
    const double t_final = schedule.back();
    const double tol = run.sc.tolerance;
    run.columns({"case", "t", "estimate", "expected", "error"});
    auto record = [&](const std::string& label, const ConvergenceEstimate& e, double expected) {
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            run.row({label, e.scales[i], e.values[i], expected, std::abs(e.values[i] - expected)});
        }
    };
    const auto plane = SpaceModel::euclidean(2);
    for (double phi : run.nums("euclidean_angles")) {
        const auto e = angle_between(plane, direction(0.0), direction(phi), schedule, tol);
        const std::string label = "euclidean phi=" + short_number(phi);
        record(label, e, phi);
        run.tally("euclidean: estimate equals the angle at the last scale")
            .add(std::abs(e.value - phi) <= run.num("euclidean_tolerance"), std::abs(e.value - phi), label);
    }
    {
        const auto tree = SpaceModel::tree(MetricTree::regular(3));
        const auto prefix = run.count("tree_prefix");
        const auto a = branch(prefix, 1);
        const auto b = branch(prefix, 2);
        const double shared = separation_time(tree, a, b);
        const auto e = angle_between(tree, a, b, schedule, tol);
        record("tree prefix=" + std::to_string(prefix), e, pi);
        auto& exact = run.tally("tree: exactly pi past the shared prefix");
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            if (e.scales[i] > shared) {
                exact.add(e.values[i] == pi, std::abs(e.values[i] - pi), "t=" + short_number(e.scales[i]));
            }
        }
    }
    const auto cover = SpaceModel::seaweed();
    for (double gap : run.nums("seaweed_gaps")) {
        const auto e = angle_between(cover, GeodesicRay::straight(0.0), GeodesicRay::straight(gap), schedule, tol);
        const double expected = std::min(pi, gap);
        const std::string label = "seaweed gap=" + short_number(gap);
        record(label, e, expected);
        run.tally(label + ": estimate at t=" + short_number(t_final))
            .add(std::abs(e.value - expected) <= run.num("seaweed_tolerance"), std::abs(e.value - expected), label);
    }
    return run.finish();
}

Report seaweed_tits(Run& run) {
    const auto schedule = run.schedule();
    const auto cover = SpaceModel::seaweed();
    const double gap = run.num("gap");
    run.columns({"pair", "value", "expected", "error", "status"});
    const auto a = GeodesicRay::straight(0.0);
    const auto b = GeodesicRay::straight(gap);
    const auto chain = tits_distance_chain(cover, a, b, run.count("chain_size"), schedule, run.sc.tolerance);
    run.row({"chain straight 0 to " + short_number(gap), chain.value, gap, std::abs(chain.value - gap),
             to_string(chain.status)});
    run.tally("chain along the line").add(std::abs(chain.value - gap) <= run.num("chain_tolerance"),
                                          std::abs(chain.value - gap));
    for (const auto& from : {a, b}) {
        for (int sign : {1, -1}) {
            const auto spiral = GeodesicRay::spiral(sign);
            const auto e = angle_between(cover, from, spiral, schedule, run.sc.tolerance);
            const std::string label = describe_ray(cover, from) + " to " + describe_ray(cover, spiral);
            run.row({"angle " + label, e.value, pi, std::abs(e.value - pi), to_string(e.status)});
            run.tally("angle to the spiral points").add(std::abs(e.value - pi) <= run.num("spiral_tolerance"),
                                                        std::abs(e.value - pi), label);
            const auto tits = tits_distance_chain(cover, from, spiral, run.count("chain_size"), schedule,
                                                  run.sc.tolerance);
            run.row({"chain " + label, tits.value, inf, 0.0, to_string(tits.status)});
            run.tally("spiral points in separate components").add(std::isinf(tits.value), 0.0, label);
        }
    }
    return run.finish();
}

Report cone_converge(Run& run) {
    const auto schedule = run.schedule();
    const auto pairs = run.count("pairs");
    const double lo = run.num("radius_min");
    const double hi = run.num("radius_max");
    const double tol = run.num("match_tolerance");
    run.columns({"model", "pair", "t_a", "t_b", "ray_a", "ray_b", "angle", "value", "expected", "error",
                 "monotone"});
    for (const auto& model : run.names("models")) {
        const auto space = named_model(model);
        auto& monotone = run.tally(model + ": nondecreasing in the scale");
        auto& match = run.tally(model + ": limit equals the cone metric");
        for (std::size_t i = 0; i < pairs; ++i) {
            const ConePoint a{run.rng.uniform(lo, hi), random_ray(space, run.rng)};
            const ConePoint b{run.rng.uniform(lo, hi), random_ray(space, run.rng)};
            const auto e = cone_distance_at_scale(space, a, b, schedule, run.sc.tolerance);
            const double angle = descriptor_angle(space, a.ray, b.ray);
            const double expected = cone_metric(a, b, angle);
            const double error = std::abs(e.value - expected);
            const bool mono = nondecreasing(e.values);
            const std::string where = model + " pair " + std::to_string(i);
            monotone.add(mono, 0.0, where);
            match.add(error <= tol, error, where);
            run.row({model, i, a.t, b.t, describe_ray(space, a.ray), describe_ray(space, b.ray), angle, e.value,
                     expected, error, mono});
        }
    }
    return run.finish();
}

Report theta_commute(Run& run) {
    const auto samples = run.count("samples");
    const double top = std::log(run.num("scale_max"));
    const double radius = run.num("radius_max");
    run.columns({"model", "sample", "s", "s_lower", "t", "commute_gap", "radius_gap", "lipschitz_excess"});
    for (const auto& model : run.names("models")) {
        const auto space = named_model(model);
        auto& commute = run.tally(model + ": retraction commutes with evaluation");
        auto& radial = run.tally(model + ": rescaled basepoint distance preserved");
        auto& lipschitz = run.tally(model + ": 1-Lipschitz between rescaled metrics");
        for (std::size_t i = 0; i < samples; ++i) {
            const double s = std::exp(run.rng.uniform(0.0, top));
            const double s_lower = i % 10 == 0 ? s : s * run.rng.uniform(0.01, 1.0);
            const double t = run.rng.uniform(0.0, radius);
            const auto ray = random_ray(space, run.rng);
            const Point x = psi_eval(space, s, t, ray);
            const Point lhs = theta_map(space, s, s_lower, x);
            const Point rhs = psi_eval(space, s_lower, t, ray);
            const double gap = distance(space, lhs, rhs) / s_lower;
            const double radius_gap = std::abs(distance(space, space.basepoint(), lhs) / s_lower -
                                               distance(space, space.basepoint(), x) / s);

            const Point y = psi_eval(space, s, run.rng.uniform(0.0, radius), random_ray(space, run.rng));
            const Point ty = theta_map(space, s, s_lower, y);
            const double excess = distance(space, lhs, ty) / s_lower - distance(space, x, y) / s;

            const std::string where = model + " sample " + std::to_string(i);
            commute.add(gap <= run.num("commute_tolerance"), gap, where);
            radial.add(radius_gap <= run.num("commute_tolerance"), radius_gap, where);
            lipschitz.add(excess <= run.num("lipschitz_tolerance"), excess, where);
            run.row({model, i, s, s_lower, t, gap, radius_gap, excess});
        }
    }
    return run.finish();
}

struct Family {
    std::string name;
    GeodesicRay target;
    std::function<GeodesicRay(std::size_t)> member;
};

std::vector<Family> collapse_families(const std::string& model) {
    if (model == "euclidean") {
        return {{"angle 1/n", direction(0.0), [](std::size_t n) { return direction(1.0 / n); }},
                {"angle 1/n^2", direction(0.0), [](std::size_t n) { return direction(1.0 / (n * n)); }},
                {"angle 2^-n", direction(0.0), [](std::size_t n) { return direction(std::ldexp(1.0, -int(n))); }}};
    }
    if (model == "tree") {
        const auto target = GeodesicRay::tree(EdgeWord({}, {0}));
        return {{"prefix n", target, [](std::size_t n) { return branch(n, 1); }},
                {"prefix 2n", target, [](std::size_t n) { return branch(2 * n, 1); }},
                {"prefix n(n+1)/2", target, [](std::size_t n) { return branch(n * (n + 1) / 2, 2); }}};
    }
    if (model == "seaweed") {
        return {{"straight 1/n", GeodesicRay::straight(0.0),
                 [](std::size_t n) { return GeodesicRay::straight(1.0 / n); }},
                {"straight 2^-n", GeodesicRay::straight(0.0),
                 [](std::size_t n) { return GeodesicRay::straight(std::ldexp(1.0, -int(n))); }},
                {"straight 2+n to spiral", GeodesicRay::spiral(1),
                 [](std::size_t n) { return GeodesicRay::straight(2.0 + n); }}};
    }
    throw InvalidScenario("collapse families are defined for euclidean, tree and seaweed");
}

Report collapse(Run& run) {
    const auto size = run.count("family_size");
    CollapseOptions options;
    options.t_max = run.num("t_max");
    options.t_samples = run.count("t_samples");
    const double c = run.num("c");
    run.columns({"model", "family", "n", "visual_distance", "scale", "gap"});
    for (const auto& model : run.names("models")) {
        const auto space = named_model(model);
        for (const auto& family : collapse_families(model)) {
            std::vector<GeodesicRay> rays;
            for (std::size_t n = 1; n <= size; ++n) {
                rays.push_back(family.member(n));
            }
            const std::string label = model + " / " + family.name;
            try {
                const auto r = collapse_schedule(space, rays, family.target, c, options);
                for (std::size_t n = 0; n < size; ++n) {
                    run.row({model, family.name, n + 1, r.visual[n], r.schedule[n], r.gaps[n]});
                }
                run.tally("collapse bound at sampled t").add(r.bound_holds, r.worst_bound_ratio, label);
                run.tally("converse on the same data").add(r.converse_holds, r.worst_converse_ratio, label);
            } catch (const ConvergenceError& e) {
                run.fail(label, std::string(e.what()) + " at index " + std::to_string(e.index()));
            }
        }
    }
    return run.finish();
}

Report scale_lattice(Run& run) {
    const auto m = run.count("sequences");
    const auto length = run.count("length");
    std::vector<ScaleSequence> seqs;
    json described = json::array();
    for (std::size_t i = 0; i < m; ++i) {
        switch (i % 3) {
        case 0: {
            const double e = run.rng.uniform(0.3, 2.0);
            const double k = run.rng.uniform(0.5, 3.0);
            seqs.push_back(ScaleSequence::polynomial(e, k));
            described.push_back({{"kind", "polynomial"}, {"exponent", e}, {"coefficient", k}});
            break;
        }
        case 1: {
            const double base = run.rng.uniform(0.2, 2.0);
            const double ratio = run.rng.uniform(1.0002, 1.002);
            seqs.push_back(ScaleSequence::geometric(base, ratio));
            described.push_back({{"kind", "geometric"}, {"base", base}, {"ratio", ratio}});
            break;
        }
        default: {
            const double k = run.rng.uniform(1.0, 3.0);
            auto g = [k](std::size_t n) { return k * std::log1p(static_cast<double>(n)); };
            seqs.emplace_back(g, g, "logarithmic");
            described.push_back({{"kind", "logarithmic"}, {"coefficient", k}});
        }
        }
    }
    run.report.scenario["sequences"] = described;
    const auto bounds = scale_lattice_bounds(seqs, length);
    std::vector<std::vector<double>> values;
    for (const auto& s : seqs) {
        values.push_back(s.prefix(length));
    }
    run.columns({"n", "upper", "lower", "level"});
    auto& upper = run.tally("upper dominates d^i_n for n >= i");
    auto& below = run.tally("lower_n <= d^j_n for j <= i on A_i");
    auto& witness = run.tally("lower_n > i - 1 on A_i");
    for (std::size_t n = 1; n <= length; ++n) {
        const double up = bounds.upper[n - 1];
        const double low = bounds.lower[n - 1];
        for (std::size_t i = 1; i <= std::min(n, m); ++i) {
            upper.add(up >= values[i - 1][n - 1], values[i - 1][n - 1] - up, "n=" + std::to_string(n));
        }
        // A_i membership straight from its definition
        for (std::size_t i = 1; i <= m; ++i) {
            bool member = true;
            for (std::size_t j = 1; j <= i; ++j) {
                member = member && values[j - 1][n - 1] > static_cast<double>(i) - 1.0;
            }
            if (!member) {
                break;
            }
            for (std::size_t j = 1; j <= i; ++j) {
                below.add(low <= values[j - 1][n - 1], low - values[j - 1][n - 1], "n=" + std::to_string(n));
            }
            witness.add(low > static_cast<double>(i) - 1.0, static_cast<double>(i) - 1.0 - low,
                        "n=" + std::to_string(n));
        }
        run.row({n, up, low, bounds.level[n - 1]});
    }
    return run.finish();
}

Report spiral_family(Run& run) {
    const double theta0 = run.num("theta0");
    run.columns({"quantity", "profile", "argument", "value", "expected", "error"});

    const auto log = spiral_profile("log");
    const auto log_analysis = spiral_analysis(log, 1e300, {});
    run.row({"sup r h'(r)", "log", log_analysis.argmax, log_analysis.sup_rh, 1.0, std::abs(log_analysis.sup_rh - 1.0)});
    run.tally("log: sup r h'(r) = 1")
        .add(std::abs(log_analysis.sup_rh - 1.0) <= run.num("sup_tolerance"), std::abs(log_analysis.sup_rh - 1.0));

    const auto loglog = spiral_profile("loglog");
    auto& decay = run.tally("loglog: r h'(r) <= 1/log r");
    for (double x = 0.05; x < std::log(1e300); x += 0.05) {
        const double r = std::exp(x);
        const double rh = std::abs(r * loglog.dh(r));
        decay.add(rh <= (1.0 / x) * (1.0 + 1e-12), rh * x, "r=" + short_number(r));
    }

    for (const auto& name : run.names("pushforward_profiles")) {
        const auto profile = spiral_profile(name);
        const auto f = spiral_map(profile);
        auto& exact = run.tally("pushforward direction = theta0 + h(s)");
        for (double s : run.nums("pushforward_scales")) {
            const auto pushed = pushforward_at_scale(f, direction(theta0), s);
            const auto& v = std::get<EuclideanRay>(pushed.value).direction;
            const double angle = std::atan2(v[1], v[0]);
            const double expected = theta0 + profile.h(s);
            const double error = wrapped_gap(angle, expected);
            exact.add(error <= run.num("direction_tolerance"), error, name + " s=" + short_number(s));
            run.row({"pushforward direction", name, s, angle, expected, error});
        }
    }

    {
        const double step = run.num("sweep_step");
        std::vector<double> scales;
        for (double x = 0.0; x <= run.num("sweep_log_max") + 1e-12; x += step) {
            scales.push_back(std::exp(x));
        }
        const auto sweep = limit_set_sweep(spiral_map(log), direction(theta0), scales, step);
        std::vector<double> angles;
        for (const auto& r : sweep.rays) {
            const auto& v = std::get<EuclideanRay>(r.value).direction;
            angles.push_back(std::atan2(v[1], v[0]));
        }
        const double cover = circle_cover_radius(angles);
        run.row({"sweep cover radius", "log", scales.back(), cover, run.num("cover_resolution"), 0.0});
        run.tally("log sweep covers the circle").add(cover <= run.num("cover_resolution"), cover);
        run.tally("log sweep does not stabilize").add(!sweep.stabilized, 0.0);
    }

    const double scale = run.num("distortion_scale");
    for (const char* name : {"loglog", "log", "zero"}) {
        const auto a = spiral_analysis(spiral_profile(name), 1e300, std::vector<double>{scale},
                                       run.count("distortion_pairs"), run.sc.seed);
        const double d = a.distortion.front().second;
        run.row({"distortion", name, scale, d, std::string(name) == "loglog" ? run.num("distortion_bound") : 0.0, 0.0});
        if (std::string(name) == "loglog") {
            run.tally("loglog: distortion at the scale").add(d <= run.num("distortion_bound"), d);
        } else if (std::string(name) == "zero") {
            run.tally("zero: isometry").add(d <= 1e-12 && a.sup_rh == 0.0, d);
        }
    }
    return run.finish();
}

Report spiral_sweep(Run& run) {
    const auto profile = spiral_profile(run.param("profile").get<std::string>());
    const double theta0 = run.num("theta0");
    const double step = run.num("step");
    std::vector<double> scales;
    for (std::size_t k = 0; k <= run.count("steps"); ++k) {
        scales.push_back(std::exp(step * static_cast<double>(k)));
    }
    const auto sweep = limit_set_sweep(spiral_map(profile), direction(theta0), scales, step);
    run.columns({"k", "s", "direction", "expected", "error"});
    auto& exact = run.tally("direction = theta0 + h(s)");
    std::vector<double> angles;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto& v = std::get<EuclideanRay>(sweep.rays[k].value).direction;
        const double angle = std::atan2(v[1], v[0]);
        const double expected = std::remainder(theta0 + profile.h(scales[k]), 2.0 * pi);
        const double error = wrapped_gap(angle, expected);
        exact.add(error <= run.num("direction_tolerance"), error, "k=" + std::to_string(k));
        angles.push_back(angle);
        run.row({k, scales[k], angle, expected, error});
    }
    run.pass("closure size", std::to_string(sweep.closure.size()) + " descriptors at resolution " +
                                 short_number(step) + ", cover radius " + short_number(circle_cover_radius(angles)));
    return run.finish();
}

Report seaweed_pushforward(Run& run) {
    const auto cover = SpaceModel::seaweed();
    const auto drift = lift_to_seaweed(spiral_profile("log"));
    const auto wander = lift_to_seaweed(spiral_profile("log_sin_loglog"));
    const double step = run.num("log_scale_step");
    const auto stride = std::max<std::size_t>(1, run.count("row_stride"));
    std::vector<double> logs;
    for (std::size_t k = 1; step * static_cast<double>(k) <= run.num("log_scale_max") + 1e-9; ++k) {
        logs.push_back(step * static_cast<double>(k));
    }
    run.columns({"map", "ray", "log_s", "descriptor", "angle"});
    auto record = [&](const std::string& map, const GeodesicRay& ray, std::size_t k, const GeodesicRay& image) {
        if (k % stride == 0 || k + 1 == logs.size()) {
            const auto& r = std::get<SeaweedRay>(image.value);
            run.row({map, describe_ray(cover, ray), logs[k], describe_ray(cover, image),
                     r.kind == SeaweedRay::Kind::straight ? r.theta : r.sign * inf});
        }
    };

    for (double theta : run.nums("thetas")) {
        const auto ray = GeodesicRay::straight(theta);
        double top = -inf;
        std::vector<double> hits;
        bool on_line = true;
        for (std::size_t k = 0; k < logs.size(); ++k) {
            const double s = std::exp(logs[k]);
            const auto a = pushforward_at_scale(drift, ray, s);
            const auto b = pushforward_at_scale(wander, ray, s);
            record("log", ray, k, a);
            record("log_sin_loglog", ray, k, b);
            const auto& ra = std::get<SeaweedRay>(a.value);
            on_line = on_line && ra.kind == SeaweedRay::Kind::straight;
            top = std::max(top, ra.kind == SeaweedRay::Kind::straight ? ra.theta : inf);
            const auto& rb = std::get<SeaweedRay>(b.value);
            if (rb.kind == SeaweedRay::Kind::straight) {
                hits.push_back(rb.theta);
            }
        }
        const std::string label = "Straight(" + short_number(theta) + ")";
        run.tally("log: pushforward stays on the line").add(on_line, 0.0, label);
        for (double bound : run.nums("bounds")) {
            run.tally("log: pushforward angle exceeds every bound")
                .add(top > theta + bound, bound, label + " bound " + short_number(bound));
        }
        std::sort(hits.begin(), hits.end());
        const double range = run.num("target_range");
        const double target_step = run.num("target_step");
        auto& hit = run.tally("log sin loglog: every target angle is reached");
        const auto targets = static_cast<std::size_t>(std::floor(2.0 * range / target_step + 1e-9));
        for (std::size_t i = 0; i <= targets; ++i) {
            const double target = -range + target_step * static_cast<double>(i);
            double best = inf;
            auto it = std::lower_bound(hits.begin(), hits.end(), target);
            if (it != hits.end()) {
                best = std::min(best, *it - target);
            }
            if (it != hits.begin()) {
                best = std::min(best, target - *std::prev(it));
            }
            hit.add(best <= run.num("hit_tolerance"), best, label + " target " + short_number(target));
        }
    }

    for (int sign : {1, -1}) {
        const auto ray = GeodesicRay::spiral(sign);
        auto& fixed = run.tally("spiral points fixed at every scale");
        for (std::size_t k = 0; k < logs.size(); ++k) {
            const double s = std::exp(logs[k]);
            for (const auto* f : {&drift, &wander}) {
                const auto image = pushforward_at_scale(*f, ray, s);
                fixed.add(same_ray(cover, image, ray), 0.0, describe_ray(cover, ray) + " log s=" + short_number(logs[k]));
            }
            record("log", ray, k, pushforward_at_scale(drift, ray, s));
        }
    }
    return run.finish();
}

Report morse(Run& run) {
    const auto sizes = run.nums("sizes");
    const auto epsilons = run.nums("epsilons");
    run.columns({"case", "size", "epsilon", "displacement", "deviation"});
    for (const auto& name : run.names("cases")) {
        SpaceModel space = SpaceModel::seaweed();
        GeodesicRay ray;
        MorseProbeResult::Verdict expected = MorseProbeResult::Verdict::bounded;
        if (name == "euclidean") {
            space = SpaceModel::euclidean(2);
            ray = direction(0.0);
            expected = MorseProbeResult::Verdict::growing;
        } else if (name == "tree") {
            space = SpaceModel::tree(MetricTree::regular(3));
            ray = GeodesicRay::tree(EdgeWord({}, {0}));
        } else if (name == "straight") {
            ray = GeodesicRay::straight(0.5);
            expected = MorseProbeResult::Verdict::growing;
        } else if (name == "spiral+" || name == "spiral-") {
            ray = GeodesicRay::spiral(name == "spiral+" ? 1 : -1);
        } else {
            throw InvalidScenario("unknown morse case '" + name + "'");
        }
        const auto r = morse_probe(space, ray, run.num("l"), run.num("c"), sizes, epsilons);
        for (const auto& row : r.rows) {
            run.row({name, row.size, row.epsilon, row.displacement, row.deviation});
        }
        const bool ok = r.verdict == expected;
        run.report.checks.push_back(Check{name + ": " + to_string(expected), ok,
                                          "verdict " + to_string(r.verdict) + ", max deviation " +
                                              short_number(r.max_deviation)});
    }
    return run.finish();
}

Report hausdorff(Run& run) {
    run.columns({"instance", "l", "c", "l_first", "c_first", "m", "measured", "bound"});
    auto& bound = run.tally("measured Hausdorff distance within the bound");
    auto& quasi = run.tally("both rays verified quasi-geodesic");
    for (std::size_t i = 0; i < run.count("instances"); ++i) {
        const auto inst = close_rays_instance(run.sc.seed + i, run.count("samples"));
        bound.add(inst.measured <= inst.bound, inst.measured / inst.bound, "instance " + std::to_string(i));
        quasi.add(inst.quasi_geodesics_verified, 0.0, "instance " + std::to_string(i));
        run.row({i, inst.l, inst.c, inst.l_first, inst.c_first, inst.m, inst.measured, inst.bound});
    }
    return run.finish();
}

Report cut_point(Run& run) {
    run.columns({"tree", "vertices", "prefix", "s", "status", "rescaled_branch"});
    auto& separated = run.tally("separated past the prefix threshold");
    auto& inconclusive = run.tally("inconclusive at or below the threshold");
    for (std::size_t i = 0; i < run.count("trees"); ++i) {
        MetricTree tree = random_tree(run.rng, run.count("max_vertices"));
        while (tree.hair_rays().size() < 2) {
            tree = random_tree(run.rng, run.count("max_vertices"));
        }
        const auto space = SpaceModel::tree(tree);
        const auto rays = tree.hair_rays();
        const std::size_t x = run.rng.index(rays.size());
        std::size_t y = run.rng.index(rays.size() - 1);
        y += y >= x ? 1 : 0;
        const auto a = GeodesicRay::tree(rays[x]);
        const auto b = GeodesicRay::tree(rays[y]);
        const double prefix = separation_time(space, a, b);
        for (double factor : run.nums("scale_factors")) {
            const double s = factor * std::max(prefix, 1.0);
            const std::string where = "tree " + std::to_string(i) + " s=" + short_number(s);
            std::string status;
            double rescaled = prefix / s;
            try {
                const auto w = cut_point_witness(space, a, b, 1.0, s);
                status = w.separated ? "separated" : "joined";
                rescaled = w.rescaled_branch;
                separated.add(s > prefix && w.separated, rescaled, where);
            } catch (const PreconditionError&) {
                status = "inconclusive";
                inconclusive.add(s <= prefix, 0.0, where);
            }
            run.row({i, tree.type_count(), prefix, s, status, rescaled});
        }
    }
    return run.finish();
}

Report seaweed_oracle(Run& run) {
    const auto cover = SpaceModel::seaweed();
    oracle::PolarGrid grid;
    grid.log_step = run.num("log_step");
    grid.angle_step = run.num("angle_step");
    grid.reach = static_cast<int>(run.count("reach"));
    const double r_max = run.num("r_max");
    const double range = run.num("theta_range");
    run.columns({"pair", "r1", "theta1", "r2", "theta2", "closed_form", "oracle", "relative_error"});
    auto& match = run.tally("closed form within the relative tolerance of the oracle");
    for (std::size_t i = 0; i < run.count("pairs"); ++i) {
        const SeaweedPoint p{run.rng.uniform(1.0, r_max), run.rng.uniform(-range, range)};
        const SeaweedPoint q{run.rng.uniform(1.0, r_max), run.rng.uniform(-range, range)};
        const double closed = distance(cover, Point(p), Point(q));
        const double grid_distance = oracle::seaweed_grid_distance(p.r, p.theta, q.r, q.theta, grid);
        const double rel = std::abs(closed - grid_distance) / closed;
        match.add(rel <= run.num("relative_tolerance"), rel, "pair " + std::to_string(i));
        run.row({i, p.r, p.theta, q.r, q.theta, closed, grid_distance, rel});
    }
    return run.finish();
}

// --- generic operations ---------------------------------------------------

void compare_expected(Run& run, double value) {
    if (const auto expected = run.expected()) {
        const double error = std::isinf(*expected) && value == *expected ? 0.0 : std::abs(value - *expected);
        run.tally("matches the expected value").add(error <= run.num("match_tolerance"), error);
    }
}

void require_converged(Run& run, const ConvergenceEstimate& e) {
    if (e.status == ConvergenceEstimate::Status::not_converged) {
        run.report.converged = false;
    }
    run.report.checks.push_back(Check{"estimate status", e.status != ConvergenceEstimate::Status::not_converged,
                                      to_string(e.status) + ", last increment " + short_number(e.last_increment)});
}

Report angle_op(Run& run) {
    const auto space = run.space();
    const auto [a, b] = run.ray_pair(space);
    const auto e = angle_between(space, a, b, run.schedule(), run.sc.tolerance);
    run.columns({"label", "scale", "value", "increment"});
    add_estimate_rows(run, "angle", e);
    require_converged(run, e);
    compare_expected(run, e.value);
    return run.finish();
}

Report tits_op(Run& run) {
    const auto space = run.space();
    const auto [a, b] = run.ray_pair(space);
    run.columns({"label", "scale", "value", "increment"});
    try {
        const auto e = tits_distance_chain(space, a, b, run.count("chain_size"), run.schedule(), run.sc.tolerance);
        add_estimate_rows(run, "chain", e);
        require_converged(run, e);
        compare_expected(run, e.value);
    } catch (const UnsupportedError& e) {
        run.fail("interpolation family", e.what());
    }
    return run.finish();
}

Report visual_op(Run& run) {
    const auto space = run.space();
    const auto [a, b] = run.ray_pair(space);
    const auto v = visual_distance(space, a, b, run.num("c"), run.num("horizon"));
    run.columns({"value", "sup_time", "beyond_horizon"});
    run.row({v.value, v.sup_time, v.beyond_horizon});
    compare_expected(run, v.value);
    if (!run.expected()) {
        run.pass("evaluated", "d_C = " + short_number(v.value));
    }
    return run.finish();
}

Report cone_op(Run& run) {
    const auto space = run.space();
    const auto [a, b] = run.ray_pair(space);
    const auto schedule = run.schedule();
    const ConePoint p{run.num("t_a"), a};
    const ConePoint q{run.num("t_b"), b};
    const auto e = cone_distance_at_scale(space, p, q, schedule, run.sc.tolerance);
    const auto angle = angle_between(space, a, b, schedule, run.sc.tolerance);
    const double limit = run.expected().value_or(cone_metric(p, q, angle.value));
    run.columns({"label", "scale", "value", "increment"});
    add_estimate_rows(run, "cone distance", e);
    require_converged(run, e);
    run.tally("nondecreasing in the scale").add(nondecreasing(e.values));
    const double error = std::abs(e.value - limit);
    run.tally("limit equals the cone metric").add(error <= run.num("match_tolerance"), error);
    return run.finish();
}

Report flat_op(Run& run) {
    const auto space = run.space();
    const auto [a, b] = run.ray_pair(space);
    run.columns({"flat", "max_deviation", "angle", "basepoint_angle"});
    try {
        const auto r = flat_sector_check(space, a, b, run.nums("radii"), run.num("flat_tolerance"));
        run.row({r.flat, r.max_deviation, r.angle, r.basepoint_angle});
        run.report.checks.push_back(Check{"flat sector", r.flat, "max deviation " + short_number(r.max_deviation)});
    } catch (const PreconditionError& e) {
        run.fail("flat sector precondition", e.what());
    }
    return run.finish();
}

using Runner = Report (*)(Run&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table{
        {"metric-audit", metric_audit},
        {"sine-formula", sine_formula},
        {"seaweed-tits", seaweed_tits},
        {"cone-converge", cone_converge},
        {"theta-commute", theta_commute},
        {"collapse-schedule", collapse},
        {"scale-lattice", scale_lattice},
        {"spiral-family", spiral_family},
        {"spiral-sweep", spiral_sweep},
        {"seaweed-pushforward", seaweed_pushforward},
        {"morse-probe", morse},
        {"hausdorff-bound", hausdorff},
        {"cut-point", cut_point},
        {"seaweed-oracle", seaweed_oracle},
        {"angle-between", angle_op},
        {"tits-chain", tits_op},
        {"visual-distance", visual_op},
        {"cone-distance", cone_op},
        {"flat-sector", flat_op},
    };
    return table;
}

}  // namespace

Report run_scenario(const Scenario& scenario) {
    const auto it = runners().find(scenario.operation);
    if (it == runners().end()) {
        throw InvalidScenario("unknown operation '" + scenario.operation + "'");
    }
    Run run(scenario);
    json echo{{"schema", scenario_schema},
              {"operation", scenario.operation},
              {"seed", scenario.seed},
              {"tolerance", scenario.tolerance}};
    for (const auto& [key, value] : {std::pair{"space", &scenario.space}, std::pair{"rays", &scenario.rays},
                                     std::pair{"schedule", &scenario.schedule}}) {
        if (!value->is_null()) {
            echo[key] = *value;
        }
    }
    echo["params"] = scenario.params;
    run.report.scenario = echo;
    try {
        return it->second(run);
    } catch (const InvalidScenario&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InvalidScenario(e.what());
    }
}

}  // namespace cat0::experiments
