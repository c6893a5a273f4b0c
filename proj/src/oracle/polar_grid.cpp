#include "cat0/oracle/polar_grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cat0::oracle {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double pi = 3.14159265358979323846;

// Chord length between two polar points, or infinity if the segment enters
// the open unit disk or the angular gap is not below pi.
double chord(double r1, double t1, double r2, double t2) {
    const double gap = t2 - t1;
    if (std::abs(gap) >= pi) {
        return inf;
    }
    const double ax = r1;
    const double ay = 0.0;
    const double bx = r2 * std::cos(gap);
    const double by = r2 * std::sin(gap);
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    const double cx = ax + s * dx;
    const double cy = ay + s * dy;
    if (std::hypot(cx, cy) < 1.0 - 1e-12) {
        return inf;
    }
    return std::sqrt(len2);
}

}  // namespace

double seaweed_grid_distance(double r1, double theta1, double r2, double theta2, const PolarGrid& grid) {
    if (!(r1 >= 1.0) || !(r2 >= 1.0)) {
        throw std::invalid_argument("grid oracle: radii must be at least 1");
    }
    const double hu = grid.log_step;
    const double ht = grid.angle_step;
    const double u_top = std::log(std::max(r1, r2)) + 2.0 * hu;
    const int rows = static_cast<int>(std::ceil(u_top / hu)) + 1;
    const double t_lo = std::min(theta1, theta2) - grid.margin;
    const double t_hi = std::max(theta1, theta2) + grid.margin;
    const int cols = static_cast<int>(std::ceil((t_hi - t_lo) / ht)) + 1;

    auto radius = [&](int i) { return std::exp(i * hu); };
    auto angle = [&](int j) { return t_lo + j * ht; };

    std::vector<std::pair<int, int>> steps;
    for (int a = -grid.reach; a <= grid.reach; ++a) {
        for (int b = -grid.reach; b <= grid.reach; ++b) {
            if ((a != 0 || b != 0) && std::gcd(a, b) == 1) {
                steps.emplace_back(a, b);
            }
        }
    }
    // edge lengths depend on the row and the step only
    std::vector<double> length(static_cast<std::size_t>(rows) * steps.size(), inf);
    for (int i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const auto [a, b] = steps[k];
            const int i2 = i + a;
            if (i2 < 0 || i2 >= rows) {
                continue;
            }
            double len = chord(radius(i), 0.0, radius(i2), b * ht);
            if (i == 0 && a == 0) {
                len = std::abs(b) * ht;  // along the circle
            }
            length[static_cast<std::size_t>(i) * steps.size() + k] = len;
        }
    }

    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    std::vector<double> dist(n, inf);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    // endpoints attach to the grid nodes around them
    const int window = grid.reach + 1;
    auto attach = [&](double r, double t, auto&& visit) {
        const int ci = static_cast<int>(std::floor(std::log(r) / hu));
        const int cj = static_cast<int>(std::floor((t - t_lo) / ht));
        for (int i = std::max(0, ci - window); i <= std::min(rows - 1, ci + window); ++i) {
            for (int j = std::max(0, cj - window); j <= std::min(cols - 1, cj + window); ++j) {
                const double len = chord(r, t, radius(i), angle(j));
                if (std::isfinite(len)) {
                    visit(static_cast<std::size_t>(i) * cols + j, len);
                }
            }
        }
    };
    attach(r1, theta1, [&](std::size_t node, double len) {
        if (len < dist[node]) {
            dist[node] = len;
            heap.emplace(len, node);
        }
    });
    std::vector<double> exit_cost(n, inf);
    attach(r2, theta2, [&](std::size_t node, double len) { exit_cost[node] = len; });

    double best = chord(r1, theta1, r2, theta2);
    while (!heap.empty()) {
        const auto [d, node] = heap.top();
        heap.pop();
        if (d > dist[node]) {
            continue;
        }
        best = std::min(best, d + exit_cost[node]);
        if (d >= best) {
            break;
        }
        const int i = static_cast<int>(node / cols);
        const int j = static_cast<int>(node % cols);
        const double* row = &length[static_cast<std::size_t>(i) * steps.size()];
        for (std::size_t k = 0; k < steps.size(); ++k) {
            if (!std::isfinite(row[k])) {
                continue;
            }
            const int j2 = j + steps[k].second;
            if (j2 < 0 || j2 >= cols) {
                continue;
            }
            const std::size_t next = static_cast<std::size_t>(i + steps[k].first) * cols + j2;
            const double nd = d + row[k];
            if (nd < dist[next]) {
                dist[next] = nd;
                heap.emplace(nd, next);
            }
        }
    }
    return best;
}

}  // namespace cat0::oracle
