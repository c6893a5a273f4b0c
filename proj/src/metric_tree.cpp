#include "cat0/metric_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace cat0 {

EdgeWord::EdgeWord(std::vector<EdgeId> head, std::vector<EdgeId> cycle, std::size_t size)
    : head_(std::move(head)), cycle_(std::move(cycle)), size_(size) {
    if (cycle_.empty() && size_ > head_.size()) {
        throw std::invalid_argument("edge word: a word longer than its head needs a cycle");
    }
}

EdgeId EdgeWord::operator[](std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("edge word index past the end");
    }
    if (i < head_.size()) {
        return head_[i];
    }
    return cycle_[(i - head_.size()) % cycle_.size()];
}

EdgeWord EdgeWord::truncated(std::size_t n) const {
    if (n > size_) {
        throw std::out_of_range("edge word truncated past its end");
    }
    return EdgeWord(head_, cycle_, n);
}

EdgeWord EdgeWord::unbounded() const {
    if (cycle_.empty()) {
        throw std::invalid_argument("edge word without a cycle cannot be unbounded");
    }
    return EdgeWord(head_, cycle_, infinite_size);
}

EdgeWord EdgeWord::canonical() const {
    if (cycle_.empty()) {
        std::vector<EdgeId> letters(head_.begin(), head_.begin() + static_cast<std::ptrdiff_t>(size_));
        return EdgeWord(std::move(letters), {}, size_);
    }
    std::vector<EdgeId> cycle = cycle_;
    const std::size_t c = cycle.size();
    for (std::size_t p = 1; p <= c; ++p) {
        if (c % p != 0) {
            continue;
        }
        bool periodic = true;
        for (std::size_t i = p; i < c && periodic; ++i) {
            periodic = cycle[i] == cycle[i % p];
        }
        if (periodic) {
            cycle.resize(p);
            break;
        }
    }
    std::vector<EdgeId> head = head_;
    while (!head.empty() && head.back() == cycle.back()) {
        std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
        head.pop_back();
    }
    return EdgeWord(std::move(head), std::move(cycle), size_);
}

std::size_t EdgeWord::common_prefix(const EdgeWord& a, const EdgeWord& b) {
    const std::size_t limit = std::min(a.size_, b.size_);
    const std::size_t ca = std::max<std::size_t>(a.cycle_.size(), 1);
    const std::size_t cb = std::max<std::size_t>(b.cycle_.size(), 1);
    // past both heads the words are periodic with period lcm(ca, cb)
    const std::size_t bound = std::max(a.head_.size(), b.head_.size()) + std::lcm(ca, cb);
    const std::size_t n = std::min(limit, bound);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) {
            return i;
        }
    }
    return limit;
}

bool operator==(const EdgeWord& a, const EdgeWord& b) {
    return a.size_ == b.size_ && EdgeWord::common_prefix(a, b) == a.size_;
}

MetricTree MetricTree::from_edges(const std::vector<std::string>& vertices,
                                  const std::vector<TreeEdgeSpec>& edges,
                                  const std::string& basepoint, double hair_length) {
    if (vertices.empty()) {
        throw std::invalid_argument("tree: no vertices");
    }
    if (!(hair_length > 0.0) || !std::isfinite(hair_length)) {
        throw std::invalid_argument("tree: hair length must be positive");
    }
    std::map<std::string, std::size_t> index;
    for (const auto& v : vertices) {
        if (!index.emplace(v, index.size()).second) {
            throw std::invalid_argument("tree: duplicate vertex '" + v + "'");
        }
    }
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) {
            throw std::invalid_argument("tree: unknown vertex '" + name + "'");
        }
        return it->second;
    };
    const std::size_t n = vertices.size();
    if (edges.size() + 1 != n) {
        throw std::invalid_argument("tree: a tree on " + std::to_string(n) + " vertices has " +
                                    std::to_string(n - 1) + " edges, got " +
                                    std::to_string(edges.size()));
    }
    std::vector<std::vector<std::pair<std::size_t, EdgeId>>> adjacency(n);
    for (EdgeId e = 0; e < edges.size(); ++e) {
        const auto& spec = edges[e];
        if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
            throw std::invalid_argument("tree: edge " + std::to_string(e) +
                                        " has non-positive length");
        }
        const std::size_t a = lookup(spec.a);
        const std::size_t b = lookup(spec.b);
        if (a == b) {
            throw std::invalid_argument("tree: self-loop at '" + spec.a + "'");
        }
        adjacency[a].emplace_back(b, e);
        adjacency[b].emplace_back(a, e);
    }

    MetricTree tree;
    tree.root_ = lookup(basepoint);
    tree.type_names_ = vertices;
    tree.edges_.resize(edges.size());
    tree.children_.assign(n, {});

    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(tree.root_);
    seen[tree.root_] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (auto [w, e] : adjacency[v]) {
            if (seen[w]) {
                continue;
            }
            seen[w] = true;
            ++reached;
            tree.edges_[e] = TreeEdge{v, w, edges[e].length, vertices[v] + "-" + vertices[w]};
            frontier.push(w);
        }
    }
    if (reached != n) {
        throw std::invalid_argument("tree: graph is not connected");
    }
    for (EdgeId e = 0; e < tree.edges_.size(); ++e) {
        tree.children_[tree.edges_[e].tail].push_back(e);
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (tree.children_[v].empty()) {
            const EdgeId hair = tree.edges_.size();
            tree.edges_.push_back(TreeEdge{v, v, hair_length, "hair:" + vertices[v]});
            tree.children_[v].push_back(hair);
            tree.hairs_.push_back(hair);
        }
    }
    return tree;
}

MetricTree MetricTree::regular(std::size_t branching, double edge_length) {
    if (branching < 1) {
        throw std::invalid_argument("regular tree: branching must be at least 1");
    }
    if (!(edge_length > 0.0) || !std::isfinite(edge_length)) {
        throw std::invalid_argument("regular tree: edge length must be positive");
    }
    MetricTree tree;
    tree.type_names_ = {"v"};
    tree.children_.assign(1, {});
    for (std::size_t i = 0; i < branching; ++i) {
        tree.edges_.push_back(TreeEdge{0, 0, edge_length, "g" + std::to_string(i)});
        tree.children_[0].push_back(i);
    }
    return tree;
}

const TreeEdge& MetricTree::edge(EdgeId e) const {
    if (e >= edges_.size()) {
        throw std::out_of_range("tree: unknown edge id " + std::to_string(e));
    }
    return edges_[e];
}

const std::vector<EdgeId>& MetricTree::children(std::size_t type) const {
    return children_.at(type);
}

bool MetricTree::is_path(const EdgeWord& word) const {
    std::size_t at = root_;
    for (EdgeId e : word.head()) {
        if (e >= edges_.size() || edges_[e].tail != at) {
            return false;
        }
        at = edges_[e].head;
    }
    if (word.cycle().empty()) {
        return true;
    }
    const std::size_t start = at;
    for (EdgeId e : word.cycle()) {
        if (e >= edges_.size() || edges_[e].tail != at) {
            return false;
        }
        at = edges_[e].head;
    }
    return at == start;
}

void MetricTree::validate_word(const EdgeWord& word) const {
    if (!is_path(word)) {
        throw std::invalid_argument("tree: edge word is not a path from the basepoint");
    }
}

double MetricTree::prefix_depth(const EdgeWord& word, std::size_t n) const {
    if (n > word.size()) {
        throw std::out_of_range("tree: prefix longer than the word");
    }
    const auto& head = word.head();
    double depth = 0.0;
    const std::size_t from_head = std::min(n, head.size());
    for (std::size_t i = 0; i < from_head; ++i) {
        depth += edges_[head[i]].length;
    }
    if (n <= head.size()) {
        return depth;
    }
    const auto& cycle = word.cycle();
    const std::size_t rest = n - head.size();
    double cycle_length = 0.0;
    for (EdgeId e : cycle) {
        cycle_length += edges_[e].length;
    }
    depth += static_cast<double>(rest / cycle.size()) * cycle_length;
    for (std::size_t i = 0; i < rest % cycle.size(); ++i) {
        depth += edges_[cycle[i]].length;
    }
    return depth;
}

std::size_t MetricTree::edges_to_reach(const EdgeWord& word, double depth) const {
    if (!(depth > 0.0)) {
        throw std::invalid_argument("tree: depth must be positive");
    }
    const auto& head = word.head();
    double acc = 0.0;
    std::size_t n = 0;
    for (; n < head.size() && n < word.size(); ++n) {
        acc += edges_[head[n]].length;
        if (acc >= depth) {
            return n + 1;
        }
    }
    const auto& cycle = word.cycle();
    if (cycle.empty() || n >= word.size()) {
        throw std::out_of_range("tree: depth beyond the end of the word");
    }
    double cycle_length = 0.0;
    for (EdgeId e : cycle) {
        cycle_length += edges_[e].length;
    }
    // skip whole cycles, leaving one for the letter walk to absorb rounding
    const double whole = std::floor((depth - acc) / cycle_length);
    if (whole > 1.0) {
        const auto skip = static_cast<std::size_t>(whole) - 1;
        acc += static_cast<double>(skip) * cycle_length;
        n += skip * cycle.size();
    }
    for (;; ++n) {
        if (n >= word.size()) {
            throw std::out_of_range("tree: depth beyond the end of the word");
        }
        acc += edges_[cycle[(n - head.size()) % cycle.size()]].length;
        if (acc >= depth) {
            return n + 1;
        }
    }
}

EdgeWord MetricTree::extension(const EdgeWord& word) const {
    if (!word.cycle().empty()) {
        return word.unbounded();
    }
    std::vector<EdgeId> letters(word.head().begin(),
                                word.head().begin() + static_cast<std::ptrdiff_t>(word.size()));
    std::size_t at = letters.empty() ? root_ : edges_[letters.back()].head;
    std::vector<std::size_t> visited_at(type_count(), EdgeWord::infinite_size);
    for (;;) {
        if (visited_at[at] != EdgeWord::infinite_size) {
            const std::size_t start = visited_at[at];
            std::vector<EdgeId> cycle(letters.begin() + static_cast<std::ptrdiff_t>(start),
                                      letters.end());
            letters.resize(start);
            return EdgeWord(std::move(letters), std::move(cycle)).canonical();
        }
        visited_at[at] = letters.size();
        const EdgeId next = children_[at].front();
        letters.push_back(next);
        at = edges_[next].head;
    }
}

std::vector<EdgeWord> MetricTree::hair_rays() const {
    std::vector<EdgeId> parent(type_count(), EdgeWord::infinite_size);
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        if (edges_[e].tail != edges_[e].head) {
            parent[edges_[e].head] = e;
        }
    }
    std::vector<EdgeWord> rays;
    for (EdgeId hair : hairs_) {
        std::vector<EdgeId> path;
        for (std::size_t v = edges_[hair].tail; v != root_; v = edges_[parent[v]].tail) {
            path.push_back(parent[v]);
        }
        std::reverse(path.begin(), path.end());
        rays.emplace_back(std::move(path), std::vector<EdgeId>{hair});
    }
    return rays;
}

}  // namespace cat0
