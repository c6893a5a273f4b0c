#ifndef CAT0_METRIC_TREE_HPP
#define CAT0_METRIC_TREE_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace cat0 {

using EdgeId = std::size_t;

/*
 * An eventually periodic sequence of edge identifiers: the head, followed by
 * the cycle repeated forever. A finite word keeps its continuation so that a
 * point on a ray still knows which ray it came from.
 */
class EdgeWord {
public:
    static constexpr std::size_t infinite_size = std::numeric_limits<std::size_t>::max();

    EdgeWord() = default;
    EdgeWord(std::vector<EdgeId> head, std::vector<EdgeId> cycle,
             std::size_t size = infinite_size);

    EdgeId operator[](std::size_t i) const;

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    bool is_infinite() const { return size_ == infinite_size; }
    const std::vector<EdgeId>& head() const { return head_; }
    const std::vector<EdgeId>& cycle() const { return cycle_; }

    /// First n letters; the continuation is kept.
    EdgeWord truncated(std::size_t n) const;
    /// The same letters with the size lifted to infinity (requires a cycle).
    EdgeWord unbounded() const;

    /// Shortest head and primitive cycle; two infinite words are equal iff
    /// their canonical forms are identical.
    EdgeWord canonical() const;

    /// Length of the longest common prefix, capped by the shorter size.
    static std::size_t common_prefix(const EdgeWord& a, const EdgeWord& b);

    friend bool operator==(const EdgeWord& a, const EdgeWord& b);

private:
    std::vector<EdgeId> head_;
    std::vector<EdgeId> cycle_;
    std::size_t size_ = 0;
};

struct TreeEdge {
    std::size_t tail = 0;  // vertex type nearer the basepoint
    std::size_t head = 0;
    double length = 1.0;
    std::string label;
};

/// Input edge of a finite tree description.
struct TreeEdgeSpec {
    std::string a;
    std::string b;
    double length = 1.0;
};

/*
 * A rooted metric tree given as the unfolding of a finite "type graph".
 *
 * Every vertex of the tree has a type; the outgoing edges of a type describe
 * the children of every vertex of that type. Finite trees read from a
 * description are their own type graph, with a unit "hair" self-loop hung on
 * every childless vertex so that each leaf carries an infinite branch.
 * Regular trees use a single type with k self-loops.
 *
 * Points are paths from the root: an edge word plus an offset on its last
 * edge in (0, length]; the root is the empty word with offset 0.
 */
class MetricTree {
public:
    static MetricTree from_edges(const std::vector<std::string>& vertices,
                                 const std::vector<TreeEdgeSpec>& edges,
                                 const std::string& basepoint, double hair_length = 1.0);
    static MetricTree regular(std::size_t branching, double edge_length = 1.0);

    std::size_t type_count() const { return children_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t root_type() const { return root_; }
    const TreeEdge& edge(EdgeId e) const;
    const std::vector<EdgeId>& children(std::size_t type) const;
    const std::vector<std::string>& type_names() const { return type_names_; }
    /// Edges added to extend leaves of a finite description.
    const std::vector<EdgeId>& hair_edges() const { return hairs_; }

    /// Throws std::invalid_argument unless the word is a path from the root.
    void validate_word(const EdgeWord& word) const;
    bool is_path(const EdgeWord& word) const;

    /// Sum of the first n edge lengths of the word.
    double prefix_depth(const EdgeWord& word, std::size_t n) const;
    /// Smallest n >= 1 with prefix_depth(word, n) >= depth, for depth > 0.
    std::size_t edges_to_reach(const EdgeWord& word, double depth) const;

    /// Infinite continuation: follows the word's cycle, or the first child
    /// repeatedly when the word has none.
    EdgeWord extension(const EdgeWord& word) const;

    /// All root-to-leaf-then-hair rays of a finite description.
    std::vector<EdgeWord> hair_rays() const;

private:
    std::vector<TreeEdge> edges_;
    std::vector<std::vector<EdgeId>> children_;
    std::vector<std::string> type_names_;
    std::vector<EdgeId> hairs_;
    std::size_t root_ = 0;
};

}  // namespace cat0

#endif
