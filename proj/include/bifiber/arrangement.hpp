// Template points, anchors, point-line duality and the arrangement of
// anchor lines in the dual half-plane.

#pragma once

#include "bifiber/gf2.hpp"
#include "bifiber/line.hpp"
#include "bifiber/rational.hpp"

#include <array>
#include <map>
#include <optional>
#include <vector>

namespace bifiber {

// ---- duality ----

/// Point of the dual half-plane: (slope, -intercept).
struct DualPoint {
    Rational x;
    Rational y;

    friend bool operator==(const DualPoint&, const DualPoint&) = default;
};

/// y = ax + b  ->  (a, -b). Throws InputError for vertical lines.
DualPoint dual_ell(const LineSpec& line);

/// (c, d)  ->  y = cx - d.
LineSpec dual_p(const DualPoint& p);

// ---- template points ----

struct XiEntry {
    GridPoint point;
    int left = -1;   // nearest entry strictly left in the same row
    int down = -1;   // nearest entry strictly below in the same column
    bool support = false;
    bool anchor = false;
    std::array<std::vector<Index>, 2> low;  // columns of gr1 / gr2 lifted here
};

/// Sparse grid of the template points (support points and anchors).
struct XiMatrix {
    int nx = 0;
    int ny = 0;
    std::vector<XiEntry> entries;    // in lexicographic sweep order
    std::vector<int> rightmost;      // per row, -1 if the row is empty
    std::map<GridPoint, int> index;

    int find(GridPoint p) const {
        auto it = index.find(p);
        return it == index.end() ? -1 : it->second;
    }
    std::vector<GridPoint> anchors() const;
};

/// Single lexicographic sweep; u is an anchor iff entries exist to its left
/// and below, or u is a support point with an entry to its left or below.
XiMatrix build_xi_matrix(int nx, int ny, const std::vector<GridPoint>& support);

// ---- arrangement ----

/// Dual line of an anchor: y = slope * x - offset.
struct AnchorLine {
    Rational slope;
    Rational offset;

    Rational at(const Rational& x) const { return slope * x - offset; }
    friend bool operator==(const AnchorLine&, const AnchorLine&) = default;
};

class Dcel {
public:
    enum class EdgeKind { Line, Left, Right, Top, Bottom };

    struct Vertex {
        Rational x;
        Rational y;
        int incident = -1;  // one outgoing half-edge

        friend bool operator==(const Vertex&, const Vertex&) = default;
    };
    struct HalfEdge {
        int origin = -1;
        int twin = -1;
        int next = -1;
        int prev = -1;
        int face = -1;  // -1 outside the clip box
        int anchor = -1;
        EdgeKind kind = EdgeKind::Line;

        bool synthetic() const { return kind == EdgeKind::Right || kind == EdgeKind::Top || kind == EdgeKind::Bottom; }

        friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
    };
    struct Face {
        int boundary = -1;

        friend bool operator==(const Face&, const Face&) = default;
    };

    /// Arrangement of the given distinct lines, clipped to a box
    /// [0, xmax] x [ymin, ymax] containing every crossing with x > 0 and
    /// every intercept on x = 0.
    static Dcel build(const std::vector<AnchorLine>& lines);

    const std::vector<AnchorLine>& lines() const { return lines_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<HalfEdge>& half_edges() const { return half_edges_; }
    const std::vector<Face>& faces() const { return faces_; }
    std::size_t edge_count() const { return half_edges_.size() / 2; }

    const Rational& xmax() const { return xmax_; }
    const Rational& ymin() const { return ymin_; }
    const Rational& ymax() const { return ymax_; }
    int top_face() const { return top_face_; }
    int bottom_face() const { return bottom_face_; }

    const Vertex& dest(int h) const { return vertices_[static_cast<std::size_t>(half_edges_[static_cast<std::size_t>(half_edges_[static_cast<std::size_t>(h)].twin)].origin)]; }
    const Vertex& origin(int h) const { return vertices_[static_cast<std::size_t>(half_edges_[static_cast<std::size_t>(h)].origin)]; }

    /// Half-edges of a face's boundary cycle.
    std::vector<int> face_cycle(int f) const;

    /// Average of the face's vertices (an interior point; faces are convex).
    DualPoint interior_point(int f) const;

    /// Throws InvariantError on inconsistent links, non-closed cycles or a
    /// failed Euler count.
    void validate() const;

    friend bool operator==(const Dcel&, const Dcel&) = default;

    // Raw access for deserialization.
    struct Raw {
        std::vector<AnchorLine> lines;
        std::vector<Vertex> vertices;
        std::vector<HalfEdge> half_edges;
        std::vector<Face> faces;
        Rational xmax, ymin, ymax;
        int top_face = 0;
        int bottom_face = 0;
    };
    static Dcel from_raw(Raw raw);

private:
    std::vector<AnchorLine> lines_;
    std::vector<Vertex> vertices_;
    std::vector<HalfEdge> half_edges_;
    std::vector<Face> faces_;
    Rational xmax_, ymin_, ymax_;
    int top_face_ = 0;
    int bottom_face_ = 0;
};

struct Location {
    enum class Kind { Face, Edge, Vertex };
    Kind kind = Kind::Face;
    std::vector<int> faces;  // the face, or all faces whose closure contains the point (ascending)
};

/// Slab decomposition of a Dcel.
class Locator {
public:
    Locator() = default;
    explicit Locator(const Dcel& dcel);

    Location locate(const DualPoint& p) const;

    /// Face directly above the highest edge strictly below p on the
    /// vertical through p (the lowest face whose closure contains p).
    int face_below_or_at(const DualPoint& p) const;

private:
    struct SlabEdge {
        int line;   // supporting line, -1 for top/bottom
        int sign;   // +1 top, -1 bottom, 0 line
        int above;  // face above the edge
        int below;  // face below the edge, -1 outside the box
    };
    std::vector<AnchorLine> lines_;
    std::vector<Rational> xs_;
    std::vector<std::vector<SlabEdge>> slabs_;
    std::map<std::pair<Rational, Rational>, int> vertex_index_;

    int slab_of(const Rational& x) const;
    // -1, 0, +1: edge below, through, above p.
    int compare(const SlabEdge& e, const DualPoint& p) const;
};

/// Per slope, the topmost line and the face above its rightmost edge.
class VerticalLookup {
public:
    VerticalLookup() = default;
    explicit VerticalLookup(const Dcel& dcel);

    /// Face for the vertical line at the given (arrangement) x coordinate.
    int lookup(const Rational& x) const;

    const std::vector<std::pair<Rational, int>>& table() const { return table_; }

private:
    std::vector<std::pair<Rational, int>> table_;
    int bottom_face_ = 0;
};

struct DualEdge {
    int upper = -1;
    int lower = -1;
    int anchor = -1;  // index into Dcel::lines()
};

struct DualGraph {
    int node_count = 0;
    std::vector<DualEdge> edges;
};

DualGraph dual_graph(const Dcel& dcel);

}  // namespace bifiber
