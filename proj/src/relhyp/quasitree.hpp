#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relhyp/graph.hpp"
#include "relhyp/projections.hpp"

namespace relhyp {

// Vertices are cosets (registry indices in `cosets`), numbered by position.
struct ProjectionComplex {
    double K = 0;
    bool below_xi3 = false;  // K <= xi3; the rule is then not expected to give a tree-like complex
    int inner_radius = 0;
    std::vector<std::uint32_t> cosets;
    WeightedGraph graph;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // x < z
    // images[e] = {pi_X(Z), pi_Z(X)} for edges[e] = (X, Z), as local coset indices
    std::vector<std::array<std::vector<std::uint32_t>, 2>> images;

    long position(std::uint32_t coset) const;
};

// Edge {X, Z} iff d^pi_Y(X, Z) <= K for every other scanned Y.
ProjectionComplex build_projection_complex(const ProjectionTable& t, double K, int xi3);

// Same rule and vertex set as the table version without storing d^pi. Cost is
// roughly the number of coset pairs times the pairs whose projections differ.
ProjectionComplex build_projection_complex(const GroupSpace& g, int inner_radius, double K, int xi3);

struct QuasiTreeOfSpaces {
    WeightedGraph graph;
    std::vector<std::size_t> offset;  // first vertex of each piece
    std::vector<std::uint32_t> piece_of;
    std::vector<VertexId> local_of;
    std::size_t bridges = 0;

    VertexId vertex(std::size_t piece, VertexId local) const { return static_cast<VertexId>(offset[piece] + local); }
};

// One piece per complex vertex; images[e] holds the piece vertices standing for
// the two projections of complex edge e.
using EdgeImages = std::vector<std::array<std::vector<VertexId>, 2>>;

QuasiTreeOfSpaces build_quasitree_of_spaces(const ProjectionComplex& complex, const std::vector<WeightedGraph>& pieces,
                                            const EdgeImages& images);

// Pieces C(Y) with the complex's own projection images.
struct CosetPieces {
    std::vector<WeightedGraph> pieces;
    EdgeImages images;
};

CosetPieces coset_pieces(const GroupSpace& g, const ProjectionComplex& complex);

void write_quasitree_annotations(const QuasiTreeOfSpaces& q, const std::vector<std::string>& piece_names,
                                 std::ostream& out);

struct BottleneckReport {
    double delta = 0;
    std::size_t pairs = 0;
    bool exhaustive = false;
    // pairs that no midpoint ball separates before d(x, y) <= 2 delta takes over
    std::size_t failures = 0;
    VertexId x = kNoVertex, y = kNoVertex, m = kNoVertex;  // a pair and midpoint forcing delta
};

// Smallest delta on the grid 0, 0.5, 1, ... such that for each pair (x, y) and every
// near-midpoint m on a geodesic, removing the closed ball B(m, delta) separates x
// from y, or d(x, y) <= 2 delta. Pairs are exhaustive when they fit in `max_pairs`.
BottleneckReport bottleneck_check(const WeightedGraph& g, std::size_t max_pairs, std::uint64_t seed);

}  // namespace relhyp
