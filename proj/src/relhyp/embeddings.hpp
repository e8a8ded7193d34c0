#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "relhyp/bowditch.hpp"
#include "relhyp/projections.hpp"
#include "relhyp/quasitree.hpp"

namespace relhyp {

struct TreeTarget {
    WeightedGraph tree;
    std::vector<VertexId> image;  // per domain vertex
};

WeightedGraph point_tree();

// Tree coordinates of one coset, on its vertices in local order: Z^n gives n
// coordinate lines, F_n and cyclic-mode peripherals their own coset graph, and
// finite cyclic factors a point.
std::vector<TreeTarget> coset_trees(const GroupSpace& g, std::size_t coset);

// Trees per peripheral, and m = their maximum.
std::size_t peripheral_tree_count(const RelHypSpec& spec, std::size_t peripheral);
std::size_t max_tree_count(const RelHypSpec& spec);

// Y(x): the smallest registry index among cosets through x. Vertices on no coset
// (cyclic mode) take the nearest coset, ties broken by registry index, and the
// smallest closest point in it.
struct CanonicalCosets {
    std::vector<std::uint32_t> coset;
    std::vector<std::uint32_t> local;  // point of Y(x) standing for x
    std::size_t nearest_assigned = 0;
};

CanonicalCosets canonical_cosets(const GroupSpace& g);

// Coordinates are tree-like graphs; distances add up (l1). The final coordinate,
// when present, is the coned-off graph or the Bowditch ball.
struct ProductEmbedding {
    const GroupSpace* group = nullptr;
    std::vector<WeightedGraph> coords;
    std::vector<std::vector<VertexId>> image;  // image[j][v]
    std::string final_kind;                    // "", "coned_off" or "bowditch"
    WeightedGraph final_graph;
    std::vector<VertexId> final_image;
    std::size_t nearest_assigned = 0;

    std::size_t num_trees() const { return coords.size(); }
};

// The factor on its own: a single-factor space of the given radius and its tree maps.
struct FactorEmbedding {
    std::unique_ptr<GroupSpace> space;
    ProductEmbedding embedding;
};

FactorEmbedding peripheral_embedding(const FactorSpec& factor, int radius);

// p_j(x) is the image of x in piece Y(x) of the j-th quasi-tree of spaces, built
// over `complex` from the coset trees; c is the inclusion into the final space.
ProductEmbedding compose_embedding(const GroupSpace& g, const ProjectionComplex& complex, const ConedOffGraph& coned);
ProductEmbedding compose_embedding(const GroupSpace& g, const ProjectionComplex& complex, const BowditchBall& bowditch);

// Two-factor free products: copies of the factor trees over the Bass-Serre
// vertices in the ball, joined by a unit edge at each element.
struct JoinEmbedding {
    ProductEmbedding embedding;
    // offset[k][coset]: first vertex of that coset's copy in tree k
    std::vector<std::vector<std::size_t>> offset;
    std::vector<std::vector<TreeTarget>> factor_trees;  // per coset, padded to num_trees
};

JoinEmbedding free_product_join(const GroupSpace& g);

// Largest distance in any tree coordinate between f(x) and the copy of the
// coset's own map at x, over all cosets and their points.
double join_restriction_error(const JoinEmbedding& j);

// Sum over coordinates plus the final coordinate.
std::vector<double> product_distances(const ProductEmbedding& f, const PairSet& pairs);

struct DistortionReport {
    TwoSidedFit fit;
    std::size_t pairs = 0;
    VertexId worst_x = kNoVertex, worst_y = kNoVertex;
    double worst_d = 0, worst_image = 0;
    std::vector<double> d, image;  // per pair
};

// d is the ambient word distance, image the product distance.
DistortionReport distortion_report(const ProductEmbedding& f, const PairSet& pairs);

// label, then one column per coordinate, then the final coordinate if any.
void write_embedding_csv(const ProductEmbedding& f, std::ostream& out);

}  // namespace relhyp
