#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "relhyp/graph.hpp"
#include "relhyp/group.hpp"

namespace relhyp {

struct ConedOffGraph {
    WeightedGraph graph;
    // k(k-1)/2 per coset, counted before merging with Cayley edges
    std::vector<std::size_t> cone_pairs;
    std::size_t total_cone_pairs = 0;
};

ConedOffGraph build_coned_off(const GroupSpace& g);

// pi_Y(x) for one coset Y and every ball vertex x, in the Cayley metric of the ball.
struct CosetProjection {
    std::vector<int> dist;            // d(x, C(Y))
    std::vector<std::uint32_t> start;  // per-vertex slice of `items`
    std::vector<std::uint32_t> count;
    std::vector<std::uint32_t> items;  // indices into the coset's vertex list

    std::span<const std::uint32_t> of(VertexId x) const { return {items.data() + start[x], count[x]}; }
};

CosetProjection project_all(const GroupSpace& g, std::size_t coset);

// The full argmin set as ball vertex ids, ascending.
std::vector<VertexId> closest_point_projection(const GroupSpace& g, std::size_t coset, VertexId x);

// Ambient distances among the listed coset points (local indices), as a dense matrix.
std::vector<int> coset_point_distances(const GroupSpace& g, std::size_t coset, std::span<const std::uint32_t> points);

// Table of diam(S_i u S_j) in the ambient ball metric for sets of local coset
// indices; the diagonal holds diam(S_i).
std::vector<int> projection_set_distances(const GroupSpace& g, std::size_t coset,
                                          const std::vector<std::vector<std::uint32_t>>& sets);

// Projections between the cosets that meet the inner ball |x| <= inner_radius.
// pi_Y(X) is the union of pi_Y(x) over inner vertices x of X.
struct ProjectionTable {
    const GroupSpace* group = nullptr;
    int inner_radius = 0;
    std::vector<std::uint32_t> scanned;  // registry indices
    // sets[y][x]: pi_Y(X) as ball vertex ids, for scanned positions y != x
    std::vector<std::vector<std::vector<VertexId>>> sets;
    // dpi[(y * n + x) * n + z] = d^pi_Y(X, Z); kUndefined when y is x or z
    std::vector<std::uint8_t> dpi;

    static constexpr std::uint8_t kUndefined = 255;
    std::size_t size() const { return scanned.size(); }
    std::uint8_t proj_distance(std::size_t y, std::size_t x, std::size_t z) const {
        return dpi[(y * size() + x) * size() + z];
    }
    // Position of a registry index among the scanned cosets, or -1.
    long position(std::uint32_t coset) const;
};

ProjectionTable build_projection_table(const GroupSpace& g, int inner_radius);

// Default inner radius: drops vertices within distance 2 of the sphere.
inline int default_inner_radius(int radius) { return radius - 3; }

struct AxiomReport {
    int radius = 0;
    int inner_radius = 0;
    std::size_t cosets = 0;
    std::size_t pairs = 0;
    std::size_t triples = 0;
    bool vacuous = true;
    int xi0 = 0;
    int xi3 = 0;
    // witnesses as registry indices
    std::uint32_t xi0_y = 0, xi0_x = 0;
    std::uint32_t xi3_y = 0, xi3_x = 0, xi3_z = 0;
    int probe = 1;
    std::size_t axiom4_max_count = 0;
    std::size_t axiom4_violations = 0;
    long axiom4_worst_slack = 0;  // max of count - (d_hat(rep X, rep Z) + 1)
    std::uint32_t axiom4_x = 0, axiom4_z = 0;
};

AxiomReport verify_axioms(const ProjectionTable& t, const ConedOffGraph& coned);

// Unordered pairs x != y with |x| + |y| <= R, grouped by x with |x| <= |y|.
struct PairSet {
    std::vector<VertexId> xs, ys;
    std::size_t size() const { return xs.size(); }
};

PairSet exact_region_pairs(const CayleyBall& ball);

struct FormulaPair {
    VertexId x, y;
    double d;
    double rhs;
    double dhat;
};

// Sum over ball cosets of the L-cutoff projection distances plus d_hat(x, y).
double distance_formula_eval(const GroupSpace& g, const ConedOffGraph& coned, VertexId x, VertexId y, double L);

// Every unordered pair with |x| + |y| <= R, evaluated in one pass over the cosets.
std::vector<FormulaPair> distance_formula_pairs(const GroupSpace& g, const ConedOffGraph& coned, double L);

// Constants for a/lambda - mu <= b <= lambda a + mu. mu starts at the least value
// any lambda allows (the largest b among pairs with a = 0), then lambda is the
// least that works with it. When no finite lambda works (a map collapsing
// distinct points) the fit falls back to lambda = 1, mu = max |a - b|, which is
// also reported on its own as unit_mu.
struct TwoSidedFit {
    std::size_t pairs = 0;
    double lambda = 1.0;
    double mu = 0.0;
    std::size_t worst = 0;  // a pair attaining the binding constraint
    bool fallback = false;
    double unit_mu = 0.0;
    std::size_t unit_worst = 0;
};

TwoSidedFit fit_two_sided(std::span<const double> a, std::span<const double> b);

struct DistanceFormulaFit {
    double L = 0;
    int radius = 0;
    TwoSidedFit fit;
    std::vector<FormulaPair> residuals;
};

DistanceFormulaFit fit_distance_formula(const GroupSpace& g, const ConedOffGraph& coned, double L);

void write_residuals_csv(const GroupSpace& g, const DistanceFormulaFit& fit, std::ostream& out);

}  // namespace relhyp
