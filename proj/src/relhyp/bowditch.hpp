#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relhyp/graph.hpp"
#include "relhyp/group.hpp"

namespace relhyp {

struct BowditchBall {
    const GroupSpace* group = nullptr;
    WeightedGraph graph;
    int radius = 0;
    int depth = 0;
    VertexId base_point = 0;
    std::size_t cayley_size = 0;
    // Per vertex: horoball level (0 on the Cayley ball), the Cayley vertex below
    // it, and the owning coset (-1 for Cayley vertices).
    std::vector<int> level;
    std::vector<VertexId> shadow;
    std::vector<std::int32_t> owner;
    // first_id[c]: id of coset c's (level 1, local 0) vertex
    std::vector<VertexId> first_id;

    VertexId horo_vertex(std::size_t coset, std::size_t local, int lvl) const;
};

std::size_t predicted_bowditch_size(const GroupSpace& g, int depth);

// Depth 0 gives the Cayley ball itself. Level 0 of each horoball is identified
// with the coset's ball vertices.
BowditchBall build_bowditch(const GroupSpace& g, int depth);

double gromov_product(const MetricOracle& o, VertexId x, VertexId y, VertexId base);

struct VisualParams {
    double epsilon = 0.2;
    double c0 = 1.0;  // carried for annotation only
};

// e^{-eps (x|y)}; x and y must differ.
double visual_quasimetric(const MetricOracle& o, const VisualParams& p, VertexId x, VertexId y, VertexId base);

struct HyperbolicityReport {
    double delta = 0.0;
    std::size_t sphere_pool = 0;
    std::size_t random_pool = 0;
    std::size_t quadruples = 0;
    std::size_t skipped = 0;
    bool sphere_exhaustive = false;
    bool random_exhaustive = false;
    Quadruple argmax{};
};

// Four-point estimate over quadruples from two seeded pools: vertices of the
// Cayley sphere of radius R, and uniformly random vertices of the whole space.
// Each pool is scanned exhaustively when its quadruple count fits the budget.
HyperbolicityReport delta_estimate(const BowditchBall& b, std::size_t budget, std::uint64_t seed);

// Largest rho(x,z) / max(rho(x,y), rho(y,z)) over seeded triples of `points`.
double quasi_ultrametric_defect(const MetricOracle& o, const VisualParams& p, std::span<const VertexId> points,
                                VertexId base, std::size_t samples, std::uint64_t seed);

// CSV rows: label, reference label, Gromov product, rho.
void write_sphere_csv(const BowditchBall& b, const MetricOracle& o, const VisualParams& p,
                      std::span<const VertexId> sphere, std::span<const VertexId> refs, std::ostream& out);

std::string bowditch_label(const BowditchBall& b, VertexId v);

}  // namespace relhyp
