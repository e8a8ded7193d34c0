#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relhyp/graph.hpp"
#include "relhyp/horoball.hpp"

namespace relhyp {

// Subsets within one class are pairwise r-separated; every subset has
// diameter at most D. Both are declared values, checked by audit_cover.
struct ColoredCover {
    double r = 0;
    double D = 0;
    // classes[c][k]: ascending vertex ids of the k-th subset of colour c
    std::vector<std::vector<std::vector<VertexId>>> classes;

    std::size_t num_colors() const { return classes.size(); }
    std::size_t num_subsets() const;
    std::size_t nonempty_colors() const;
};

struct CoverSpec {
    double r = 1;
    double D = 1;
    int n_colors = 1;
    // true: same-colour subsets end more than r apart; false: at least r apart
    bool strict = true;
};

struct GreedyCover {
    ColoredCover cover;
    std::vector<VertexId> remainder;  // targets no colour could take

    bool ok() const { return remainder.empty(); }
};

// Canonical scan order: ascending d(x, b) - d(x, a) for a diametral pair a, b,
// then the same key for a second pair starting farthest from both, then id.
// On a path from vertex 0 this is id order; on a grid ball it is row-major.
std::vector<VertexId> sweep_order(const WeightedGraph& g);

// First-fit scan of `targets` in the given order. A vertex joins the unique
// subset of its colour within distance r (closer than r when not strict) when
// the diameter stays within D, or opens a new subset when none is that close.
// Strict covers have r-multiplicity at most the colour count.
GreedyCover greedy_colored_cover(const WeightedGraph& g, std::span<const VertexId> targets, const CoverSpec& spec);
// Scans every vertex in sweep_order.
GreedyCover greedy_colored_cover(const WeightedGraph& g, const CoverSpec& spec);

struct CoverAudit {
    double max_diameter = 0;
    double min_separation = kInfinity;  // over distinct subsets of one colour
    std::size_t uncovered = 0;          // targets in no subset
    std::size_t overlaps = 0;           // vertex memberships beyond the first
    bool holds = false;                 // declared r and D both hold and nothing is uncovered
};

CoverAudit audit_cover(const WeightedGraph& g, const ColoredCover& cover, std::span<const VertexId> targets);

struct Multiplicity {
    std::size_t value = 0;
    VertexId center = kNoVertex;
};

// Largest number of subsets met by a closed ball of radius r/2 around a vertex.
Multiplicity r_multiplicity(const WeightedGraph& g, const ColoredCover& cover, double r);

double rescaled_distance(double d_base, int n);

// d_n(x, y) = 2 ln(d(x, y) e^{-n} + 1) on top of a base oracle.
class RescaledMetric {
public:
    RescaledMetric(const MetricOracle& base, int n) : base_(&base), n_(n) {}
    int level() const { return n_; }
    double dist(VertexId x, VertexId y) const { return rescaled_distance(base_->dist(x, y), n_); }

private:
    const MetricOracle* base_;
    int n_;
};

struct HoroballCoverParams {
    int depth = 8;
    double R = 2;            // scan scale; also the band height, rounded
    int base_colors = 2;     // m + 1
    double base_ratio = 2;   // D / r of each base cover
    double multiplicity_scale = 2;
};

struct HoroballBand {
    int bottom = 0, top = 0;
    double scale = 0;  // e^{bottom + R}, rounded up; the base separation r
    double bound = 0;  // base_ratio * scale; the base diameter bound D
    std::size_t subsets = 0;
    bool degenerate = false;  // no colour holds two subsets, so no separation is measured
    // measured in the base metric, then read in d_n at n = bottom
    double diam_base = 0, sep_base = kInfinity;
    double diam_dn = 0, sep_dn = kInfinity;
    double ratio_dn = 0;
};

struct HoroballCover {
    HoroballGraph horoball;
    ColoredCover cover;
    std::vector<HoroballBand> bands;
    std::vector<int> subset_band;  // band of each subset, in class-major order
    int band_height = 1;
    double declared_scale = 2;
    bool ok = false;
    int failed_band = -1;
    std::vector<VertexId> remainder;  // base vertices left over at the failed band
};

// Band j covers levels [j h, (j+1) h) with h = max(1, round(R)). Its subsets are
// U x band for U in a greedy cover of the base at separation e^{jh + R}; colour
// c of U becomes (c + j) mod (m + 2).
HoroballCover horoball_cover(const WeightedGraph& base, const HoroballCoverParams& p);

struct BandRatioSummary {
    std::size_t bands = 0;  // non-degenerate bands
    double ratio_min = kInfinity, ratio_max = 0;
    bool level_independent = false;  // ratio_max / ratio_min <= 1.05
};

BandRatioSummary band_ratio_summary(const HoroballCover& hc);

struct PullbackSlice {
    int level = 0;
    std::size_t subsets = 0;
    bool degenerate = false;
    double diam_base = 0, sep_base = kInfinity;
    double diam_dn = 0, sep_dn = kInfinity;
    double ratio = 0;  // diam_base / sep_base; infinite when same-colour subsets touch
};

// The level-n slice of a horoball cover read back in the base metric.
PullbackSlice cover_pullback_check(const HoroballCover& hc, int level);

struct PullbackSummary {
    std::vector<PullbackSlice> slices;
    std::size_t measured = 0;  // non-degenerate slices
    double ratio_min = kInfinity, ratio_max = 0;
    // (e^{R/2} - 1) / (e^{r/2} - 1) with R the largest d_n diameter and r the
    // smallest d_n separation over the measured slices
    double bound = 0;
    bool bound_holds = false;
    bool level_independent = false;  // ratio_max / ratio_min <= 1.05
};

PullbackSummary pullback_summary(const HoroballCover& hc, std::span<const int> levels);

struct BoundaryProjectionParams {
    double R = 3;
    double T = 5;
    double epsilon = 0.2;
    double factor = 4;       // allowed constant against the two shapes
    std::size_t max_sphere = 6000;
};

// Vertices in [T, T + 1) from the base, and the last vertex at distance <= R
// on each of their geodesics.
struct SphereShadow {
    std::vector<VertexId> sphere;
    std::vector<VertexId> crossing;  // ascending
    std::vector<double> dist;        // from the base
};

SphereShadow sphere_shadow(const WeightedGraph& g, VertexId base, double R, double T);

struct BoundaryProjection {
    std::vector<VertexId> sphere;
    ColoredCover cover;  // nonempty projected subsets of the sphere, in graph ids
    std::size_t uncovered = 0;
    double ball_separation = kInfinity, ball_diameter = 0;  // s and t of the input cover
    double visual_separation = kInfinity, visual_diameter = 0;
    double sep_shape = 0, diam_shape = 0;  // e^{-eps (R - s/2)}, e^{-eps (R - t/2)}
    double sep_ratio = 0, diam_ratio = 0;  // measured over shape
    bool shapes_hold = false;              // sep_ratio >= 1/factor and diam_ratio <= factor
    bool shapes_match = false;             // both ratios within [1/factor, factor]
    std::size_t point_multiplicity = 0;    // most projected subsets through one sphere point
    std::size_t visual_multiplicity = 0;   // witness balls of radius visual_separation / 2
};

// U-hat: sphere points whose geodesic from the base has its last vertex at
// distance <= R within 1 of U.
BoundaryProjection boundary_cover_projection(const WeightedGraph& g, VertexId base, const ColoredCover& cover,
                                             const BoundaryProjectionParams& p);

// Greedy cover of the closed ball B(base, R), scanned in sweep_order.
GreedyCover ball_cover(const WeightedGraph& g, VertexId base, double R, const CoverSpec& spec);

// Singletons of the R-sphere in one colour.
ColoredCover sphere_singletons(const WeightedGraph& g, VertexId base, double R);

// {"r":..,"D":..,"classes":[[[ids..],..],..]}
void write_cover_json(const ColoredCover& cover, std::ostream& out);
ColoredCover read_cover_json(std::istream& in);

}  // namespace relhyp
