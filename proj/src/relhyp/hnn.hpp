#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relhyp/covers.hpp"
#include "relhyp/graph.hpp"

namespace relhyp {

// Stable letter action on the edge subgroup C = <a>.
enum class HnnAction { kIdentity, kInversion };

// A *_C with A = Z = <a> or A = Z^2 = <a, b>, C = <a>, and t a t^-1 = a or a^-1.
struct HnnSpec {
    std::string name;
    std::string base = "Z";  // "Z" or "Z2"
    std::string edge = "a";  // generators of C inside A
    HnnAction action = HnnAction::kIdentity;
};

// Shipped models: "i" (Z^2), "ii" (Klein bottle group), "iii" (Z x F(b, t)).
HnnSpec hnn_model(const std::string& name);
void validate(const HnnSpec& spec);

// a^m w with w a reduced word in t, b and their inverses T, B.
struct HnnElement {
    std::int64_t m = 0;
    std::string w;

    bool operator==(const HnnElement&) const = default;
    std::string label() const;
    std::string key() const;
};

std::string reduce_word(std::string_view w);
std::string invert_word(std::string_view w);

class HnnGroup {
public:
    explicit HnnGroup(HnnSpec spec);
    const HnnSpec& spec() const { return spec_; }
    bool has_b() const { return has_b_; }
    bool twisted() const { return twisted_; }

    // a, A, t, T, then b, B when A = Z^2
    const std::vector<HnnElement>& generators() const { return gens_; }
    // w a = a^sigma(w) w
    int sigma(std::string_view w) const;
    HnnElement multiply(const HnnElement& x, const HnnElement& y) const;
    HnnElement inverse(const HnnElement& x) const;
    int length(const HnnElement& x) const { return static_cast<int>((x.m < 0 ? -x.m : x.m) + x.w.size()); }
    int distance(const HnnElement& x, const HnnElement& y) const { return length(multiply(inverse(x), y)); }
    // Word over a, A, t, T, b, B; "1" is the identity.
    HnnElement parse(std::string_view word) const;

private:
    HnnSpec spec_;
    bool has_b_ = false, twisted_ = false;
    std::vector<HnnElement> gens_;
};

struct HnnBall {
    HnnGroup group;
    int radius = 0;
    std::vector<HnnElement> elements;  // by length, then discovery order
    std::vector<int> length;
    WeightedGraph graph;               // unit Cayley edges x -- x s
    std::unordered_map<std::string, VertexId> index;

    VertexId find(const HnnElement& x) const;
};

std::size_t predicted_hnn_ball_size(const HnnSpec& spec, int radius);
// Throws kCapExceeded when the predicted size exceeds vertex_cap().
HnnBall build_hnn_ball(const HnnSpec& spec, int radius);

// Dual graph of the Bass-Serre tree, restricted to the cosets gC met by a ball.
// Coset gC is keyed by the free part of g; its Bass-Serre endpoints are gA and gtA.
struct DualGraphK {
    static constexpr std::uint32_t kNone = 0xffffffffu;

    std::vector<std::string> keys;
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<int> level;               // |u| = |u, C|
    std::vector<std::uint32_t> parent;    // next vertex towards C
    std::vector<std::array<std::uint32_t, 2>> ends;  // Bass-Serre vertices gA, gtA
    std::vector<std::vector<std::uint32_t>> clique;  // K-vertices at each Bass-Serre vertex
    std::vector<char> in_k1;   // C, and the side through the endpoint tA
    std::vector<char> reversed;  // the endpoint shared with the parent is gtA
    std::uint32_t base = 0;
    std::vector<std::uint32_t> coset_of;  // per ball vertex
    std::size_t reversed_count = 0;

    std::size_t size() const { return keys.size(); }
    // v lies on the geodesic [C, u]
    bool leq(std::uint32_t v, std::uint32_t u) const;
    bool adjacent(std::uint32_t u, std::uint32_t v) const;
    // C, ..., u along the geodesic
    std::vector<std::uint32_t> chain(std::uint32_t u) const;
};

// Throws kAssertion when some K-vertex has two parents.
DualGraphK build_dual_graph(const HnnBall& ball);

inline std::uint32_t dual_projection(const DualGraphK& k, VertexId x) { return k.coset_of[x]; }

struct LipschitzReport {
    std::size_t edges = 0;
    std::size_t violations = 0;
};

// |pi(x), pi(xs)| <= 1 on every ball edge.
LipschitzReport projection_lipschitz_scan(const HnnBall& ball, const DualGraphK& k);

// Literal: D^u_R = g_u D_R with g_u the free part of u.
// Oriented: {x : d(x, uC) = R, pi(x) >= u}, with pi(x) in K_1 when u = C.
// The two agree at every vertex that is not reversed.
enum class DConvention { kLiteral, kOriented };

const char* to_string(DConvention c);

// Exact group metric throughout. Throws when u is not in K_1 or R < 0.
std::vector<VertexId> compute_DR(const HnnBall& ball, const DualGraphK& k, int R, std::uint32_t u, DConvention c);

struct TripleCheck {
    bool hypotheses = false;  // u in K_1, v not >= u, u < u2 with |u2| - |u| > R
    bool separated = false;   // no ball path from pi^-1(v) to pi^-1(u2) avoids D^u_R
};

TripleCheck separation_check(const HnnBall& ball, const DualGraphK& k, std::uint32_t u, std::uint32_t v,
                             std::uint32_t u2, int R, DConvention c);

struct Tech1Report {
    int R = 0;
    int min_gap = 0;  // u2 qualifies when |u2| - |u| >= min_gap
    DConvention convention = DConvention::kLiteral;
    std::size_t centers = 0;   // u with at least one qualifying triple
    std::size_t triples = 0;
    std::size_t failures = 0;  // triples not separated
    std::array<std::string, 3> witness;  // first failing (u, v, u2)
    bool pass() const { return failures == 0; }
};

// Every u in K_1, v not >= u (not in K_1 when u = C), and u2 >= u with
// |u2| - |u| >= min_gap. The separation statement needs min_gap = R + 1.
Tech1Report tech1_scan(const HnnBall& ball, const DualGraphK& k, int R, DConvention c, int min_gap);

struct Tech2Report {
    int r = 0, R = 0;
    DConvention convention = DConvention::kLiteral;
    bool hypothesis = false;   // R <= r / 4
    std::size_t cosets = 0;    // u in K_1 with |u| in rN and D^u_R meeting the ball
    std::size_t pairs = 0;
    std::size_t failures = 0;  // coset pairs closer than 2R
    double min_distance = kInfinity;
    std::array<std::string, 2> witness;  // closest pair
    bool pass() const { return failures == 0; }
};

// |u| ranges over 0, r, 2r, ...
Tech2Report tech2_scan(const HnnBall& ball, const DualGraphK& k, int r, int R, DConvention c);

struct PartitionAudit {
    std::size_t region = 0;          // ball vertices of length <= radius - 1 with pi in K_1
    std::size_t uncovered = 0;       // region points in no piece and not within R of C
    std::size_t interior_overlaps = 0;
    std::size_t bad_incidences = 0;  // meeting pieces that are not parent and child r levels apart
    std::size_t intersection_mismatches = 0;  // V^u meet V^w differs from D^w_R
    std::size_t boundary_mismatches = 0;      // union of piece boundaries differs from union of D^u_R
    std::size_t z_points = 0;
    std::size_t cover_colors = 2;
    std::size_t cover_multiplicity = 0;  // r_multiplicity of the assembled cover of Z at scale R
    bool cover_holds = false;
    bool clean() const {
        return uncovered == 0 && interior_overlaps == 0 && bad_incidences == 0 && intersection_mismatches == 0 &&
               boundary_mismatches == 0 && cover_holds && cover_multiplicity <= cover_colors;
    }
};

struct HnnPartition {
    int r = 0, R = 0;
    std::vector<std::uint32_t> piece_coset;     // u of each piece, |u| in rN
    std::vector<std::vector<VertexId>> pieces;  // V^u_r within the region, ascending
    std::vector<VertexId> near_base;            // N_R(C) within pi^-1(K_1) and the region
    std::vector<VertexId> z;                    // union of the D^u_R within the region
    ColoredCover z_cover;                       // translates g_u U of a block cover U of D_R
    PartitionAudit audit;
};

// Oriented pieces V^u_r = {pi(x) >= u, d(x, uC) >= R} minus {pi(x) >= w, d(x, wC) > R}
// over the w >= u with |w| = |u| + r, for every |u| in rN including 0.
// Requires radius - 1 >= r + R so one full band fits.
HnnPartition build_partition(const HnnBall& ball, const DualGraphK& k, int r, int R);

// Rows: piece, coset, vertex label. Piece -1 holds N_R(C).
void write_partition_csv(const HnnBall& ball, const DualGraphK& k, const HnnPartition& p, std::ostream& out);

}  // namespace relhyp
