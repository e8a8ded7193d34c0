#include "relhyp/covers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>

#include "json.hpp"
#include "relhyp/error.hpp"

namespace relhyp {

namespace {

constexpr double kTol = 1e-9;

// Bounded multi-source Dijkstra with a reusable distance array.
class BallScanner {
public:
    explicit BallScanner(const WeightedGraph& g) : g_(&g), dist_(g.num_vertices(), kInfinity) {}

    // Vertices within `radius` of `sources`, in settling order.
    const std::vector<VertexId>& scan(std::span<const VertexId> sources, double radius) {
        for (VertexId v : touched_) dist_[v] = kInfinity;
        touched_.clear();
        settled_.clear();
        using Item = std::pair<double, VertexId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (VertexId s : sources) {
            if (dist_[s] == 0) continue;
            dist_[s] = 0;
            touched_.push_back(s);
            pq.push({0.0, s});
        }
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist_[v]) continue;
            settled_.push_back(v);
            for (const Arc& a : g_->neighbors(v)) {
                double nd = d + a.length;
                if (nd > radius + kTol || nd >= dist_[a.to]) continue;
                if (dist_[a.to] == kInfinity) touched_.push_back(a.to);
                dist_[a.to] = nd;
                pq.push({nd, a.to});
            }
        }
        return settled_;
    }

    double dist(VertexId v) const { return dist_[v]; }

private:
    const WeightedGraph* g_;
    std::vector<double> dist_;
    std::vector<VertexId> touched_, settled_;
};

struct OpenSubset {
    std::vector<VertexId> members;
    double diam = 0;
};

double subset_diameter_exact(const WeightedGraph& g, std::span<const VertexId> s) {
    double diam = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto row = single_source_distances(g, s[i]);
        for (std::size_t j = i + 1; j < s.size(); ++j) diam = std::max(diam, row[s[j]]);
    }
    return diam;
}

// Largest diameter and smallest same-colour separation of a cover in g.
std::pair<double, double> diameter_and_separation(const WeightedGraph& g, const ColoredCover& cover) {
    double diam = 0, sep = kInfinity;
    for (const auto& cls : cover.classes) {
        for (std::size_t k = 0; k < cls.size(); ++k) {
            diam = std::max(diam, subset_diameter_exact(g, cls[k]));
            if (cls.size() < 2 || cls[k].empty()) continue;
            auto d = multi_source_distances(g, cls[k]);
            for (std::size_t k2 = k + 1; k2 < cls.size(); ++k2)
                for (VertexId v : cls[k2]) sep = std::min(sep, d[v]);
        }
    }
    return {diam, sep};
}

bool has_separated_pair(const ColoredCover& cover) {
    for (const auto& cls : cover.classes) {
        std::size_t n = 0;
        for (const auto& s : cls) n += s.empty() ? 0 : 1;
        if (n >= 2) return true;
    }
    return false;
}

// First vertex attaining the largest finite value of `row`.
VertexId farthest(const std::vector<double>& row) {
    VertexId best = 0;
    for (VertexId v = 0; v < row.size(); ++v)
        if (std::isfinite(row[v]) && row[v] > row[best]) best = v;
    return best;
}

// d(x, to) - d(x, from), or infinity off the component.
std::vector<double> axis_key(const WeightedGraph& g, VertexId from, VertexId to) {
    auto df = single_source_distances(g, from);
    auto dt = single_source_distances(g, to);
    std::vector<double> key(g.num_vertices(), kInfinity);
    for (VertexId v = 0; v < key.size(); ++v)
        if (std::isfinite(df[v]) && std::isfinite(dt[v])) key[v] = dt[v] - df[v];
    return key;
}

}  // namespace

std::vector<VertexId> sweep_order(const WeightedGraph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<VertexId> order(n);
    for (VertexId v = 0; v < n; ++v) order[v] = v;
    if (n == 0) return order;
    auto d0 = single_source_distances(g, 0);
    const VertexId a = farthest(d0);
    auto da = single_source_distances(g, a);
    const VertexId b = farthest(da);
    auto db = single_source_distances(g, b);
    // second axis: from the vertex farthest from both ends of the first
    std::vector<double> off(n, 0);
    for (VertexId v = 0; v < n; ++v)
        if (std::isfinite(da[v]) && std::isfinite(db[v])) off[v] = std::min(da[v], db[v]);
    const VertexId c = farthest(off);
    // farthest from c, and among those farthest from the first axis
    auto dc = single_source_distances(g, c);
    VertexId e = c;
    for (VertexId v = 0; v < n; ++v)
        if (std::isfinite(dc[v]) && std::pair(dc[v], off[v]) > std::pair(dc[e], off[e])) e = v;
    auto k1 = axis_key(g, a, b);
    auto k2 = axis_key(g, c, e);
    std::stable_sort(order.begin(), order.end(),
                     [&](VertexId x, VertexId y) { return std::pair(k1[x], k2[x]) < std::pair(k1[y], k2[y]); });
    return order;
}

std::size_t ColoredCover::num_subsets() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.size();
    return n;
}

std::size_t ColoredCover::nonempty_colors() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.empty() ? 0 : 1;
    return n;
}

GreedyCover greedy_colored_cover(const WeightedGraph& g, std::span<const VertexId> targets, const CoverSpec& spec) {
    require(spec.r > 0, "cover separation must be positive");
    require(spec.D >= spec.r, "cover diameter bound must be at least the separation");
    require(spec.n_colors >= 1, "cover needs at least one colour");
    std::vector<std::vector<OpenSubset>> open(spec.n_colors);
    GreedyCover out;
    for (VertexId v : targets) {
        require(v < g.num_vertices(), "cover target out of range");
        auto row = single_source_distances(g, v);
        bool placed = false;
        for (int c = 0; c < spec.n_colors && !placed; ++c) {
            long close = -1;
            bool blocked = false;
            double grown = 0;
            for (std::size_t k = 0; k < open[c].size(); ++k) {
                double dmin = kInfinity, dmax = 0;
                for (VertexId m : open[c][k].members) {
                    dmin = std::min(dmin, row[m]);
                    dmax = std::max(dmax, row[m]);
                }
                if (spec.strict ? dmin > spec.r + kTol : dmin >= spec.r - kTol) continue;
                if (close >= 0) {
                    blocked = true;
                    break;
                }
                close = static_cast<long>(k);
                grown = std::max(open[c][k].diam, dmax);
            }
            if (blocked) continue;
            if (close < 0) {
                open[c].push_back({{v}, 0});
                placed = true;
            } else if (grown <= spec.D + kTol) {
                open[c][close].members.push_back(v);
                open[c][close].diam = grown;
                placed = true;
            }
        }
        if (!placed) out.remainder.push_back(v);
    }
    out.cover.r = spec.r;
    out.cover.D = spec.D;
    out.cover.classes.resize(spec.n_colors);
    for (int c = 0; c < spec.n_colors; ++c)
        for (auto& s : open[c]) {
            std::sort(s.members.begin(), s.members.end());
            out.cover.classes[c].push_back(std::move(s.members));
        }
    return out;
}

GreedyCover greedy_colored_cover(const WeightedGraph& g, const CoverSpec& spec) {
    return greedy_colored_cover(g, sweep_order(g), spec);
}

CoverAudit audit_cover(const WeightedGraph& g, const ColoredCover& cover, std::span<const VertexId> targets) {
    CoverAudit a;
    std::tie(a.max_diameter, a.min_separation) = diameter_and_separation(g, cover);
    std::vector<std::uint32_t> count(g.num_vertices(), 0);
    for (const auto& cls : cover.classes)
        for (const auto& s : cls)
            for (VertexId v : s) {
                require(v < g.num_vertices(), "cover vertex out of range");
                if (count[v]++ > 0) ++a.overlaps;
            }
    for (VertexId t : targets)
        if (count[t] == 0) ++a.uncovered;
    a.holds = a.uncovered == 0 && a.max_diameter <= cover.D + kTol && a.min_separation >= cover.r - kTol;
    return a;
}

Multiplicity r_multiplicity(const WeightedGraph& g, const ColoredCover& cover, double r) {
    require(r >= 0, "multiplicity scale must be non-negative");
    std::vector<std::uint32_t> met(g.num_vertices(), 0);
    BallScanner scan(g);
    for (const auto& cls : cover.classes)
        for (const auto& s : cls)
            if (!s.empty())
                for (VertexId v : scan.scan(s, r / 2)) ++met[v];
    Multiplicity m;
    for (VertexId v = 0; v < met.size(); ++v)
        if (met[v] > m.value) {
            m.value = met[v];
            m.center = v;
        }
    return m;
}

double rescaled_distance(double d_base, int n) { return 2 * std::log1p(d_base * std::exp(-static_cast<double>(n))); }

HoroballCover horoball_cover(const WeightedGraph& base, const HoroballCoverParams& p) {
    require(p.base_colors >= 1, "horoball cover needs at least one base colour");
    require(p.R > 0, "horoball cover scale must be positive");
    require(p.base_ratio >= 1, "base cover ratio must be at least 1");
    HoroballCover hc;
    hc.horoball = build_horoball(base, p.depth);
    hc.band_height = std::max(1, static_cast<int>(std::lround(p.R)));
    hc.declared_scale = p.multiplicity_scale;
    const int colors = p.base_colors + 1;
    hc.cover.classes.resize(colors);
    hc.cover.r = 1;  // adjacent bands are one vertical edge apart
    std::vector<std::vector<int>> band_of(colors);
    const auto& h = hc.horoball;
    for (int j = 0, bottom = 0; bottom <= p.depth; ++j, bottom += hc.band_height) {
        HoroballBand band;
        band.bottom = bottom;
        band.top = std::min(p.depth, bottom + hc.band_height - 1);
        band.scale = std::ceil(std::min(std::exp(bottom + p.R), 1e15));
        band.bound = p.base_ratio * band.scale;
        auto greedy = greedy_colored_cover(base, {band.scale, band.bound, p.base_colors, false});
        if (!greedy.ok()) {
            hc.failed_band = j;
            hc.remainder = std::move(greedy.remainder);
            hc.bands.push_back(band);
            return hc;
        }
        band.subsets = greedy.cover.num_subsets();
        band.degenerate = !has_separated_pair(greedy.cover);
        std::tie(band.diam_base, band.sep_base) = diameter_and_separation(base, greedy.cover);
        band.diam_dn = rescaled_distance(band.diam_base, bottom);
        band.sep_dn = rescaled_distance(band.sep_base, bottom);
        band.ratio_dn = band.degenerate ? 0 : band.diam_dn / band.sep_dn;
        for (int c = 0; c < p.base_colors; ++c) {
            const int colour = (c + j) % colors;
            for (const auto& u : greedy.cover.classes[c]) {
                std::vector<VertexId> s;
                s.reserve(u.size() * (band.top - band.bottom + 1));
                for (int l = band.bottom; l <= band.top; ++l)
                    for (VertexId x : u) s.push_back(h.id(x, l));
                std::sort(s.begin(), s.end());
                hc.cover.classes[colour].push_back(std::move(s));
                band_of[colour].push_back(j);
            }
        }
        for (int l = band.bottom; l <= band.top; ++l)
            for (int l2 = l; l2 <= band.top; ++l2)
                hc.cover.D = std::max(hc.cover.D, horo_transit_distance(band.bound, l, l2, p.depth).distance);
        hc.bands.push_back(band);
    }
    for (const auto& b : band_of) hc.subset_band.insert(hc.subset_band.end(), b.begin(), b.end());
    hc.ok = true;
    return hc;
}

BandRatioSummary band_ratio_summary(const HoroballCover& hc) {
    BandRatioSummary s;
    for (const auto& b : hc.bands) {
        if (b.degenerate) continue;
        ++s.bands;
        s.ratio_min = std::min(s.ratio_min, b.ratio_dn);
        s.ratio_max = std::max(s.ratio_max, b.ratio_dn);
    }
    s.level_independent = s.bands > 0 && s.ratio_max <= 1.05 * s.ratio_min;
    return s;
}

PullbackSlice cover_pullback_check(const HoroballCover& hc, int level) {
    const auto& h = hc.horoball;
    if (level < 0 || level > h.depth) fail(ErrorCode::kInvalidArgument, "empty slice: level outside the horoball");
    ColoredCover slice;
    slice.classes.resize(hc.cover.num_colors());
    PullbackSlice out;
    out.level = level;
    for (std::size_t c = 0; c < hc.cover.num_colors(); ++c)
        for (const auto& s : hc.cover.classes[c]) {
            std::vector<VertexId> u;
            for (VertexId v : s)
                if (h.level_of(v) == level) u.push_back(h.base_of(v));
            if (u.empty()) continue;
            std::sort(u.begin(), u.end());
            slice.classes[c].push_back(std::move(u));
        }
    out.subsets = slice.num_subsets();
    if (out.subsets == 0) fail(ErrorCode::kInvalidArgument, "empty slice at level " + std::to_string(level));
    const WeightedGraph base = [&] {
        std::vector<Edge> es;
        for (const auto& e : h.graph.edges())
            if (h.level_of(e.u) == 0 && h.level_of(e.v) == 0) es.push_back(e);
        return WeightedGraph::build(h.base_size, es);
    }();
    std::tie(out.diam_base, out.sep_base) = diameter_and_separation(base, slice);
    out.degenerate = !has_separated_pair(slice);
    out.diam_dn = rescaled_distance(out.diam_base, level);
    out.sep_dn = rescaled_distance(out.sep_base, level);
    if (out.degenerate)
        out.ratio = 0;
    else
        out.ratio = out.sep_base > 0 ? out.diam_base / out.sep_base : kInfinity;
    return out;
}

PullbackSummary pullback_summary(const HoroballCover& hc, std::span<const int> levels) {
    PullbackSummary s;
    double big = 0, small = kInfinity;
    bool finite = true;
    for (int l : levels) {
        auto slice = cover_pullback_check(hc, l);
        if (!slice.degenerate) {
            ++s.measured;
            s.ratio_min = std::min(s.ratio_min, slice.ratio);
            s.ratio_max = std::max(s.ratio_max, slice.ratio);
            big = std::max(big, slice.diam_dn);
            small = std::min(small, slice.sep_dn);
            finite = finite && std::isfinite(slice.ratio);
        }
        s.slices.push_back(slice);
    }
    if (s.measured == 0) return s;
    s.bound = small > 0 ? std::expm1(big / 2) / std::expm1(small / 2) : kInfinity;
    s.bound_holds = finite && s.ratio_max <= s.bound * (1 + kTol);
    s.level_independent = finite && s.ratio_max <= 1.05 * s.ratio_min;
    return s;
}

SphereShadow sphere_shadow(const WeightedGraph& g, VertexId base, double R, double T) {
    require(T > R, "sphere radius must exceed the projection radius");
    require(base < g.num_vertices(), "base point out of range");
    SphereShadow s;
    s.dist = single_source_distances(g, base);
    const auto& d = s.dist;
    const std::size_t n = g.num_vertices();
    for (VertexId v = 0; v < n; ++v)
        if (d[v] >= T - kTol && d[v] < T + 1 - kTol) s.sphere.push_back(v);
    if (s.sphere.empty()) fail(ErrorCode::kInvalidArgument, "sphere empty");
    // Walk geodesics backwards from the sphere through vertices beyond R.
    std::vector<char> seen(n, 0), cross(n, 0);
    std::vector<VertexId> stack(s.sphere.begin(), s.sphere.end());
    for (VertexId v : stack) seen[v] = 1;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (const Arc& a : g.neighbors(v)) {
            if (std::abs(d[a.to] + a.length - d[v]) > kTol) continue;
            if (d[a.to] <= R + kTol)
                cross[a.to] = 1;
            else if (!seen[a.to]) {
                seen[a.to] = 1;
                stack.push_back(a.to);
            }
        }
    }
    for (VertexId v = 0; v < n; ++v)
        if (cross[v]) s.crossing.push_back(v);
    return s;
}

GreedyCover ball_cover(const WeightedGraph& g, VertexId base, double R, const CoverSpec& spec) {
    require(base < g.num_vertices(), "base point out of range");
    auto d = single_source_distances(g, base);
    std::vector<VertexId> targets;
    for (VertexId v : sweep_order(g))
        if (d[v] <= R + kTol) targets.push_back(v);
    return greedy_colored_cover(g, targets, spec);
}

BoundaryProjection boundary_cover_projection(const WeightedGraph& g, VertexId base, const ColoredCover& cover,
                                             const BoundaryProjectionParams& p) {
    require(p.epsilon > 0, "visual parameter must be positive");
    require(p.factor >= 1, "shape factor must be at least 1");
    auto shadow = sphere_shadow(g, base, p.R, p.T);
    const auto& d = shadow.dist;
    const std::size_t n = g.num_vertices();
    BoundaryProjection out;
    out.sphere = shadow.sphere;
    const std::size_t m = out.sphere.size();
    if (m > p.max_sphere)
        fail(ErrorCode::kCapExceeded, "sphere has " + std::to_string(m) + " points, above " + std::to_string(p.max_sphere));

    // Subsets get global ids in class-major order.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> slot;
    std::vector<std::vector<std::uint32_t>> near(n);
    BallScanner scan(g);
    for (std::uint32_t c = 0; c < cover.num_colors(); ++c)
        for (std::uint32_t k = 0; k < cover.classes[c].size(); ++k) {
            const auto id = static_cast<std::uint32_t>(slot.size());
            slot.push_back({c, k});
            if (cover.classes[c][k].empty()) continue;
            for (VertexId v : scan.scan(cover.classes[c][k], 1.0))
                if (d[v] <= p.R + kTol) near[v].push_back(id);
        }

    // tags[v]: subsets near the last vertex at distance <= R on some geodesic to v.
    std::vector<VertexId> order;
    for (VertexId v = 0; v < n; ++v)
        if (d[v] > p.R + kTol && d[v] < p.T + 1 - kTol) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return d[a] < d[b]; });
    std::vector<std::vector<std::uint32_t>> tags(n);
    for (VertexId v : order) {
        auto& t = tags[v];
        for (const Arc& a : g.neighbors(v)) {
            if (std::abs(d[a.to] + a.length - d[v]) > kTol) continue;
            const auto& src = d[a.to] <= p.R + kTol ? near[a.to] : tags[a.to];
            t.insert(t.end(), src.begin(), src.end());
        }
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }

    std::vector<std::vector<VertexId>> hat(slot.size());
    std::vector<std::vector<std::uint32_t>> member(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (auto id : tags[out.sphere[i]]) {
            hat[id].push_back(out.sphere[i]);
            member[i].push_back(id);
        }
        if (member[i].empty()) ++out.uncovered;
        out.point_multiplicity = std::max(out.point_multiplicity, member[i].size());
    }
    out.cover.r = 0;
    out.cover.D = 0;
    out.cover.classes.resize(cover.num_colors());
    for (std::uint32_t id = 0; id < slot.size(); ++id)
        if (!hat[id].empty()) out.cover.classes[slot[id].first].push_back(hat[id]);

    auto [t, s] = diameter_and_separation(g, cover);
    out.ball_diameter = t;
    out.ball_separation = s;

    // Gromov products between sphere points.
    std::vector<double> gp(m * m, 0);
    for (std::uint32_t i = 0; i < m; ++i) {
        auto row = single_source_distances(g, out.sphere[i]);
        for (std::uint32_t j = 0; j < m; ++j) gp[i * m + j] = (d[out.sphere[i]] + d[out.sphere[j]] - row[out.sphere[j]]) / 2;
    }
    auto rho = [&](std::uint32_t i, std::uint32_t j) { return i == j ? 0.0 : std::exp(-p.epsilon * gp[i * m + j]); };
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < member[i].size(); ++a)
            for (std::size_t b = a + 1; b < member[i].size(); ++b)
                if (slot[member[i][a]].first == slot[member[i][b]].first) out.visual_separation = 0;
        for (std::uint32_t j = i + 1; j < m; ++j) {
            const double r = rho(i, j);
            for (auto a : member[i])
                for (auto b : member[j]) {
                    if (a == b)
                        out.visual_diameter = std::max(out.visual_diameter, r);
                    else if (slot[a].first == slot[b].first)
                        out.visual_separation = std::min(out.visual_separation, r);
                }
        }
    }
    out.sep_shape = std::exp(-p.epsilon * (p.R - s / 2));
    out.diam_shape = std::exp(-p.epsilon * (p.R - t / 2));
    out.sep_ratio = std::isfinite(s) ? out.visual_separation / out.sep_shape : kInfinity;
    out.diam_ratio = out.visual_diameter / out.diam_shape;
    out.shapes_hold = out.sep_ratio >= 1 / p.factor && out.diam_ratio <= p.factor;
    out.shapes_match = out.shapes_hold && out.sep_ratio <= p.factor && out.diam_ratio >= 1 / p.factor;

    const double witness = out.visual_separation / 2;
    std::vector<char> hit(slot.size(), 0);
    std::vector<std::uint32_t> hits;
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = 0; j < m; ++j) {
            if (rho(i, j) > witness + kTol) continue;
            for (auto id : member[j])
                if (!hit[id]) {
                    hit[id] = 1;
                    hits.push_back(id);
                }
        }
        out.visual_multiplicity = std::max(out.visual_multiplicity, hits.size());
        for (auto id : hits) hit[id] = 0;
        hits.clear();
    }
    return out;
}

ColoredCover sphere_singletons(const WeightedGraph& g, VertexId base, double R) {
    auto d = single_source_distances(g, base);
    ColoredCover c;
    c.r = 1;
    c.D = 0;
    c.classes.resize(1);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        if (std::abs(d[v] - R) <= kTol) c.classes[0].push_back({v});
    return c;
}

void write_cover_json(const ColoredCover& cover, std::ostream& out) {
    nlohmann::ordered_json j;
    j["r"] = cover.r;
    j["D"] = cover.D;
    j["classes"] = cover.classes;
    out << j.dump() << '\n';
}

ColoredCover read_cover_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        ColoredCover c;
        c.r = j.at("r").get<double>();
        c.D = j.at("D").get<double>();
        c.classes = j.at("classes").get<std::vector<std::vector<std::vector<VertexId>>>>();
        for (auto& cls : c.classes)
            for (auto& s : cls) std::sort(s.begin(), s.end());
        return c;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::kParse, std::string("cover JSON: ") + e.what());
    }
}

}  // namespace relhyp
