#include "relhyp/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "relhyp/error.hpp"

namespace relhyp {

WeightedGraph point_tree() { return WeightedGraph::build(1, {}); }

namespace {

// Coordinate lines from exponent vectors, one line per coordinate.
std::vector<TreeTarget> abelian_lines(const std::vector<std::vector<int>>& exps, int rank) {
    std::vector<TreeTarget> out;
    for (int j = 0; j < rank; ++j) {
        int lo = 0, hi = 0;
        for (const auto& e : exps) {
            lo = std::min(lo, e[j]);
            hi = std::max(hi, e[j]);
        }
        TreeTarget t;
        t.tree = path_graph(static_cast<std::size_t>(hi - lo));
        for (const auto& e : exps) t.image.push_back(static_cast<VertexId>(e[j] - lo));
        out.push_back(std::move(t));
    }
    return out;
}

TreeTarget identity_tree(WeightedGraph g) {
    if (!g.is_tree()) fail(ErrorCode::kAssertion, "peripheral graph is not a tree");
    TreeTarget t;
    t.image.resize(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v) t.image[v] = v;
    t.tree = std::move(g);
    return t;
}

TreeTarget point_target(std::size_t n) {
    TreeTarget t;
    t.tree = point_tree();
    t.image.assign(n, 0);
    return t;
}

// Exponents of the trailing syllable when it lies in `factor`, else zeros.
std::vector<int> trailing_exponents(const Element& e, int factor, int rank) {
    const auto& syl = e.syllables();
    if (!syl.empty() && syl.back().factor == factor) return syl.back().data;
    return std::vector<int>(rank, 0);
}

ProductEmbedding compose_with_final(const GroupSpace& g, const ProjectionComplex& complex) {
    const std::size_t m = max_tree_count(*g.spec);
    ProductEmbedding f;
    f.group = &g;
    auto canon = canonical_cosets(g);
    f.nearest_assigned = canon.nearest_assigned;
    const std::size_t n = complex.cosets.size();
    std::vector<std::vector<TreeTarget>> trees(n);
    for (std::size_t i = 0; i < n; ++i) {
        trees[i] = coset_trees(g, complex.cosets[i]);
        const std::size_t k = g.cosets.cosets[complex.cosets[i]].vertices.size();
        while (trees[i].size() < m) trees[i].push_back(point_target(k));
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<WeightedGraph> pieces;
        for (std::size_t i = 0; i < n; ++i) pieces.push_back(trees[i][j].tree);
        EdgeImages images(complex.edges.size());
        for (std::size_t e = 0; e < complex.edges.size(); ++e) {
            std::uint32_t ends[2] = {complex.edges[e].first, complex.edges[e].second};
            for (int s = 0; s < 2; ++s) {
                auto& out = images[e][s];
                for (auto li : complex.images[e][s]) out.push_back(trees[ends[s]][j].image[li]);
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
            }
        }
        auto q = build_quasitree_of_spaces(complex, pieces, images);
        std::vector<VertexId> img(g.ball.size(), kNoVertex);
        for (VertexId v = 0; v < g.ball.size(); ++v) {
            long pos = complex.position(canon.coset[v]);
            if (pos < 0) continue;
            img[v] = q.vertex(pos, trees[pos][j].image[canon.local[v]]);
        }
        f.coords.push_back(std::move(q.graph));
        f.image.push_back(std::move(img));
    }
    return f;
}

}  // namespace

std::vector<TreeTarget> coset_trees(const GroupSpace& g, std::size_t coset) {
    const Coset& c = g.cosets.cosets.at(coset);
    const RelHypSpec& spec = *g.spec;
    if (spec.mode == PeripheralMode::kCyclic) return {identity_tree(c.subgraph())};
    require(spec.mode == PeripheralMode::kAll, "no peripheral cosets in this mode");
    const FactorSpec& fs = spec.factors[c.peripheral];
    switch (fs.kind) {
        case FactorKind::kFreeAbelian: {
            std::vector<std::vector<int>> exps;
            for (VertexId v : c.vertices) exps.push_back(trailing_exponents(g.ball.elements[v], c.peripheral, fs.n));
            return abelian_lines(exps, fs.n);
        }
        case FactorKind::kFree: return {identity_tree(c.subgraph())};
        case FactorKind::kCyclic: return {point_target(c.vertices.size())};
    }
    return {};
}

std::size_t peripheral_tree_count(const RelHypSpec& spec, std::size_t peripheral) {
    if (spec.mode == PeripheralMode::kCyclic) return 1;
    const FactorSpec& fs = spec.factors.at(peripheral);
    return fs.kind == FactorKind::kFreeAbelian ? static_cast<std::size_t>(fs.n) : 1;
}

std::size_t max_tree_count(const RelHypSpec& spec) {
    std::size_t m = 0;
    for (std::size_t p = 0; p < spec.num_peripherals(); ++p) m = std::max(m, peripheral_tree_count(spec, p));
    return m;
}

CanonicalCosets canonical_cosets(const GroupSpace& g) {
    CanonicalCosets out;
    const std::size_t n = g.ball.size();
    out.coset.assign(n, kNoVertex);
    out.local.assign(n, 0);
    const auto& cosets = g.cosets.cosets;
    for (VertexId v = 0; v < n; ++v) {
        const auto& mem = g.cosets.member[v];
        if (mem.empty()) continue;
        out.coset[v] = *std::min_element(mem.begin(), mem.end());
        const auto& verts = cosets[out.coset[v]].vertices;
        out.local[v] = static_cast<std::uint32_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    }
    // Layered BFS from all coset points; labels (coset, point) take the minimum over parents.
    std::vector<int> dist(n, -1);
    std::vector<VertexId> layer, next;
    for (VertexId v = 0; v < n; ++v) {
        if (out.coset[v] != kNoVertex) {
            dist[v] = 0;
            layer.push_back(v);
        }
    }
    if (layer.empty()) return out;
    for (int d = 1; !layer.empty(); ++d) {
        next.clear();
        for (VertexId v : layer)
            for (const Arc& a : g.ball.graph.neighbors(v)) {
                VertexId w = a.to;
                if (dist[w] == -1) {
                    dist[w] = d;
                    next.push_back(w);
                    out.coset[w] = out.coset[v];
                    out.local[w] = out.local[v];
                } else if (dist[w] == d && std::pair(out.coset[v], out.local[v]) < std::pair(out.coset[w], out.local[w])) {
                    out.coset[w] = out.coset[v];
                    out.local[w] = out.local[v];
                }
            }
        out.nearest_assigned += next.size();
        std::swap(layer, next);
    }
    return out;
}

FactorEmbedding peripheral_embedding(const FactorSpec& factor, int radius) {
    RelHypSpec spec;
    spec.factors = {factor};
    spec.mode = PeripheralMode::kNone;
    spec.validate();
    FactorEmbedding fe;
    fe.space = std::make_unique<GroupSpace>(build_group_space(spec, radius));
    const GroupSpace& g = *fe.space;
    std::vector<TreeTarget> trees;
    switch (factor.kind) {
        case FactorKind::kFreeAbelian: {
            std::vector<std::vector<int>> exps;
            for (const auto& e : g.ball.elements) exps.push_back(trailing_exponents(e, 0, factor.n));
            trees = abelian_lines(exps, factor.n);
            break;
        }
        case FactorKind::kFree: trees.push_back(identity_tree(g.ball.graph)); break;
        case FactorKind::kCyclic: trees.push_back(point_target(g.ball.size())); break;
    }
    fe.embedding.group = &g;
    for (auto& t : trees) {
        fe.embedding.coords.push_back(std::move(t.tree));
        fe.embedding.image.push_back(std::move(t.image));
    }
    return fe;
}

ProductEmbedding compose_embedding(const GroupSpace& g, const ProjectionComplex& complex, const ConedOffGraph& coned) {
    ProductEmbedding f = compose_with_final(g, complex);
    f.final_kind = "coned_off";
    f.final_graph = coned.graph;
    f.final_image.resize(g.ball.size());
    for (VertexId v = 0; v < g.ball.size(); ++v) f.final_image[v] = v;
    return f;
}

ProductEmbedding compose_embedding(const GroupSpace& g, const ProjectionComplex& complex, const BowditchBall& bowditch) {
    require(bowditch.group == &g, "Bowditch ball built from another space");
    ProductEmbedding f = compose_with_final(g, complex);
    f.final_kind = "bowditch";
    f.final_graph = bowditch.graph;
    f.final_image.resize(g.ball.size());
    // Cayley vertices keep their ids at level 0.
    for (VertexId v = 0; v < g.ball.size(); ++v) f.final_image[v] = v;
    return f;
}

JoinEmbedding free_product_join(const GroupSpace& g) {
    const RelHypSpec& spec = *g.spec;
    require(spec.mode == PeripheralMode::kAll && spec.factors.size() == 2, "join needs two factors in all mode");
    const std::size_t m = max_tree_count(spec);
    const auto& cosets = g.cosets.cosets;
    JoinEmbedding j;
    j.embedding.group = &g;
    j.factor_trees.resize(cosets.size());
    for (std::size_t ci = 0; ci < cosets.size(); ++ci) {
        j.factor_trees[ci] = coset_trees(g, ci);
        while (j.factor_trees[ci].size() < m) j.factor_trees[ci].push_back(point_target(cosets[ci].vertices.size()));
    }
    // The two cosets through each element, as (coset, local index).
    const std::size_t n = g.ball.size();
    std::vector<std::array<std::pair<std::uint32_t, std::uint32_t>, 2>> ends(n);
    for (VertexId v = 0; v < n; ++v) {
        const auto& mem = g.cosets.member[v];
        if (mem.size() != 2) fail(ErrorCode::kInternal, "element not on exactly two factor cosets");
        for (int s = 0; s < 2; ++s) {
            const auto& verts = cosets[mem[s]].vertices;
            auto li = static_cast<std::uint32_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
            ends[v][cosets[mem[s]].peripheral] = {mem[s], li};
        }
    }
    auto canon = canonical_cosets(g);
    j.offset.assign(m, std::vector<std::size_t>(cosets.size()));
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t total = 0;
        std::vector<Edge> edges;
        for (std::size_t ci = 0; ci < cosets.size(); ++ci) {
            j.offset[k][ci] = total;
            const auto& t = j.factor_trees[ci][k];
            for (const Edge& e : t.tree.edges()) {
                edges.push_back({static_cast<VertexId>(total + e.u), static_cast<VertexId>(total + e.v), e.length});
            }
            total += t.tree.num_vertices();
        }
        if (total > vertex_cap()) {
            fail(ErrorCode::kCapExceeded, "cap exceeded (predicted " + std::to_string(total) + " > cap " + std::to_string(vertex_cap()) + ")");
        }
        auto at = [&](std::pair<std::uint32_t, std::uint32_t> p) {
            return static_cast<VertexId>(j.offset[k][p.first] + j.factor_trees[p.first][k].image[p.second]);
        };
        for (VertexId v = 0; v < n; ++v) edges.push_back({at(ends[v][0]), at(ends[v][1]), 1.0});
        WeightedGraph tree = WeightedGraph::build(total, edges);
        if (!tree.is_connected()) fail(ErrorCode::kInternal, "joined tree is disconnected");
        std::vector<VertexId> img(n);
        for (VertexId v = 0; v < n; ++v) img[v] = at({canon.coset[v], canon.local[v]});
        j.embedding.coords.push_back(std::move(tree));
        j.embedding.image.push_back(std::move(img));
    }
    return j;
}

double join_restriction_error(const JoinEmbedding& j) {
    const GroupSpace& g = *j.embedding.group;
    double worst = 0;
    for (std::size_t k = 0; k < j.embedding.num_trees(); ++k) {
        const WeightedGraph& t = j.embedding.coords[k];
        for (std::size_t ci = 0; ci < g.cosets.cosets.size(); ++ci) {
            const auto& verts = g.cosets.cosets[ci].vertices;
            for (std::uint32_t li = 0; li < verts.size(); ++li) {
                VertexId want = static_cast<VertexId>(j.offset[k][ci] + j.factor_trees[ci][k].image[li]);
                VertexId got = j.embedding.image[k][verts[li]];
                if (want == got) continue;
                double d = kInfinity;
                for (const Arc& a : t.neighbors(got))
                    if (a.to == want) d = a.length;
                if (!std::isfinite(d)) d = single_source_distances(t, got)[want];
                worst = std::max(worst, d);
            }
        }
    }
    return worst;
}

std::vector<double> product_distances(const ProductEmbedding& f, const PairSet& pairs) {
    std::vector<double> out(pairs.size(), 0.0);
    for (VertexId v : pairs.xs) require(v < f.group->ball.size(), "pair outside the domain");
    auto add_coordinate = [&](const WeightedGraph& target, const std::vector<VertexId>& img) {
        std::vector<double> row;
        VertexId current = kNoVertex;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            VertexId a = img[pairs.xs[i]], b = img[pairs.ys[i]];
            if (a == kNoVertex || b == kNoVertex) fail(ErrorCode::kInvalidArgument, "vertex outside the embedding's domain");
            if (pairs.xs[i] != current) {
                current = pairs.xs[i];
                row = single_source_distances(target, a);
            }
            out[i] += row[b];
        }
    };
    for (std::size_t k = 0; k < f.num_trees(); ++k) add_coordinate(f.coords[k], f.image[k]);
    if (!f.final_kind.empty()) add_coordinate(f.final_graph, f.final_image);
    return out;
}

DistortionReport distortion_report(const ProductEmbedding& f, const PairSet& pairs) {
    require(pairs.size() > 0, "distortion needs at least one pair");
    DistortionReport r;
    r.pairs = pairs.size();
    r.image = product_distances(f, pairs);
    r.d.resize(pairs.size());
    std::vector<double> row;
    VertexId current = kNoVertex;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs.xs[i] != current) {
            current = pairs.xs[i];
            row = single_source_distances(f.group->ball.graph, current);
        }
        r.d[i] = row[pairs.ys[i]];
    }
    r.fit = fit_two_sided(r.d, r.image);
    r.worst_x = pairs.xs[r.fit.worst];
    r.worst_y = pairs.ys[r.fit.worst];
    r.worst_d = r.d[r.fit.worst];
    r.worst_image = r.image[r.fit.worst];
    return r;
}

void write_embedding_csv(const ProductEmbedding& f, std::ostream& out) {
    out << "label";
    for (std::size_t k = 0; k < f.num_trees(); ++k) out << ",t" << k;
    if (!f.final_kind.empty()) out << ',' << f.final_kind;
    out << '\n';
    const auto& ball = f.group->ball;
    for (VertexId v = 0; v < ball.size(); ++v) {
        out << ball.graph.label(v);
        for (std::size_t k = 0; k < f.num_trees(); ++k) {
            out << ',';
            if (f.image[k][v] != kNoVertex) out << f.image[k][v];
        }
        if (!f.final_kind.empty()) out << ',' << f.final_image[v];
        out << '\n';
    }
}

}  // namespace relhyp
