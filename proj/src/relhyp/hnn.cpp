#include "relhyp/hnn.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <set>

#include "relhyp/error.hpp"

namespace relhyp {

namespace {

char invert_letter(char c) {
    switch (c) {
        case 't': return 'T';
        case 'T': return 't';
        case 'b': return 'B';
        case 'B': return 'b';
        default: fail(ErrorCode::kInternal, std::string("bad free letter ") + c);
    }
}

std::string strip_b(std::string w) {
    while (!w.empty() && (w.back() == 'b' || w.back() == 'B')) w.pop_back();
    return w;
}

// Reduced g^-1 x for free parts g and x.
std::string relative_word(std::string_view g, std::string_view x) {
    std::string s = invert_word(g);
    s.append(x);
    return reduce_word(s);
}

int free_distance(std::string_view g, std::string_view x) { return static_cast<int>(relative_word(g, x).size()); }

std::string coset_label(const DualGraphK& k, std::uint32_t u) { return k.keys[u].empty() ? "1" : k.keys[u]; }

bool starts_k1(const std::string& w) { return w.empty() || w[0] == 't'; }

// D^u_R membership of ball vertex x.
bool in_dr(const HnnBall& ball, const DualGraphK& k, int R, std::uint32_t u, VertexId x, DConvention c) {
    const std::string y = relative_word(k.keys[u], ball.elements[x].w);
    if (static_cast<int>(y.size()) != R) return false;
    if (c == DConvention::kLiteral) return starts_k1(y);
    const auto px = k.coset_of[x];
    return u == k.base ? k.in_k1[px] != 0 : k.leq(u, px);
}

void require_k1(const DualGraphK& k, std::uint32_t u) {
    require(u < k.size(), "coset out of range");
    require(k.in_k1[u], "coset " + coset_label(k, u) + " is not in K_1");
}

// v < u or v incomparable with u; outside K_1 when u = C.
bool below_or_beside(const DualGraphK& k, std::uint32_t u, std::uint32_t v) {
    return u == k.base ? !k.in_k1[v] : !k.leq(u, v);
}

// Reduced words of length n over the free letters of the group.
std::vector<std::string> free_sphere(const HnnGroup& G, int n) {
    const std::string letters = G.has_b() ? "tTbB" : "tT";
    std::vector<std::string> out{""};
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> next;
        for (const auto& w : out)
            for (char c : letters)
                if (w.empty() || w.back() != invert_letter(c)) next.push_back(w + c);
        out = std::move(next);
    }
    return out;
}

std::vector<std::uint32_t> label_components(const WeightedGraph& g, const std::vector<char>& blocked) {
    const std::uint32_t none = 0xffffffffu;
    std::vector<std::uint32_t> comp(g.num_vertices(), none);
    std::uint32_t next = 0;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < g.num_vertices(); ++s) {
        if (blocked[s] || comp[s] != none) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (const Arc& a : g.neighbors(v))
                if (!blocked[a.to] && comp[a.to] == none) {
                    comp[a.to] = next;
                    stack.push_back(a.to);
                }
        }
        ++next;
    }
    return comp;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

HnnSpec hnn_model(const std::string& name) {
    if (name == "i" || name == "Z2") return {"i", "Z", "a", HnnAction::kIdentity};
    if (name == "ii" || name == "klein") return {"ii", "Z", "a", HnnAction::kInversion};
    if (name == "iii" || name == "ZxF2") return {"iii", "Z2", "a", HnnAction::kIdentity};
    fail(ErrorCode::kParse, "unknown HNN model '" + name + "'");
}

void validate(const HnnSpec& spec) {
    if (spec.base != "Z" && spec.base != "Z2") fail(ErrorCode::kParse, "HNN base must be Z or Z2, got '" + spec.base + "'");
    if (spec.edge != "a") fail(ErrorCode::kParse, "HNN edge subgroup must be generated by a, got '" + spec.edge + "'");
}

std::string HnnElement::label() const {
    if (m == 0 && w.empty()) return "1";
    std::string s(static_cast<std::size_t>(m < 0 ? -m : m), m < 0 ? 'A' : 'a');
    return s + w;
}

std::string HnnElement::key() const { return std::to_string(m) + ":" + w; }

std::string reduce_word(std::string_view w) {
    std::string out;
    for (char c : w) {
        if (!out.empty() && out.back() == invert_letter(c))
            out.pop_back();
        else
            out.push_back(c);
    }
    return out;
}

std::string invert_word(std::string_view w) {
    std::string out(w.rbegin(), w.rend());
    for (char& c : out) c = invert_letter(c);
    return out;
}

HnnGroup::HnnGroup(HnnSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    has_b_ = spec_.base == "Z2";
    twisted_ = spec_.action == HnnAction::kInversion;
    gens_ = {{1, ""}, {-1, ""}, {0, "t"}, {0, "T"}};
    if (has_b_) {
        gens_.push_back({0, "b"});
        gens_.push_back({0, "B"});
    }
}

int HnnGroup::sigma(std::string_view w) const {
    if (!twisted_) return 1;
    std::size_t n = std::count(w.begin(), w.end(), 't') + std::count(w.begin(), w.end(), 'T');
    return n % 2 == 0 ? 1 : -1;
}

HnnElement HnnGroup::multiply(const HnnElement& x, const HnnElement& y) const {
    return {x.m + sigma(x.w) * y.m, reduce_word(x.w + y.w)};
}

HnnElement HnnGroup::inverse(const HnnElement& x) const { return {-sigma(x.w) * x.m, invert_word(x.w)}; }

HnnElement HnnGroup::parse(std::string_view word) const {
    HnnElement x;
    if (word == "1") return x;
    for (char c : word) {
        std::size_t i = std::string_view("aAtTbB").find(c);
        if (i == std::string_view::npos || (i >= 4 && !has_b_))
            fail(ErrorCode::kParse, "bad letter '" + std::string(1, c) + "' in HNN word");
        x = multiply(x, gens_[i]);
    }
    return x;
}

VertexId HnnBall::find(const HnnElement& x) const {
    auto it = index.find(x.key());
    return it == index.end() ? kNoVertex : it->second;
}

std::size_t predicted_hnn_ball_size(const HnnSpec& spec, int radius) {
    validate(spec);
    require(radius >= 0, "ball radius must be non-negative");
    const bool b = spec.base == "Z2";
    long double total = 0, words = 1;
    for (int L = 0; L <= radius; ++L) {
        if (L == 1) words = b ? 4 : 2;
        if (L > 1 && b) words *= 3;
        total += words * (2.0L * (radius - L) + 1);
    }
    return total > 1e18L ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

HnnBall build_hnn_ball(const HnnSpec& spec, int radius) {
    const std::size_t predicted = predicted_hnn_ball_size(spec, radius);
    if (predicted > vertex_cap())
        fail(ErrorCode::kCapExceeded, "HNN ball of radius " + std::to_string(radius) + " has " +
                                          std::to_string(predicted) + " vertices, above the cap of " +
                                          std::to_string(vertex_cap()));
    HnnBall ball{HnnGroup(spec), radius, {}, {}, {}, {}};
    const auto& G = ball.group;
    ball.elements.push_back({});
    ball.length.push_back(0);
    ball.index.emplace(HnnElement{}.key(), 0);
    for (std::size_t i = 0; i < ball.elements.size(); ++i) {
        if (ball.length[i] == radius) continue;
        for (const auto& s : G.generators()) {
            HnnElement y = G.multiply(ball.elements[i], s);
            if (G.length(y) != ball.length[i] + 1) continue;
            if (ball.index.emplace(y.key(), static_cast<VertexId>(ball.elements.size())).second) {
                ball.elements.push_back(y);
                ball.length.push_back(ball.length[i] + 1);
            }
        }
    }
    std::vector<Edge> edges;
    for (VertexId x = 0; x < ball.elements.size(); ++x)
        for (std::size_t gi = 0; gi < G.generators().size(); gi += 2) {
            VertexId y = ball.find(G.multiply(ball.elements[x], G.generators()[gi]));
            if (y != kNoVertex) edges.push_back({x, y, 1.0});
        }
    ball.graph = WeightedGraph::build(ball.elements.size(), edges);
    std::vector<std::string> labels;
    labels.reserve(ball.elements.size());
    for (const auto& e : ball.elements) labels.push_back(e.label());
    ball.graph.set_labels(std::move(labels));
    return ball;
}

bool DualGraphK::leq(std::uint32_t v, std::uint32_t u) const {
    while (level[u] > level[v]) u = parent[u];
    return u == v;
}

bool DualGraphK::adjacent(std::uint32_t u, std::uint32_t v) const {
    return u != v && (ends[u][0] == ends[v][0] || ends[u][0] == ends[v][1] || ends[u][1] == ends[v][0] ||
                      ends[u][1] == ends[v][1]);
}

std::vector<std::uint32_t> DualGraphK::chain(std::uint32_t u) const {
    std::vector<std::uint32_t> c(level[u] + 1);
    for (int l = level[u]; l >= 0; --l, u = parent[u]) c[l] = u;
    return c;
}

DualGraphK build_dual_graph(const HnnBall& ball) {
    DualGraphK k;
    k.coset_of.resize(ball.elements.size());
    std::unordered_map<std::string, std::uint32_t> bs;
    auto bs_id = [&](std::string key) {
        auto [it, fresh] = bs.emplace(std::move(key), static_cast<std::uint32_t>(bs.size()));
        if (fresh) k.clique.emplace_back();
        return it->second;
    };
    for (VertexId x = 0; x < ball.elements.size(); ++x) {
        const std::string& w = ball.elements[x].w;
        auto [it, fresh] = k.index.emplace(w, static_cast<std::uint32_t>(k.keys.size()));
        if (fresh) {
            const auto id = it->second;
            k.keys.push_back(w);
            std::array<std::uint32_t, 2> e{bs_id(strip_b(w)), bs_id(strip_b(reduce_word(w + "t")))};
            k.ends.push_back(e);
            k.clique[e[0]].push_back(id);
            k.clique[e[1]].push_back(id);
        }
        k.coset_of[x] = it->second;
    }
    const std::size_t n = k.keys.size();
    k.base = k.index.at("");
    k.level.assign(n, -1);
    k.parent.assign(n, DualGraphK::kNone);
    k.in_k1.assign(n, 0);
    k.reversed.assign(n, 0);
    k.level[k.base] = 0;
    k.in_k1[k.base] = 1;
    std::deque<std::uint32_t> q{k.base};
    while (!q.empty()) {
        const auto u = q.front();
        q.pop_front();
        for (int side = 0; side < 2; ++side)
            for (auto v : k.clique[k.ends[u][side]]) {
                if (v == u) continue;
                if (k.level[v] < 0) {
                    k.level[v] = k.level[u] + 1;
                    k.parent[v] = u;
                    // the side shared with the parent decides orientation and half
                    k.reversed[v] = k.ends[v][1] == k.ends[u][side];
                    k.in_k1[v] = u == k.base ? side == 1 : k.in_k1[u];
                    q.push_back(v);
                } else if (k.level[v] == k.level[u] + 1 && k.parent[v] != u) {
                    fail(ErrorCode::kAssertion, "dual graph vertex " + coset_label(k, v) + " has two geodesics to C");
                }
            }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (k.level[v] < 0) fail(ErrorCode::kAssertion, "dual graph is disconnected at " + coset_label(k, v));
        if (k.in_k1[v] && k.reversed[v]) ++k.reversed_count;
    }
    return k;
}

LipschitzReport projection_lipschitz_scan(const HnnBall& ball, const DualGraphK& k) {
    LipschitzReport r;
    for (const Edge& e : ball.graph.edges()) {
        ++r.edges;
        const auto cu = k.coset_of[e.u], cv = k.coset_of[e.v];
        if (cu != cv && !k.adjacent(cu, cv)) ++r.violations;
    }
    return r;
}

const char* to_string(DConvention c) { return c == DConvention::kLiteral ? "literal" : "oriented"; }

std::vector<VertexId> compute_DR(const HnnBall& ball, const DualGraphK& k, int R, std::uint32_t u, DConvention c) {
    require(R >= 0, "D_R needs R >= 0");
    require_k1(k, u);
    std::vector<VertexId> out;
    for (VertexId x = 0; x < ball.elements.size(); ++x)
        if (in_dr(ball, k, R, u, x, c)) out.push_back(x);
    return out;
}

TripleCheck separation_check(const HnnBall& ball, const DualGraphK& k, std::uint32_t u, std::uint32_t v,
                             std::uint32_t u2, int R, DConvention c) {
    require_k1(k, u);
    require(v < k.size() && u2 < k.size(), "coset out of range");
    TripleCheck t;
    t.hypotheses = below_or_beside(k, u, v) && u2 != u && k.leq(u, u2) && k.level[u2] - k.level[u] > R;
    std::vector<char> blocked(ball.elements.size(), 0);
    for (VertexId x : compute_DR(ball, k, R, u, c)) blocked[x] = 1;
    std::vector<VertexId> sources;
    for (VertexId x = 0; x < ball.elements.size(); ++x)
        if (k.coset_of[x] == v && !blocked[x]) sources.push_back(x);
    auto reach = reachable_avoiding(ball.graph, sources, blocked);
    t.separated = true;
    for (VertexId x = 0; x < ball.elements.size(); ++x)
        if (k.coset_of[x] == u2 && reach[x]) t.separated = false;
    return t;
}

Tech1Report tech1_scan(const HnnBall& ball, const DualGraphK& k, int R, DConvention c, int min_gap) {
    require(R >= 0, "tech1 needs R >= 0");
    require(min_gap >= 1, "tech1 gap must be positive");
    Tech1Report rep;
    rep.R = R;
    rep.min_gap = min_gap;
    rep.convention = c;
    const std::size_t n = k.size();
    const std::size_t nx = ball.elements.size();
    std::vector<std::uint32_t> stamp(n, 0xffffffffu);
    std::vector<char> blocked(nx);
    for (std::uint32_t u = 0; u < n; ++u) {
        if (!k.in_k1[u]) continue;
        // 0: other, 1: v-type, 2: u2-type
        std::vector<char> type(n, 0);
        std::size_t nv = 0, nu2 = 0;
        for (std::uint32_t w = 0; w < n; ++w) {
            if (below_or_beside(k, u, w)) {
                type[w] = 1;
                ++nv;
            } else if (w != u && k.leq(u, w) && k.level[w] - k.level[u] >= min_gap) {
                type[w] = 2;
                ++nu2;
            }
        }
        if (nv == 0 || nu2 == 0) continue;
        ++rep.centers;
        rep.triples += nv * nu2;
        for (VertexId x = 0; x < nx; ++x) blocked[x] = in_dr(ball, k, R, u, x, c) ? 1 : 0;
        auto comp = label_components(ball.graph, blocked);
        // distinct (component, coset) incidences per type
        std::vector<std::pair<std::uint32_t, std::uint32_t>> vin, uin;
        for (VertexId x = 0; x < nx; ++x) {
            if (blocked[x]) continue;
            const auto w = k.coset_of[x];
            if (type[w] == 1) vin.push_back({comp[x], w});
            if (type[w] == 2) uin.push_back({comp[x], w});
        }
        for (auto* s : {&vin, &uin}) {
            std::sort(s->begin(), s->end());
            s->erase(std::unique(s->begin(), s->end()), s->end());
        }
        std::map<std::uint32_t, std::vector<std::uint32_t>> ucomp;
        for (auto [cc, w] : uin) ucomp[cc].push_back(w);
        std::map<std::uint32_t, std::vector<std::uint32_t>> vcomps;
        for (auto [cc, w] : vin)
            if (ucomp.count(cc)) vcomps[w].push_back(cc);
        for (const auto& [v, comps] : vcomps) {
            std::size_t hit = 0;
            for (auto cc : comps)
                for (auto w : ucomp[cc])
                    if (stamp[w] != v) {
                        stamp[w] = v;
                        ++hit;
                    }
            for (auto cc : comps)
                for (auto w : ucomp[cc]) stamp[w] = 0xffffffffu;
            if (hit > 0 && rep.failures == 0)
                rep.witness = {coset_label(k, u), coset_label(k, v), coset_label(k, ucomp[comps.front()].front())};
            rep.failures += hit;
        }
    }
    return rep;
}

Tech2Report tech2_scan(const HnnBall& ball, const DualGraphK& k, int r, int R, DConvention c) {
    require(r >= 1, "tech2 needs r >= 1");
    require(R >= 0, "tech2 needs R >= 0");
    Tech2Report rep;
    rep.r = r;
    rep.R = R;
    rep.convention = c;
    rep.hypothesis = 4 * R <= r;
    // x lies on D^u_R only for u = x y^-1 with |y| = R
    std::map<std::uint32_t, std::vector<VertexId>> by_coset;
    const auto sphere = free_sphere(ball.group, R);
    for (VertexId x = 0; x < ball.elements.size(); ++x)
        for (const auto& y : sphere) {
            auto it = k.index.find(reduce_word(ball.elements[x].w + invert_word(y)));
            if (it == k.index.end()) continue;
            const auto u = it->second;
            if (k.in_k1[u] && k.level[u] % r == 0 && in_dr(ball, k, R, u, x, c)) by_coset[u].push_back(x);
        }
    std::vector<std::vector<VertexId>> sets;
    for (auto& [u, s] : by_coset) sets.push_back(std::move(s));
    rep.cosets = sets.size();
    const auto& G = ball.group;
    std::vector<HnnElement> inv(ball.elements.size());
    for (const auto& s : sets)
        for (VertexId x : s) inv[x] = G.inverse(ball.elements[x]);
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            ++rep.pairs;
            double best = kInfinity;
            std::array<std::string, 2> arg;
            for (VertexId x : sets[i])
                for (VertexId y : sets[j]) {
                    const double d = G.length(G.multiply(inv[x], ball.elements[y]));
                    if (d < best) {
                        best = d;
                        arg = {ball.elements[x].label(), ball.elements[y].label()};
                    }
                }
            if (best < 2.0 * R) ++rep.failures;
            if (best < rep.min_distance) {
                rep.min_distance = best;
                rep.witness = arg;
            }
        }
    return rep;
}

HnnPartition build_partition(const HnnBall& ball, const DualGraphK& k, int r, int R) {
    require(r >= 1 && R >= 1, "partition needs r >= 1 and R >= 1");
    if (ball.radius - 1 < r + R)
        fail(ErrorCode::kInvalidArgument, "exact region of radius " + std::to_string(ball.radius - 1) +
                                              " is smaller than one band r + R = " + std::to_string(r + R));
    HnnPartition p;
    p.r = r;
    p.R = R;
    const std::size_t nx = ball.elements.size();
    std::map<std::uint32_t, std::uint32_t> piece_of;  // coset -> piece index
    for (std::uint32_t u = 0; u < k.size(); ++u)
        if (k.in_k1[u] && k.level[u] % r == 0) piece_of.emplace(u, 0);
    for (auto& [u, i] : piece_of) {
        i = static_cast<std::uint32_t>(p.piece_coset.size());
        p.piece_coset.push_back(u);
    }
    p.pieces.resize(p.piece_coset.size());

    // Per vertex: pieces containing it, and the coset of the D^u_R it lies on.
    std::vector<std::vector<std::uint32_t>> member(nx);
    std::vector<std::uint32_t> on_d(nx, DualGraphK::kNone);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::size_t, std::size_t>> meets;  // meet, mismatch
    std::vector<std::vector<std::uint32_t>> chains(nx);
    std::vector<std::vector<int>> dist(nx);
    for (VertexId x = 0; x < nx; ++x) {
        const auto px = k.coset_of[x];
        if (!k.in_k1[px]) continue;
        chains[x] = k.chain(px);
        const auto& ch = chains[x];
        auto& dx = dist[x];
        dx.resize(ch.size());
        for (std::size_t l = 0; l < ch.size(); l += r) dx[l] = free_distance(k.keys[ch[l]], ball.elements[x].w);
        for (std::size_t l = 0; l < ch.size(); l += r) {
            if (dx[l] == R && on_d[x] == DualGraphK::kNone) on_d[x] = ch[l];
            const bool cut = l + r < ch.size() && dx[l + r] > R;
            if (dx[l] >= R && !cut) member[x].push_back(piece_of.at(ch[l]));
        }
    }
    std::vector<char> in_region(nx, 0);
    for (VertexId x = 0; x < nx; ++x)
        if (ball.length[x] <= ball.radius - 1 && k.in_k1[k.coset_of[x]]) in_region[x] = 1;

    auto& a = p.audit;
    std::set<VertexId> z_boundary;
    for (VertexId x = 0; x < nx; ++x) {
        if (!in_region[x]) continue;
        ++a.region;
        const bool near = ball.elements[x].w.size() <= static_cast<std::size_t>(R);
        if (near) p.near_base.push_back(x);
        if (member[x].empty() && !near) ++a.uncovered;
        std::size_t interior = 0;
        for (auto pi : member[x]) {
            p.pieces[pi].push_back(x);
            bool inside = true;
            for (const Arc& e : ball.graph.neighbors(x)) {
                const auto& my = member[e.to];
                inside = inside && std::find(my.begin(), my.end(), pi) != my.end();
            }
            if (inside)
                ++interior;
            else
                z_boundary.insert(x);
        }
        if (interior > 1) ++a.interior_overlaps;
        // meeting pieces must be r levels apart on one chain
        for (std::size_t i = 0; i < member[x].size(); ++i)
            for (std::size_t j = i + 1; j < member[x].size(); ++j) {
                const auto u = p.piece_coset[member[x][i]], w = p.piece_coset[member[x][j]];
                const bool ok = (k.leq(u, w) && k.level[w] == k.level[u] + r) || (k.leq(w, u) && k.level[u] == k.level[w] + r);
                if (!ok) ++a.bad_incidences;
            }
        // V^u meet V^w against D^w_R, for consecutive band cosets on this chain
        const auto& ch = chains[x];
        for (std::size_t l = 0; l + r < ch.size(); l += r) {
            const auto pu = piece_of.at(ch[l]), pw = piece_of.at(ch[l + r]);
            const auto& mx = member[x];
            const bool both = std::find(mx.begin(), mx.end(), pu) != mx.end() && std::find(mx.begin(), mx.end(), pw) != mx.end();
            const bool on = dist[x][l + r] == R;
            auto& m = meets[{ch[l], ch[l + r]}];
            m.first += both;
            m.second += both != on;
        }
    }
    for (const auto& [key, m] : meets)
        if (m.first > 0) a.intersection_mismatches += m.second;

    for (VertexId x = 0; x < nx; ++x)
        if (in_region[x] && on_d[x] != DualGraphK::kNone) p.z.push_back(x);
    a.z_points = p.z.size();
    std::vector<VertexId> zb(z_boundary.begin(), z_boundary.end());
    std::vector<VertexId> diff;
    std::set_symmetric_difference(zb.begin(), zb.end(), p.z.begin(), p.z.end(), std::back_inserter(diff));
    a.boundary_mismatches = diff.size();

    // Blocks of length 2R along C in each g_u^-1 D^u_R, two colours by parity.
    const auto& G = ball.group;
    const std::int64_t B = 2 * R;
    std::map<std::pair<std::uint32_t, std::int64_t>, std::vector<VertexId>> blocks;
    for (VertexId x : p.z) {
        const auto u = on_d[x];
        const HnnElement y = G.multiply(G.inverse({0, k.keys[u]}), ball.elements[x]);
        blocks[{u, floor_div(y.m, B)}].push_back(x);
    }
    p.z_cover.r = R;
    p.z_cover.D = static_cast<double>(B - 1 + 2 * R);
    p.z_cover.classes.resize(a.cover_colors);
    for (auto& [key, s] : blocks) p.z_cover.classes[((key.second % 2) + 2) % 2].push_back(s);
    // exact-metric audit of the assembled cover
    double diam = 0, sep = kInfinity;
    for (const auto& cls : p.z_cover.classes)
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (VertexId x : cls[i]) {
                const HnnElement xi = G.inverse(ball.elements[x]);
                for (VertexId y : cls[i]) diam = std::max<double>(diam, G.length(G.multiply(xi, ball.elements[y])));
                for (std::size_t j = i + 1; j < cls.size(); ++j)
                    for (VertexId y : cls[j]) sep = std::min<double>(sep, G.length(G.multiply(xi, ball.elements[y])));
            }
    a.cover_holds = diam <= p.z_cover.D && sep > R;
    a.cover_multiplicity = r_multiplicity(ball.graph, p.z_cover, R).value;
    return p;
}

void write_partition_csv(const HnnBall& ball, const DualGraphK& k, const HnnPartition& p, std::ostream& out) {
    out << "piece,coset,label\n";
    for (VertexId x : p.near_base) out << "-1,1," << ball.elements[x].label() << '\n';
    for (std::size_t i = 0; i < p.pieces.size(); ++i)
        for (VertexId x : p.pieces[i]) out << i << ',' << coset_label(k, p.piece_coset[i]) << ',' << ball.elements[x].label() << '\n';
}

}  // namespace relhyp
