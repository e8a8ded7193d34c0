#include "relhyp/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "relhyp/error.hpp"

namespace relhyp {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

constexpr int kMaxRank = 8;
constexpr int kMaxOrder = 64;

}  // namespace

std::string FactorSpec::token() const {
    switch (kind) {
        case FactorKind::kFreeAbelian: return "Z" + std::to_string(n);
        case FactorKind::kFree: return "F" + std::to_string(n);
        case FactorKind::kCyclic: return "C" + std::to_string(n);
    }
    return {};
}

FactorSpec parse_factor(std::string_view token) {
    std::string t = trim(token);
    auto bad = [&]() -> FactorSpec { fail(ErrorCode::kParse, "invalid factor token '" + t + "'"); };
    if (t.empty()) return bad();
    FactorKind kind;
    switch (t[0]) {
        case 'Z': kind = FactorKind::kFreeAbelian; break;
        case 'F': kind = FactorKind::kFree; break;
        case 'C': kind = FactorKind::kCyclic; break;
        default: return bad();
    }
    int n = 1;
    if (t.size() > 1) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return bad();
        }
        if (t.size() > 4) return bad();
        n = std::stoi(t.substr(1));
    } else if (kind != FactorKind::kFreeAbelian) {
        return bad();
    }
    if (kind == FactorKind::kCyclic ? (n < 2 || n > kMaxOrder) : (n < 1 || n > kMaxRank)) return bad();
    return {kind, n};
}

int RelHypSpec::num_generators() const {
    int g = 0;
    for (const auto& f : factors) g += f.num_generators();
    return g;
}

int RelHypSpec::factor_of_generator(int gen) const {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        gen -= factors[i].num_generators();
        if (gen < 0) return static_cast<int>(i);
    }
    fail(ErrorCode::kInvalidArgument, "generator index out of range");
}

int RelHypSpec::first_generator(int factor) const {
    int g = 0;
    for (int i = 0; i < factor; ++i) g += factors[i].num_generators();
    return g;
}

std::size_t RelHypSpec::num_peripherals() const {
    switch (mode) {
        case PeripheralMode::kAll: return factors.size();
        case PeripheralMode::kCyclic: return 1;
        case PeripheralMode::kNone: return 0;
    }
    return 0;
}

std::string RelHypSpec::to_text() const {
    std::string out = "factors = ";
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += ",";
        out += factors[i].token();
    }
    out += "\nperipheral_mode = ";
    switch (mode) {
        case PeripheralMode::kAll: out += "all"; break;
        case PeripheralMode::kNone: out += "none"; break;
        case PeripheralMode::kCyclic: out += "cyclic:" + word_text(cyclic_word); break;
    }
    out += "\n";
    return out;
}

RelHypSpec RelHypSpec::from_fields(std::string_view factor_list, std::string_view mode_text) {
    RelHypSpec spec;
    for (const auto& tok : split(factor_list, ',')) spec.factors.push_back(parse_factor(tok));
    std::string m = trim(mode_text);
    if (m == "all") {
        spec.mode = PeripheralMode::kAll;
    } else if (m == "none") {
        spec.mode = PeripheralMode::kNone;
    } else if (m.rfind("cyclic:", 0) == 0) {
        spec.mode = PeripheralMode::kCyclic;
        spec.cyclic_word = parse_word(spec, m.substr(7));
    } else {
        fail(ErrorCode::kParse, "invalid peripheral_mode '" + m + "'");
    }
    spec.validate();
    return spec;
}

RelHypSpec RelHypSpec::parse(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::kParse, "spec line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key != "factors" && key != "peripheral_mode") {
            fail(ErrorCode::kParse, "spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (kv.contains(key)) fail(ErrorCode::kParse, "duplicate key '" + key + "'");
        kv[key] = value;
    }
    if (!kv.contains("factors")) fail(ErrorCode::kParse, "spec is missing 'factors'");
    return from_fields(kv["factors"], kv.contains("peripheral_mode") ? kv["peripheral_mode"] : "all");
}

void RelHypSpec::validate() const {
    if (factors.empty()) fail(ErrorCode::kParse, "spec has no factors");
    if (num_generators() > 26) fail(ErrorCode::kParse, "too many generators (max 26)");
    if (mode == PeripheralMode::kAll && factors.size() < 2) {
        fail(ErrorCode::kParse, "peripheral_mode all needs at least two factors");
    }
    if (mode == PeripheralMode::kCyclic) {
        if (factors.size() != 1 || factors[0].kind != FactorKind::kFree || factors[0].n < 2) {
            fail(ErrorCode::kParse, "cyclic peripheral needs a single free factor of rank >= 2");
        }
        const Word& w = cyclic_word;
        if (w.empty()) fail(ErrorCode::kParse, "cyclic peripheral word is empty");
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            if (w[i] == -w[i + 1]) fail(ErrorCode::kParse, "cyclic peripheral word is not reduced");
        }
        if (w.size() > 1 && w.front() == -w.back()) {
            fail(ErrorCode::kParse, "cyclic peripheral word is not cyclically reduced");
        }
        for (std::size_t p = 1; p < w.size(); ++p) {
            if (w.size() % p) continue;
            bool periodic = true;
            for (std::size_t i = p; i < w.size() && periodic; ++i) periodic = w[i] == w[i - p];
            if (periodic) fail(ErrorCode::kParse, "cyclic peripheral word is a proper power");
        }
    }
}

Word parse_word(const RelHypSpec& spec, std::string_view text) {
    std::string t = trim(text);
    Word w;
    if (t == "1" || t.empty()) return w;
    for (char c : t) {
        int letter;
        if (c >= 'a' && c <= 'z') {
            letter = c - 'a' + 1;
        } else if (c >= 'A' && c <= 'Z') {
            letter = -(c - 'A' + 1);
        } else {
            fail(ErrorCode::kParse, std::string("invalid letter '") + c + "' in word '" + t + "'");
        }
        if (std::abs(letter) > spec.num_generators()) {
            fail(ErrorCode::kParse, std::string("letter '") + c + "' is not a generator");
        }
        w.push_back(letter);
    }
    return w;
}

std::string word_text(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    s.reserve(w.size());
    for (int l : w) s.push_back(l > 0 ? char('a' + l - 1) : char('A' - l - 1));
    return s;
}

void Element::multiply_letter(int letter) {
    int gen = std::abs(letter) - 1;
    int sign = letter > 0 ? 1 : -1;
    int f = spec_->factor_of_generator(gen);
    const FactorSpec& fs = spec_->factors[f];
    int local = gen - spec_->first_generator(f);
    if (syl_.empty() || syl_.back().factor != f) {
        Syllable s{f, {}};
        switch (fs.kind) {
            case FactorKind::kFreeAbelian:
                s.data.assign(fs.n, 0);
                s.data[local] = sign;
                break;
            case FactorKind::kFree: s.data.push_back(sign * (local + 1)); break;
            case FactorKind::kCyclic: s.data.push_back(sign > 0 ? 1 : fs.n - 1); break;
        }
        syl_.push_back(std::move(s));
        return;
    }
    Syllable& s = syl_.back();
    bool trivial = false;
    switch (fs.kind) {
        case FactorKind::kFreeAbelian:
            s.data[local] += sign;
            trivial = std::all_of(s.data.begin(), s.data.end(), [](int x) { return x == 0; });
            break;
        case FactorKind::kFree:
            if (s.data.back() == -sign * (local + 1)) {
                s.data.pop_back();
            } else {
                s.data.push_back(sign * (local + 1));
            }
            trivial = s.data.empty();
            break;
        case FactorKind::kCyclic:
            s.data[0] = ((s.data[0] + sign) % fs.n + fs.n) % fs.n;
            trivial = s.data[0] == 0;
            break;
    }
    if (trivial) syl_.pop_back();
}

void Element::multiply(const Element& other) {
    for (int l : other.word()) multiply_letter(l);
}

Element Element::inverse() const {
    Element inv(spec_);
    Word w = word();
    for (auto it = w.rbegin(); it != w.rend(); ++it) inv.multiply_letter(-*it);
    return inv;
}

Word Element::word() const {
    Word w;
    for (const Syllable& s : syl_) {
        const FactorSpec& fs = spec_->factors[s.factor];
        int base = spec_->first_generator(s.factor);
        switch (fs.kind) {
            case FactorKind::kFreeAbelian:
                for (int j = 0; j < fs.n; ++j) {
                    int letter = (base + j + 1) * (s.data[j] > 0 ? 1 : -1);
                    for (int k = 0; k < std::abs(s.data[j]); ++k) w.push_back(letter);
                }
                break;
            case FactorKind::kFree:
                for (int l : s.data) w.push_back(l > 0 ? base + l : -(base - l));
                break;
            case FactorKind::kCyclic: {
                int e = s.data[0];
                if (2 * e <= fs.n) {
                    w.insert(w.end(), e, base + 1);
                } else {
                    w.insert(w.end(), fs.n - e, -(base + 1));
                }
                break;
            }
        }
    }
    return w;
}

int Element::length() const {
    int len = 0;
    for (const Syllable& s : syl_) {
        const FactorSpec& fs = spec_->factors[s.factor];
        switch (fs.kind) {
            case FactorKind::kFreeAbelian:
                for (int x : s.data) len += std::abs(x);
                break;
            case FactorKind::kFree: len += static_cast<int>(s.data.size()); break;
            case FactorKind::kCyclic: len += std::min(s.data[0], fs.n - s.data[0]); break;
        }
    }
    return len;
}

Element Element::strip_factor(int factor) const {
    Element e = *this;
    if (!e.syl_.empty() && e.syl_.back().factor == factor) e.syl_.pop_back();
    return e;
}

Element evaluate(const RelHypSpec& spec, const Word& w) {
    Element e(&spec);
    for (int l : w) {
        require(l != 0 && std::abs(l) <= spec.num_generators(), "invalid letter in word");
        e.multiply_letter(l);
    }
    return e;
}

Word normal_form(const RelHypSpec& spec, const Word& w) { return evaluate(spec, w).word(); }

int word_length(const RelHypSpec& spec, const Word& w) { return evaluate(spec, w).length(); }

int letter_slot(int letter) { return letter > 0 ? 2 * (letter - 1) : 2 * (-letter - 1) + 1; }
int slot_letter(int slot) { return slot % 2 == 0 ? slot / 2 + 1 : -(slot / 2 + 1); }

bool shortlex_less(const Word& x, const Word& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) return letter_slot(x[i]) < letter_slot(y[i]);
    }
    return false;
}

namespace {

using Series = std::vector<long double>;
constexpr long double kSaturate = 1e18L;

Series multiply_series(const Series& a, const Series& b) {
    Series c(a.size(), 0.0L);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; i + j < c.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

Series invert_series(const Series& a) {
    Series b(a.size(), 0.0L);
    b[0] = 1.0L / a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
        long double s = 0;
        for (std::size_t j = 1; j <= k; ++j) s += a[j] * b[k - j];
        b[k] = -s / a[0];
    }
    return b;
}

Series sphere_series(const FactorSpec& f, int radius) {
    Series s(radius + 1, 0.0L);
    s[0] = 1;
    switch (f.kind) {
        case FactorKind::kFreeAbelian: {
            Series line(radius + 1, 2.0L);
            line[0] = 1;
            Series acc = s;
            for (int i = 0; i < f.n; ++i) acc = multiply_series(acc, line);
            return acc;
        }
        case FactorKind::kFree: {
            long double v = 2.0L * f.n;
            for (int k = 1; k <= radius; ++k) {
                s[k] = std::min(v, kSaturate);
                v *= 2.0L * f.n - 1;
            }
            return s;
        }
        case FactorKind::kCyclic:
            for (int k = 1; k <= radius; ++k) {
                if (2 * k < f.n) {
                    s[k] = 2;
                } else if (2 * k == f.n) {
                    s[k] = 1;
                }
            }
            return s;
    }
    return s;
}

}  // namespace

double predicted_ball_size(const RelHypSpec& spec, int radius) {
    require(radius >= 0, "radius must be nonnegative");
    Series w;
    if (spec.factors.size() == 1) {
        w = sphere_series(spec.factors[0], radius);
    } else {
        Series inv(radius + 1, 0.0L);
        inv[0] = -static_cast<long double>(spec.factors.size() - 1);
        for (const auto& f : spec.factors) {
            Series fi = invert_series(sphere_series(f, radius));
            for (int k = 0; k <= radius; ++k) inv[k] += fi[k];
        }
        w = invert_series(inv);
    }
    long double total = 0;
    for (long double x : w) total += x;
    return static_cast<double>(std::min(total, kSaturate));
}

VertexId CayleyBall::neighbor(VertexId v, int letter) const {
    return step[static_cast<std::size_t>(v) * num_letters() + letter_slot(letter)];
}

VertexId CayleyBall::find(const std::string& label) const {
    auto it = index.find(label);
    return it == index.end() ? kNoVertex : it->second;
}

VertexId CayleyBall::find(const Word& w) const { return find(word_text(normal_form(*spec, w))); }

std::vector<VertexId> CayleyBall::sphere(int r) const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < size(); ++v) {
        if (length[v] == r) out.push_back(v);
    }
    return out;
}

CayleyBall cayley_ball(const RelHypSpec& spec, int radius) {
    require(radius >= 0, "radius must be nonnegative");
    double predicted = predicted_ball_size(spec, radius);
    std::size_t cap = vertex_cap();
    if (predicted > static_cast<double>(cap)) {
        std::ostringstream msg;
        msg.precision(0);
        msg << std::fixed << "cap exceeded (predicted " << predicted << " > cap " << cap << ")";
        fail(ErrorCode::kCapExceeded, msg.str());
    }
    CayleyBall ball;
    ball.spec = &spec;
    ball.radius = radius;
    const int nl = 2 * spec.num_generators();
    ball.elements.push_back(Element(&spec));
    ball.length.push_back(0);
    ball.index.emplace("1", 0);
    ball.elements.reserve(static_cast<std::size_t>(predicted));

    // BFS in slot order fixes the vertex numbering.
    for (std::size_t head = 0; head < ball.elements.size(); ++head) {
        if (ball.length[head] == radius) continue;
        for (int slot = 0; slot < nl; ++slot) {
            Element e = ball.elements[head];
            e.multiply_letter(slot_letter(slot));
            std::string key = e.label();
            if (ball.index.contains(key)) continue;
            VertexId id = static_cast<VertexId>(ball.elements.size());
            ball.index.emplace(std::move(key), id);
            ball.length.push_back(ball.length[head] + 1);
            ball.elements.push_back(std::move(e));
        }
    }

    ball.step.assign(ball.elements.size() * nl, kNoVertex);
    std::vector<Edge> edges;
    for (VertexId v = 0; v < ball.elements.size(); ++v) {
        for (int slot = 0; slot < nl; ++slot) {
            Element e = ball.elements[v];
            e.multiply_letter(slot_letter(slot));
            VertexId w = ball.find(e.label());
            ball.step[static_cast<std::size_t>(v) * nl + slot] = w;
            if (w != kNoVertex && v < w) edges.push_back({v, w, 1.0});
        }
    }
    ball.graph = WeightedGraph::build(ball.elements.size(), edges);
    std::vector<std::string> labels;
    labels.reserve(ball.elements.size());
    for (const auto& e : ball.elements) labels.push_back(e.label());
    ball.graph.set_labels(std::move(labels));
    return ball;
}

WeightedGraph Coset::subgraph() const { return WeightedGraph::build(vertices.size(), local_edges); }

CosetRegistry peripheral_cosets(const CayleyBall& ball) {
    const RelHypSpec& spec = *ball.spec;
    CosetRegistry reg;
    std::map<std::pair<int, std::string>, std::size_t> slot_of;
    std::vector<Coset> found;

    if (spec.mode == PeripheralMode::kAll) {
        for (VertexId v = 0; v < ball.size(); ++v) {
            for (int f = 0; f < static_cast<int>(spec.factors.size()); ++f) {
                Element rep = ball.elements[v].strip_factor(f);
                auto key = std::make_pair(f, rep.label());
                auto [it, inserted] = slot_of.emplace(key, found.size());
                if (inserted) {
                    Coset c;
                    c.peripheral = f;
                    c.rep = rep.word();
                    c.rep_label = key.second;
                    found.push_back(std::move(c));
                }
                found[it->second].vertices.push_back(v);
            }
        }
        for (Coset& c : found) {
            const auto& fs = spec.factors[c.peripheral];
            int base = spec.first_generator(c.peripheral);
            std::unordered_map<VertexId, std::uint32_t> local;
            for (std::uint32_t i = 0; i < c.vertices.size(); ++i) local.emplace(c.vertices[i], i);
            for (std::uint32_t i = 0; i < c.vertices.size(); ++i) {
                for (int j = 0; j < fs.num_generators(); ++j) {
                    VertexId w = ball.neighbor(c.vertices[i], base + j + 1);
                    if (w == kNoVertex) continue;
                    auto it = local.find(w);
                    if (it != local.end() && it->second != i) c.local_edges.push_back({i, it->second, 1.0});
                }
            }
        }
    } else if (spec.mode == PeripheralMode::kCyclic) {
        Element w = evaluate(spec, spec.cyclic_word);
        Element winv = w.inverse();
        std::vector<char> seen(ball.size(), 0);
        for (VertexId v = 0; v < ball.size(); ++v) {
            if (seen[v]) continue;
            // Orbit points in the ball form an interval along the axis.
            std::vector<VertexId> back, fwd;
            for (const Element* stepper : {&winv, &w}) {
                Element cur = ball.elements[v];
                auto& out = stepper == &w ? fwd : back;
                for (;;) {
                    cur.multiply(*stepper);
                    VertexId id = ball.find(cur.label());
                    if (id == kNoVertex) break;
                    out.push_back(id);
                }
            }
            std::vector<VertexId> orbit(back.rbegin(), back.rend());
            orbit.push_back(v);
            orbit.insert(orbit.end(), fwd.begin(), fwd.end());
            Coset c;
            c.peripheral = 0;
            Word best;
            bool first = true;
            for (VertexId id : orbit) {
                seen[id] = 1;
                Word wd = ball.elements[id].word();
                if (first || shortlex_less(wd, best)) best = wd;
                first = false;
            }
            c.rep = best;
            c.rep_label = word_text(best);
            // Path order along the orbit, then ids sorted with edges remapped.
            std::vector<std::uint32_t> order(orbit.size());
            for (std::uint32_t i = 0; i < orbit.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return orbit[a] < orbit[b]; });
            std::vector<std::uint32_t> pos(orbit.size());
            for (std::uint32_t i = 0; i < order.size(); ++i) {
                c.vertices.push_back(orbit[order[i]]);
                pos[order[i]] = i;
            }
            for (std::uint32_t i = 0; i + 1 < orbit.size(); ++i) c.local_edges.push_back({pos[i], pos[i + 1], 1.0});
            found.push_back(std::move(c));
        }
    }

    std::vector<std::size_t> perm(found.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (found[a].rep != found[b].rep) return shortlex_less(found[a].rep, found[b].rep);
        return found[a].peripheral < found[b].peripheral;
    });
    reg.member.assign(ball.size(), {});
    for (std::size_t i : perm) {
        auto idx = static_cast<std::uint32_t>(reg.cosets.size());
        for (VertexId v : found[i].vertices) reg.member[v].push_back(idx);
        reg.cosets.push_back(std::move(found[i]));
    }
    return reg;
}

GroupSpace build_group_space(const RelHypSpec& spec, int radius) {
    GroupSpace gs;
    gs.spec = std::make_unique<RelHypSpec>(spec);
    gs.ball = cayley_ball(*gs.spec, radius);
    gs.cosets = peripheral_cosets(gs.ball);
    return gs;
}

}  // namespace relhyp
