#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relhyp/graph.hpp"

namespace relhyp {

enum class FactorKind { kFreeAbelian, kFree, kCyclic };

struct FactorSpec {
    FactorKind kind;
    int n;  // rank, or order for cyclic factors

    int num_generators() const { return kind == FactorKind::kCyclic ? 1 : n; }
    std::string token() const;
    bool operator==(const FactorSpec&) const = default;
};

// Tokens: Zn (free abelian), Fn (free), Cq (cyclic). "Z" means Z1.
FactorSpec parse_factor(std::string_view token);

// Letters are signed 1-based generator indices: +k is generator k-1, -k its inverse.
// Generators are numbered globally across factors in spec order.
using Word = std::vector<int>;

enum class PeripheralMode { kAll, kCyclic, kNone };

struct RelHypSpec {
    std::vector<FactorSpec> factors;
    PeripheralMode mode = PeripheralMode::kAll;
    Word cyclic_word;  // only for kCyclic

    int num_generators() const;
    int factor_of_generator(int gen) const;
    int first_generator(int factor) const;
    std::size_t num_peripherals() const;

    // Canonical key-value text; parse(to_text()) round-trips.
    std::string to_text() const;
    static RelHypSpec parse(std::string_view text);
    static RelHypSpec from_fields(std::string_view factors, std::string_view mode);
    void validate() const;
};

// Letter words written as a, b, ... with uppercase inverses; "1" is the empty word.
Word parse_word(const RelHypSpec& spec, std::string_view text);
std::string word_text(const Word& w);

// Free-product normal form: alternating syllables, each in its factor's normal form.
class Element {
public:
    struct Syllable {
        int factor;
        std::vector<int> data;  // exponents (abelian), local letters (free), residue (cyclic)
    };

    Element() = default;
    explicit Element(const RelHypSpec* spec) : spec_(spec) {}

    void multiply_letter(int letter);
    void multiply(const Element& other);
    Element inverse() const;

    Word word() const;
    std::string label() const { return word_text(word()); }
    int length() const;
    bool is_identity() const { return syl_.empty(); }
    const std::vector<Syllable>& syllables() const { return syl_; }
    // Copy with the trailing syllable removed when it lies in `factor`.
    Element strip_factor(int factor) const;

private:
    const RelHypSpec* spec_ = nullptr;
    std::vector<Syllable> syl_;
};

Element evaluate(const RelHypSpec& spec, const Word& w);
Word normal_form(const RelHypSpec& spec, const Word& w);
int word_length(const RelHypSpec& spec, const Word& w);

// Shortlex comparison of normal-form words: length first, then letters in the
// order a < A < b < B < ...
bool shortlex_less(const Word& x, const Word& y);

// Ball size predicted from growth series; saturates at ~1e18.
double predicted_ball_size(const RelHypSpec& spec, int radius);

struct CayleyBall {
    const RelHypSpec* spec = nullptr;
    int radius = 0;
    WeightedGraph graph;
    std::vector<Element> elements;
    std::vector<int> length;
    // step[v * 2G + slot]: neighbour of v by letter with slot 2g (g) or 2g+1 (g^-1).
    std::vector<VertexId> step;
    std::unordered_map<std::string, VertexId> index;

    std::size_t size() const { return elements.size(); }
    int num_letters() const { return 2 * spec->num_generators(); }
    VertexId neighbor(VertexId v, int letter) const;
    VertexId find(const std::string& label) const;
    VertexId find(const Word& w) const;
    // Pairs whose ball distance is guaranteed to equal the group distance.
    bool exact_pair(VertexId x, VertexId y) const { return length[x] + length[y] <= radius; }
    std::vector<VertexId> sphere(int r) const;
};

int letter_slot(int letter);
int slot_letter(int slot);

CayleyBall cayley_ball(const RelHypSpec& spec, int radius);

struct Coset {
    int peripheral = 0;
    Word rep;
    std::string rep_label;
    std::vector<VertexId> vertices;  // ascending ball ids
    std::vector<Edge> local_edges;   // C(Y) edges on indices into `vertices`

    WeightedGraph subgraph() const;
};

struct CosetRegistry {
    std::vector<Coset> cosets;  // shortlex by (rep, peripheral)
    // member[v]: indices of cosets containing v
    std::vector<std::vector<std::uint32_t>> member;
};

CosetRegistry peripheral_cosets(const CayleyBall& ball);

// Owns its group spec at a stable address, since elements and balls point into it.
struct GroupSpace {
    std::unique_ptr<RelHypSpec> spec;
    CayleyBall ball;
    CosetRegistry cosets;
};

GroupSpace build_group_space(const RelHypSpec& spec, int radius);

}  // namespace relhyp
