#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hmlab/gadget.hpp"

namespace hmlab {

/// Edge of a bipartite graph on nodes {0..m-1} (left) and {m..2m-1} (right).
struct Edge {
    int l = 0;
    int r = 0;
    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

/// Candidate output for a hidden-matching instance: an edge plus a parity bit.
struct Answer {
    int l = 0;
    int r = 0;
    int b = 0;
    bool operator==(const Answer&) const = default;
};

/// Edge of the i-th shifted matching: left node l pairs with m + ((i+l) mod m).
inline Edge matching_edge(int i, int l, int m) {
    if (m < 1 || i < 0 || i >= m || l < 0 || l >= m)
        throw std::invalid_argument("matching_edge: index out of range");
    return Edge{l, m + (i + l) % m};
}

struct FamilyReport {
    bool perfect = true;
    bool disjoint = true;
    bool pass() const { return perfect && disjoint; }
};

/// Exhaustively checks that every matching in the shifted family is perfect
/// and that no edge appears in two matchings.
inline FamilyReport verify_family(int m) {
    if (m < 1 || m > (1 << 16)) throw std::invalid_argument("verify_family: m out of range");
    FamilyReport rep;
    std::vector<char> seen_left(m), seen_right(m);
    for (int i = 0; i < m; ++i) {
        std::fill(seen_left.begin(), seen_left.end(), 0);
        std::fill(seen_right.begin(), seen_right.end(), 0);
        for (int l = 0; l < m; ++l) {
            Edge e = matching_edge(i, l, m);
            if (e.l < 0 || e.l >= m || e.r < m || e.r >= 2 * m) rep.perfect = false;
            if (seen_left[e.l]++ || seen_right[e.r - m]++) rep.perfect = false;
        }
    }
    // Two edges with the same left endpoint come from distinct matchings iff
    // their right endpoints differ; edges with distinct left endpoints can
    // never collide. So checking rights per left node covers every edge pair.
    std::vector<char> rights(m);
    for (int l = 0; l < m && rep.disjoint; ++l) {
        std::fill(rights.begin(), rights.end(), 0);
        for (int i = 0; i < m; ++i) {
            if (rights[matching_edge(i, l, m).r - m]++) rep.disjoint = false;
        }
    }
    return rep;
}

/// One instance of the lifted relation: a matching index for the first player
/// plus the gadget argument matrix held by the rest.
struct HMInstance {
    GadgetSpec spec;
    int x1 = 0;
    GadgetInput input;

    HMInstance() = default;
    HMInstance(GadgetSpec s, int x1_, GadgetInput in) : spec(std::move(s)), x1(x1_), input(std::move(in)) {
        if (x1 < 0 || x1 >= spec.matchings()) throw std::invalid_argument("HMInstance: x1 out of range");
        if (static_cast<int>(input.elems.size()) != spec.p * spec.blocks)
            throw std::invalid_argument("HMInstance: input shape mismatch");
    }
};

/// Validity against a known target string z (n0 bits, node i reads bit i).
inline bool answer_valid(uint64_t z, int m, int x1, const Answer& a) {
    if (a.l < 0 || a.l >= m || a.r < m || a.r >= 2 * m) return false;
    if (a.r != matching_edge(x1, a.l, m).r) return false;
    return a.b == (bit_at(z, a.l) ^ bit_at(z, a.r));
}

/// True iff the answer names an edge of the instance's matching and carries
/// the parity of that edge's endpoints in the gadget output.
inline bool check_answer(const HMInstance& inst, const Answer& a) {
    uint64_t z = eval_gadget(inst.spec, inst.input);
    return answer_valid(z, inst.spec.matchings(), inst.x1, a);
}

}  // namespace hmlab
