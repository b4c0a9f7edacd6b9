#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hmlab/gf2n.hpp"
#include "hmlab/rational.hpp"
#include "hmlab/util.hpp"

namespace hmlab {

/// Parameters of the inner-product gadget: `p` argument vectors of `blocks`
/// field elements each, output truncated to the low `n0` bits.
struct GadgetSpec {
    int p = 1;
    FieldSpec field;
    int blocks = 1;
    int n0 = 2;

    GadgetSpec() = default;

    GadgetSpec(int p_, FieldSpec field_, int blocks_, int n0_)
        : p(p_), field(field_), blocks(blocks_), n0(n0_) {
        if (p < 1) throw std::invalid_argument("GadgetSpec: p must be >= 1");
        if (blocks < 1) throw std::invalid_argument("GadgetSpec: blocks must be >= 1");
        if (n0 < 2 || n0 > field.degree)
            throw std::invalid_argument("GadgetSpec: n0 must be in [2, degree]");
        if (n0 % 2 != 0) throw std::invalid_argument("GadgetSpec: n0 must be even");
    }

    int matchings() const { return n0 / 2; }
    uint64_t q() const { return field.order(); }
    int element_bits() const { return field.degree; }
    int row_bits() const { return blocks * field.degree; }
    int total_bits() const { return p * row_bits(); }

    /// q^(blocks*p); only meaningful when it fits a word (total_bits <= 63).
    uint64_t input_count() const {
        if (total_bits() > 63) throw std::invalid_argument("GadgetSpec: input space exceeds 2^63");
        return 1ULL << total_bits();
    }

    /// Guard for exact-enumeration operations.
    void require_enumerable() const {
        if (total_bits() > 32)
            throw std::invalid_argument("GadgetSpec: enumeration requires input space <= 2^32");
    }

    /// The documented asymptotic regime keeps the player count at most
    /// log2(degree); outside it the extractor margin is not meaningful.
    bool regime_ok() const { return std::log2(static_cast<double>(field.degree)) >= p + 1; }

    bool operator==(const GadgetSpec&) const = default;
};

/// Argument matrix: element (i, j) is stored at elems[i*blocks + j], and in the
/// packed word form at bit offset (i*blocks + j) * degree, little-endian.
struct GadgetInput {
    std::vector<uint64_t> elems;
};

inline uint64_t pack_input(const GadgetSpec& spec, const GadgetInput& in) {
    if (static_cast<int>(in.elems.size()) != spec.p * spec.blocks)
        throw std::invalid_argument("pack_input: shape mismatch");
    if (spec.total_bits() > 63) throw std::invalid_argument("pack_input: input too wide");
    uint64_t packed = 0;
    for (size_t idx = 0; idx < in.elems.size(); ++idx) {
        if (in.elems[idx] > spec.field.mask())
            throw std::invalid_argument("pack_input: element out of field range");
        packed |= in.elems[idx] << (idx * spec.element_bits());
    }
    return packed;
}

inline GadgetInput unpack_input(const GadgetSpec& spec, uint64_t packed) {
    GadgetInput in;
    in.elems.resize(static_cast<size_t>(spec.p) * spec.blocks);
    for (size_t idx = 0; idx < in.elems.size(); ++idx) {
        in.elems[idx] = (packed >> (idx * spec.element_bits())) & spec.field.mask();
    }
    return in;
}

/// Sum over blocks of the product over rows, all in GF(2^N).
inline uint64_t eval_gip_packed(const GadgetSpec& spec, uint64_t packed) {
    const int eb = spec.element_bits();
    const uint64_t mask = spec.field.mask();
    uint64_t acc = 0;
    for (int j = 0; j < spec.blocks; ++j) {
        uint64_t prod = (packed >> (j * eb)) & mask;
        for (int i = 1; i < spec.p && prod; ++i) {
            uint64_t e = (packed >> ((i * spec.blocks + j) * eb)) & mask;
            prod = spec.field.mul(prod, e);
        }
        acc ^= prod;
    }
    return acc;
}

inline uint64_t eval_gip(const GadgetSpec& spec, const GadgetInput& in) {
    if (static_cast<int>(in.elems.size()) != spec.p * spec.blocks)
        throw std::invalid_argument("eval_gip: shape mismatch");
    for (uint64_t e : in.elems)
        if (e > spec.field.mask()) throw std::invalid_argument("eval_gip: element out of field range");
    uint64_t acc = 0;
    for (int j = 0; j < spec.blocks; ++j) {
        uint64_t prod = in.elems[j];
        for (int i = 1; i < spec.p; ++i) {
            prod = spec.field.mul(prod, in.elems[static_cast<size_t>(i) * spec.blocks + j]);
        }
        acc ^= prod;
    }
    return acc;
}

/// Low n0 bits of the field value, bit j of the output = bit j of the element.
inline uint64_t truncate_output(const GadgetSpec& spec, uint64_t gip_value) {
    return gip_value & ((1ULL << spec.n0) - 1);
}

inline uint64_t eval_gadget(const GadgetSpec& spec, const GadgetInput& in) {
    return truncate_output(spec, eval_gip(spec, in));
}

inline uint64_t eval_gadget_packed(const GadgetSpec& spec, uint64_t packed) {
    return truncate_output(spec, eval_gip_packed(spec, packed));
}

struct DistRow {
    uint64_t value = 0;
    BigInt count = 0;
    Rational prob;
};

/// Exact output distribution of the field-valued inner product over the full
/// input space, by enumeration. Probabilities sum to 1 exactly.
inline std::vector<DistRow> gip_distribution_exact(const GadgetSpec& spec, int threads = 1) {
    spec.require_enumerable();
    if (spec.field.degree > 20)
        throw std::invalid_argument("gip_distribution_exact: field too large to tabulate");
    const uint64_t total = spec.input_count();
    const uint64_t q = spec.q();

    // Chunk count is fixed so results are identical for any thread count.
    const int chunks = 64;
    std::vector<std::vector<uint64_t>> counts(chunks, std::vector<uint64_t>(q, 0));
    parallel_chunks(chunks, threads, [&](int c) {
        uint64_t lo = total / chunks * c + std::min<uint64_t>(c, total % chunks);
        uint64_t hi = lo + total / chunks + (static_cast<uint64_t>(c) < total % chunks ? 1 : 0);
        auto& local = counts[c];
        for (uint64_t x = lo; x < hi; ++x) local[eval_gip_packed(spec, x)]++;
    });

    std::vector<DistRow> rows(q);
    Rational sum(0);
    for (uint64_t v = 0; v < q; ++v) {
        uint64_t n = 0;
        for (int c = 0; c < chunks; ++c) n += counts[c][v];
        rows[v].value = v;
        rows[v].count = n;
        rows[v].prob = rat(n, total);
        sum += rows[v].prob;
    }
    if (sum != Rational(1)) throw std::logic_error("gip_distribution_exact: probabilities do not sum to 1");
    return rows;
}

/// Counting oracle for p = 2: for each target value the fibers of the bilinear
/// map are counted directly (zero vector vs. nonzero first argument), giving
///   count(0) = q^blocks + q^(2*blocks-1) - q^(blocks-1)
///   count(v) = q^(2*blocks-1) - q^(blocks-1)            for v != 0.
inline std::vector<DistRow> gip_p2_closed_form(const GadgetSpec& spec) {
    if (spec.p != 2) throw std::invalid_argument("gip_p2_closed_form: requires p == 2");
    const BigInt q = spec.q();
    const unsigned r = static_cast<unsigned>(spec.blocks);
    const BigInt total = bigint_pow(q, 2 * r);
    const BigInt fiber_nonzero = bigint_pow(q, 2 * r - 1) - bigint_pow(q, r - 1);
    const BigInt fiber_zero = bigint_pow(q, r) + fiber_nonzero;

    std::vector<DistRow> rows(spec.q());
    for (uint64_t v = 0; v < spec.q(); ++v) {
        rows[v].value = v;
        rows[v].count = v == 0 ? fiber_zero : fiber_nonzero;
        rows[v].prob = Rational(rows[v].count, total);
    }
    return rows;
}

/// How to sample a cylinder-intersection subset of the input space.
struct CylinderSampler {
    enum class Mode { kFullSpace, kRectangle, kRandomCylinders };
    Mode mode = Mode::kFullSpace;
    uint64_t seed = 0;
    // Rectangle (p == 2): row-set cardinalities; 0 means the full row space.
    uint64_t a_size = 0;
    uint64_t b_size = 0;
    // Random cylinders: per-cylinder keep fraction in (0, 1].
    double keep = 1.0;
};

/// A materialized (or membership-testable) cylinder intersection with a
/// uniform sampler over its members.
class SampledCylinderSet {
  public:
    static SampledCylinderSet build(const GadgetSpec& spec, const CylinderSampler& cfg) {
        SampledCylinderSet s;
        s.spec_ = spec;
        s.cfg_ = cfg;
        if (spec.total_bits() > 63)
            throw std::invalid_argument("SampledCylinderSet: input space exceeds 2^63");
        s.space_ = spec.input_count();

        switch (cfg.mode) {
            case CylinderSampler::Mode::kFullSpace:
                s.size_ = BigInt(s.space_);
                s.size_exact_ = true;
                break;
            case CylinderSampler::Mode::kRectangle: {
                if (spec.p != 2)
                    throw std::invalid_argument("rectangle sampler requires p == 2");
                uint64_t row_space = 1ULL << spec.row_bits();
                uint64_t a = cfg.a_size == 0 ? row_space : cfg.a_size;
                uint64_t b = cfg.b_size == 0 ? row_space : cfg.b_size;
                if (a > row_space || b > row_space)
                    throw std::invalid_argument("rectangle sampler: side larger than row space");
                s.a_members_ = sample_subset(row_space, a, derive_seed(cfg.seed, 11), s.a_bitmap_);
                s.b_members_ = sample_subset(row_space, b, derive_seed(cfg.seed, 13), s.b_bitmap_);
                s.size_ = BigInt(a) * BigInt(b);
                s.size_exact_ = true;
                break;
            }
            case CylinderSampler::Mode::kRandomCylinders: {
                if (!(cfg.keep > 0.0 && cfg.keep <= 1.0))
                    throw std::invalid_argument("random cylinders: keep must be in (0, 1]");
                s.thresholds_.resize(spec.p);
                s.salts_.resize(spec.p);
                for (int i = 0; i < spec.p; ++i) {
                    s.salts_[i] = derive_seed(cfg.seed, 100 + static_cast<uint64_t>(i));
                    s.thresholds_[i] =
                        cfg.keep >= 1.0
                            ? ~0ULL
                            : static_cast<uint64_t>(cfg.keep * 18446744073709551616.0);
                }
                s.row_masks_.resize(spec.p);
                for (int i = 0; i < spec.p; ++i) {
                    s.row_masks_[i] = ((1ULL << spec.row_bits()) - 1) << (i * spec.row_bits());
                }
                s.estimate_size();
                break;
            }
        }
        if (s.size_ == 0) throw std::invalid_argument("SampledCylinderSet: sampled set is empty");
        return s;
    }

    bool contains(uint64_t packed) const {
        switch (cfg_.mode) {
            case CylinderSampler::Mode::kFullSpace:
                return true;
            case CylinderSampler::Mode::kRectangle: {
                uint64_t rb = spec_.row_bits();
                uint64_t x0 = packed & ((1ULL << rb) - 1);
                uint64_t x1 = packed >> rb;
                return member(a_bitmap_, x0) && member(b_bitmap_, x1);
            }
            case CylinderSampler::Mode::kRandomCylinders:
                for (int i = 0; i < spec_.p; ++i) {
                    uint64_t proj = packed & ~row_masks_[i];
                    if (mix64(proj ^ salts_[i]) > thresholds_[i]) return false;
                }
                return true;
        }
        return false;
    }

    /// Membership of the cylinder in direction `i` alone (ignores the others).
    bool cylinder_contains(int i, uint64_t packed) const {
        if (cfg_.mode == CylinderSampler::Mode::kRandomCylinders) {
            uint64_t proj = packed & ~row_masks_[i];
            return mix64(proj ^ salts_[i]) <= thresholds_[i];
        }
        if (cfg_.mode == CylinderSampler::Mode::kRectangle) {
            uint64_t rb = spec_.row_bits();
            if (i == 0) return member(b_bitmap_, packed >> rb);  // ignores row 0
            return member(a_bitmap_, packed & ((1ULL << rb) - 1));
        }
        return true;
    }

    uint64_t draw(Rng& rng) const {
        switch (cfg_.mode) {
            case CylinderSampler::Mode::kFullSpace:
                return rng.below(space_);
            case CylinderSampler::Mode::kRectangle: {
                uint64_t row_space = 1ULL << spec_.row_bits();
                uint64_t x0 = a_members_.empty() ? rng.below(row_space)
                                                 : a_members_[rng.below(a_members_.size())];
                uint64_t x1 = b_members_.empty() ? rng.below(row_space)
                                                 : b_members_[rng.below(b_members_.size())];
                return x0 | (x1 << spec_.row_bits());
            }
            case CylinderSampler::Mode::kRandomCylinders:
                for (;;) {
                    uint64_t x = rng.below(space_);
                    if (contains(x)) return x;
                }
        }
        return 0;
    }

    const BigInt& size() const { return size_; }
    bool size_exact() const { return size_exact_; }
    uint64_t space() const { return space_; }

    /// The premise of the pseudorandomness bound: |S| >= q^(blocks*p - 1).
    bool meets_size_premise() const {
        BigInt need = BigInt(space_) / BigInt(spec_.q());
        return size_ >= need;
    }

  private:
    // Uniform subset of exact size `want`; empty member vector encodes the
    // full row space (no bitmap needed in that case).
    static std::vector<uint64_t> sample_subset(uint64_t space, uint64_t want, uint64_t seed,
                                               std::vector<bool>& bitmap) {
        if (want == 0) throw std::invalid_argument("rectangle sampler: empty side");
        if (want == space) return {};
        bitmap.assign(space, false);
        std::vector<uint64_t> members;
        members.reserve(want);
        Rng rng(seed);
        while (members.size() < want) {
            uint64_t x = rng.below(space);
            if (!bitmap[x]) {
                bitmap[x] = true;
                members.push_back(x);
            }
        }
        return members;
    }

    static bool member(const std::vector<bool>& bitmap, uint64_t x) {
        return bitmap.empty() || bitmap[x];  // empty bitmap = full side
    }

    void estimate_size() {
        Rng rng(derive_seed(cfg_.seed, 17));
        const int probes = 200000;
        int64_t hit = 0;
        for (int t = 0; t < probes; ++t)
            if (contains(rng.below(space_))) ++hit;
        if (hit == 0) {
            size_ = 0;
            return;
        }
        double density = static_cast<double>(hit) / probes;
        size_ = BigInt(static_cast<uint64_t>(density * static_cast<double>(space_)));
        size_exact_ = false;
    }

    GadgetSpec spec_;
    CylinderSampler cfg_;
    uint64_t space_ = 0;
    BigInt size_ = 0;
    bool size_exact_ = true;
    std::vector<uint64_t> a_members_, b_members_;  // rectangle; empty = full side
    std::vector<bool> a_bitmap_, b_bitmap_;
    std::vector<uint64_t> thresholds_, salts_, row_masks_;
};

struct ExtractorValueRow {
    uint64_t value = 0;
    uint64_t count = 0;
    double phat = 0.0;
    double se = 0.0;
};

struct ExtractorReport {
    uint64_t samples = 0;
    bool premise_met = false;
    bool premise_exact = false;
    std::vector<ExtractorValueRow> gip_rows;
    std::vector<ExtractorValueRow> gadget_rows;
    double gip_bound = 0.0;     // 1/q + q * (p/q)^4
    double gadget_bound = 0.0;  // 2^-n0 + 2^-2n0
    ExtractorValueRow gip_max;
    ExtractorValueRow gadget_max;
    bool gip_pass = false;
    bool gadget_pass = false;
    bool pass() const { return premise_met && gip_pass && gadget_pass; }
};

/// Monte Carlo estimate of the heaviest output value over a sampled cylinder
/// intersection, with a 3-sigma decision against the analytic bounds.
inline ExtractorReport extractor_estimate(const GadgetSpec& spec, const CylinderSampler& cfg,
                                          uint64_t samples, int threads = 1) {
    if (samples < 10000)
        throw std::invalid_argument("extractor_estimate: need at least 10^4 samples");
    auto set = SampledCylinderSet::build(spec, cfg);

    ExtractorReport rep;
    rep.samples = samples;
    rep.premise_met = set.meets_size_premise();
    rep.premise_exact = set.size_exact();
    if (rep.premise_exact && !rep.premise_met)
        throw std::invalid_argument("extractor_estimate: sampled set below size premise");

    const uint64_t q = spec.q();
    const uint64_t zspace = 1ULL << spec.n0;
    const int chunks = 16;  // fixed; per-chunk seeds make thread count irrelevant
    std::vector<std::vector<uint64_t>> vc(chunks, std::vector<uint64_t>(q, 0));
    std::vector<std::vector<uint64_t>> zc(chunks, std::vector<uint64_t>(zspace, 0));
    parallel_chunks(chunks, threads, [&](int c) {
        uint64_t n = samples / chunks + (static_cast<uint64_t>(c) < samples % chunks ? 1 : 0);
        Rng rng(derive_seed(cfg.seed, 1000 + static_cast<uint64_t>(c)));
        auto& v = vc[c];
        auto& z = zc[c];
        for (uint64_t t = 0; t < n; ++t) {
            uint64_t x = set.draw(rng);
            uint64_t gip = eval_gip_packed(spec, x);
            v[gip]++;
            z[truncate_output(spec, gip)]++;
        }
    });

    auto summarize = [&](const std::vector<std::vector<uint64_t>>& counts, uint64_t domain,
                         std::vector<ExtractorValueRow>& rows, ExtractorValueRow& best) {
        rows.resize(domain);
        for (uint64_t v = 0; v < domain; ++v) {
            uint64_t n = 0;
            for (auto& c : counts) n += c[v];
            double phat = static_cast<double>(n) / static_cast<double>(samples);
            rows[v] = {v, n, phat, std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples))};
            if (rows[v].phat > best.phat) best = rows[v];
        }
    };
    summarize(vc, q, rep.gip_rows, rep.gip_max);
    summarize(zc, zspace, rep.gadget_rows, rep.gadget_max);

    double qd = static_cast<double>(q);
    rep.gip_bound = 1.0 / qd + qd * std::pow(static_cast<double>(spec.p) / qd, 4);
    rep.gadget_bound = std::pow(2.0, -spec.n0) + std::pow(2.0, -2.0 * spec.n0);
    rep.gip_pass = rep.gip_max.phat - 3.0 * rep.gip_max.se <= rep.gip_bound;
    rep.gadget_pass = rep.gadget_max.phat - 3.0 * rep.gadget_max.se <= rep.gadget_bound;
    return rep;
}

}  // namespace hmlab
