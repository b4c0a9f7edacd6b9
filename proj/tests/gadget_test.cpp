#include "hmlab/gadget.hpp"

#include <gtest/gtest.h>

#include <map>

#include "hmlab/util.hpp"

using namespace hmlab;

namespace {

GadgetSpec make_spec(int p, int degree, int blocks, int n0) {
    return GadgetSpec(p, FieldSpec::lexmin(degree), blocks, n0);
}

}  // namespace

TEST(GadgetSpec, ValidatesParameters) {
    EXPECT_NO_THROW(make_spec(2, 4, 2, 4));
    EXPECT_THROW(make_spec(0, 4, 2, 4), std::invalid_argument);
    EXPECT_THROW(make_spec(2, 4, 0, 4), std::invalid_argument);
    EXPECT_THROW(make_spec(2, 4, 2, 3), std::invalid_argument);  // odd n0
    EXPECT_THROW(make_spec(2, 4, 2, 6), std::invalid_argument);  // n0 > degree
    EXPECT_THROW(make_spec(2, 4, 2, 0), std::invalid_argument);
}

TEST(GadgetSpec, PackUnpackRoundTrip) {
    auto spec = make_spec(2, 3, 2, 2);
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        uint64_t packed = rng.below(spec.input_count());
        EXPECT_EQ(pack_input(spec, unpack_input(spec, packed)), packed);
    }
    // element (i, j) sits at bit offset (i*blocks + j) * degree
    GadgetInput in;
    in.elems = {0b001, 0b010, 0b011, 0b100};
    EXPECT_EQ(pack_input(spec, in), 0b100'011'010'001u);
}

TEST(EvalGip, ZeroInputGivesZero) {
    for (auto spec : {make_spec(2, 2, 2, 2), make_spec(3, 4, 3, 4), make_spec(1, 8, 2, 8)}) {
        GadgetInput zero;
        zero.elems.assign(static_cast<size_t>(spec.p) * spec.blocks, 0);
        EXPECT_EQ(eval_gip(spec, zero), 0u);
        EXPECT_EQ(eval_gadget(spec, zero), 0u);
    }
}

TEST(EvalGip, DegeneratesToAndOverGf2) {
    auto spec = make_spec(2, 2, 1, 2);
    // Over GF(2) with one block, the value is x_{0,0} * x_{1,0}.
    for (uint64_t a = 0; a <= 1; ++a) {
        for (uint64_t b = 0; b <= 1; ++b) {
            GadgetInput in;
            in.elems = {a, b};
            EXPECT_EQ(eval_gip(spec, in), a & b);
        }
    }
}

TEST(EvalGip, CharacteristicTwoCancellation) {
    // x1 = (x, x^2), x2 = (x^2, x): the two block products coincide and cancel.
    auto spec = make_spec(2, 3, 2, 2);
    GadgetInput in;
    in.elems = {0b010, 0b100, 0b100, 0b010};
    EXPECT_EQ(eval_gip(spec, in), 0u);
}

TEST(EvalGip, ShapeMismatchThrows) {
    auto spec = make_spec(2, 3, 2, 2);
    GadgetInput in;
    in.elems = {1, 2, 3};
    EXPECT_THROW(eval_gip(spec, in), std::invalid_argument);
    in.elems = {1, 2, 3, 8};  // 8 is outside GF(8)
    EXPECT_THROW(eval_gip(spec, in), std::invalid_argument);
}

TEST(EvalGadget, TruncationKeepsLowBits) {
    auto spec = make_spec(1, 3, 1, 2);
    // p=1, blocks=1: the value is the input element itself.
    GadgetInput in;
    in.elems = {0b101};
    EXPECT_EQ(eval_gip(spec, in), 0b101u);
    EXPECT_EQ(eval_gadget(spec, in), 0b01u);  // bits (1, 0)
    auto full = make_spec(1, 4, 1, 4);
    in.elems = {0b1011};
    EXPECT_EQ(eval_gadget(full, in), 0b1011u);  // n0 == degree: identity
}

TEST(EvalGip, MultilinearPerBlock) {
    // Flipping x_{0,j} by delta changes the value by delta * prod of the rest.
    for (int degree : {1, 2}) {
        GadgetSpec spec;  // n0 plays no role here, so skip the validating ctor
        spec.p = 2;
        spec.field = FieldSpec::lexmin(degree);
        spec.blocks = 2;
        uint64_t q = spec.q();
        for (uint64_t packed = 0; packed < spec.input_count(); ++packed) {
            auto in = unpack_input(spec, packed);
            for (int j = 0; j < spec.blocks; ++j) {
                for (uint64_t delta = 0; delta < q; ++delta) {
                    auto flipped = in;
                    flipped.elems[j] ^= delta;
                    uint64_t expect = spec.field.add(
                        eval_gip(spec, in),
                        spec.field.mul(delta, in.elems[static_cast<size_t>(spec.blocks) + j]));
                    ASSERT_EQ(eval_gip(spec, flipped), expect);
                }
            }
        }
    }
}

TEST(GipDistribution, MatchesClosedFormExactly) {
    // The enumeration and the fiber-counting oracle must agree as rationals.
    for (int degree : {1, 2, 3}) {
        for (int blocks : {1, 2, 3}) {
            FieldSpec f = FieldSpec::lexmin(degree);
            GadgetSpec spec;
            spec.p = 2;
            spec.field = f;
            spec.blocks = blocks;
            spec.n0 = 2;  // unused by the distribution; bypass n0<=degree guard
            auto exact = gip_distribution_exact(spec);
            auto oracle = gip_p2_closed_form(spec);
            ASSERT_EQ(exact.size(), oracle.size());
            for (size_t v = 0; v < exact.size(); ++v) {
                ASSERT_EQ(exact[v].count, oracle[v].count) << "degree=" << degree
                                                           << " blocks=" << blocks << " v=" << v;
                ASSERT_EQ(exact[v].prob, oracle[v].prob);
            }
        }
    }
}

TEST(GipDistribution, KnownCountsForGf2R2) {
    GadgetSpec spec;
    spec.p = 2;
    spec.field = FieldSpec::lexmin(1);
    spec.blocks = 2;
    auto rows = gip_distribution_exact(spec);
    EXPECT_EQ(rows[0].prob, rat(10, 16));
    EXPECT_EQ(rows[1].prob, rat(6, 16));
}

TEST(GipDistribution, UniformWhenLinear) {
    // p = 1 reduces to a sum of the blocks: every value equally likely.
    auto spec = make_spec(1, 3, 2, 2);
    for (auto& row : gip_distribution_exact(spec)) {
        EXPECT_EQ(row.prob, rat(1, spec.q()));
    }
}

TEST(GipDistribution, ParallelMatchesSerial) {
    auto spec = make_spec(2, 3, 2, 2);
    auto a = gip_distribution_exact(spec, 1);
    auto b = gip_distribution_exact(spec, 4);
    for (size_t v = 0; v < a.size(); ++v) EXPECT_EQ(a[v].count, b[v].count);
}

TEST(CylinderSet, FullSpaceMeetsPremise) {
    auto spec = make_spec(2, 3, 2, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kFullSpace;
    auto set = SampledCylinderSet::build(spec, cfg);
    EXPECT_TRUE(set.meets_size_premise());
    EXPECT_EQ(set.size(), BigInt(spec.input_count()));
}

TEST(CylinderSet, RectangleSizeAndMembership) {
    auto spec = make_spec(2, 3, 2, 2);  // row space 2^6 = 64
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kRectangle;
    cfg.seed = 42;
    cfg.a_size = 0;   // full side
    cfg.b_size = 8;   // 64 * 8 = 512 = q^(rp-1) exactly
    auto set = SampledCylinderSet::build(spec, cfg);
    EXPECT_TRUE(set.meets_size_premise());
    EXPECT_EQ(set.size(), BigInt(512));

    // Every draw is a member.
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) EXPECT_TRUE(set.contains(set.draw(rng)));

    // Membership in each constituent cylinder ignores the omitted row, and
    // the intersection of the cylinders is exactly the sampled set.
    Rng rng2(2);
    for (int t = 0; t < 2000; ++t) {
        uint64_t x = rng2.below(spec.input_count());
        for (int i = 0; i < spec.p; ++i) {
            uint64_t row_mask = 63ULL << (i * spec.row_bits());
            uint64_t y = (x & ~row_mask) | (rng2.below(64) << (i * spec.row_bits()));
            ASSERT_EQ(set.cylinder_contains(i, x), set.cylinder_contains(i, y));
        }
        ASSERT_EQ(set.contains(x), set.cylinder_contains(0, x) && set.cylinder_contains(1, x));
    }
}

TEST(CylinderSet, RandomCylindersMembershipIgnoresOwnRow) {
    auto spec = make_spec(3, 2, 2, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kRandomCylinders;
    cfg.seed = 99;
    cfg.keep = 0.7;
    auto set = SampledCylinderSet::build(spec, cfg);
    Rng rng(3);
    for (int t = 0; t < 5000; ++t) {
        uint64_t x = rng.below(spec.input_count());
        for (int i = 0; i < spec.p; ++i) {
            uint64_t row_mask = ((1ULL << spec.row_bits()) - 1) << (i * spec.row_bits());
            uint64_t y = (x & ~row_mask) | (rng.below(1ULL << spec.row_bits()) << (i * spec.row_bits()));
            ASSERT_EQ(set.cylinder_contains(i, x), set.cylinder_contains(i, y));
        }
    }
}

TEST(CylinderSet, RectangleBelowPremiseThrowsInEstimator) {
    auto spec = make_spec(2, 3, 2, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kRectangle;
    cfg.seed = 5;
    cfg.a_size = 4;
    cfg.b_size = 4;  // 16 < 512
    EXPECT_THROW(extractor_estimate(spec, cfg, 10000), std::invalid_argument);
}

TEST(Extractor, RejectsTooFewSamples) {
    auto spec = make_spec(2, 3, 2, 2);
    CylinderSampler cfg;
    EXPECT_THROW(extractor_estimate(spec, cfg, 100), std::invalid_argument);
}

TEST(Extractor, FullSpaceAgreesWithExactDistribution) {
    auto spec = make_spec(2, 3, 2, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kFullSpace;
    cfg.seed = 2024;
    auto rep = extractor_estimate(spec, cfg, 200000);
    auto exact = gip_distribution_exact(spec);
    for (uint64_t v = 0; v < spec.q(); ++v) {
        double truth = to_double(exact[v].prob);
        double slack = 3.0 * rep.gip_rows[v].se + 1e-9;
        EXPECT_NEAR(rep.gip_rows[v].phat, truth, slack) << "v=" << v;
    }
    EXPECT_TRUE(rep.pass());
}

TEST(Extractor, RectangleTrialStaysUnderBound) {
    // One desk-size instance of the acceptance setup: p=2, q=8, r=8.
    auto spec = make_spec(2, 3, 8, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kRectangle;
    cfg.seed = 7;
    cfg.a_size = 0;                   // full row space, 2^24
    cfg.b_size = 1ULL << 21;          // q^(r-1)
    auto rep = extractor_estimate(spec, cfg, 100000, 2);
    EXPECT_TRUE(rep.premise_met);
    EXPECT_NEAR(rep.gip_bound, 0.15625, 1e-12);  // 1/8 + 8*(2/8)^4
    EXPECT_TRUE(rep.gip_pass);
    EXPECT_TRUE(rep.gadget_pass);
}

TEST(Extractor, DeterministicForFixedSeed) {
    auto spec = make_spec(2, 3, 2, 2);
    CylinderSampler cfg;
    cfg.mode = CylinderSampler::Mode::kFullSpace;
    cfg.seed = 31337;
    auto a = extractor_estimate(spec, cfg, 20000);
    auto b = extractor_estimate(spec, cfg, 20000);
    auto c = extractor_estimate(spec, cfg, 20000, 2);  // thread count is irrelevant
    for (uint64_t v = 0; v < spec.q(); ++v) {
        EXPECT_EQ(a.gip_rows[v].count, b.gip_rows[v].count);
        EXPECT_EQ(a.gip_rows[v].count, c.gip_rows[v].count);
    }
}
