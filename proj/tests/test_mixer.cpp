/**
 * Copyright 2026 The RoIMix Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "roimix/error.hpp"
#include "roimix/mixer.hpp"
#include "support/oracles.hpp"
#include "support/toy_dataset.hpp"

using namespace roimix;
using roimix::test_support::random_image;

namespace {

struct Batch {
    std::vector<ImageBuffer> images;
    std::vector<std::vector<LabeledBox>> annotations;
};

Batch make_batch(std::size_t n, std::uint64_t seed, bool allow_empty = false)
{
    Batch batch;
    RandomStream rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int w = 20 + static_cast<int>(rng.uniform_index(20));
        const int h = 16 + static_cast<int>(rng.uniform_index(20));
        batch.images.push_back(random_image(w, h, 3, seed * 31 + i));
        std::vector<LabeledBox> objs;
        const std::size_t count = allow_empty ? rng.uniform_index(4) : 1 + rng.uniform_index(3);
        for (std::size_t k = 0; k < count; ++k) {
            BoundingBox box = roimix::test_support::random_box(w - 3, h - 3, rng);
            box.x_max += 3;
            box.y_max += 3;
            objs.push_back({box, roimix::test_support::kUrpcClasses[k % 4], false});
        }
        batch.annotations.push_back(std::move(objs));
    }
    return batch;
}

MixConfig small_config(std::string_view variant, std::size_t per_image = 6)
{
    MixConfig config = select_variant(variant);
    config.proposals_per_image = per_image;
    config.seed = 1234;
    return config;
}

} // namespace

TEST(ApplyMax, Examples)
{
    EXPECT_DOUBLE_EQ(apply_max(0.3), 0.7);
    EXPECT_DOUBLE_EQ(apply_max(0.5), 0.5);
    EXPECT_DOUBLE_EQ(apply_max(0.7), 0.7);
}

TEST(SampleLambda, UniformWhenAlphaIsOne)
{
    RandomStream rng(1);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        sum += sample_lambda(1.0, rng);
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(SampleLambda, VarianceMatchesClosedForm)
{
    for (double alpha : {0.01, 0.1, 1.0, 4.0}) {
        RandomStream rng(2);
        const int n = 100000;
        double sum = 0.0;
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double l = sample_lambda(alpha, rng);
            ASSERT_GE(l, kLambdaEpsilon);
            ASSERT_LE(l, 1.0 - kLambdaEpsilon);
            sum += l;
            sq += l * l;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        const double expected = test_support::beta_symmetric_variance(alpha);
        EXPECT_NEAR(var, expected, 0.05 * expected) << "alpha " << alpha;
        EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(expected / n)) << "alpha " << alpha;
    }
}

TEST(SampleLambda, RejectsNonPositiveAlpha)
{
    RandomStream rng(1);
    EXPECT_THROW(sample_lambda(0.0, rng), InvalidArgument);
    EXPECT_THROW(sample_lambda(-1.0, rng), InvalidArgument);
    EXPECT_THROW(sample_lambda(NAN, rng), InvalidArgument);
}

TEST(MixRegions, UnitRatioReturnsFirstRegion)
{
    const ImageBuffer a = random_image(9, 7, 3, 1);
    const ImageBuffer b = random_image(5, 11, 3, 2);
    EXPECT_EQ(mix_regions(a, b, 1.0), a);
}

TEST(MixRegions, ConstantArithmetic)
{
    const ImageBuffer a(6, 4, 3, 100.0f / 255.0f);
    const ImageBuffer b(6, 4, 3, 200.0f / 255.0f);
    const ImageBuffer out = mix_regions(a, b, 0.7);
    for (float v : out.data()) {
        EXPECT_NEAR(v, 130.0 / 255.0, 1e-6);
    }
}

TEST(MixRegions, ResizesSecondRegionAndStaysConvex)
{
    RandomStream rng(3);
    for (int t = 0; t < 50; ++t) {
        const ImageBuffer a = random_image(3 + t % 7, 4 + t % 5, 3, 10 + t);
        const ImageBuffer b = random_image(2 + t % 9, 3 + t % 4, 3, 90 + t);
        const double lp = rng.uniform();
        const ImageBuffer out = mix_regions(a, b, lp);
        ASSERT_EQ(out.width(), a.width());
        ASSERT_EQ(out.height(), a.height());
        const ImageBuffer bj = resize_bilinear(b, a.width(), a.height());
        for (std::size_t i = 0; i < out.size(); ++i) {
            ASSERT_GE(out.data()[i], std::min(a.data()[i], bj.data()[i]));
            ASSERT_LE(out.data()[i], std::max(a.data()[i], bj.data()[i]));
        }
    }
}

TEST(MixRegions, Errors)
{
    EXPECT_THROW(mix_regions(ImageBuffer(2, 2, 3), ImageBuffer(2, 2, 1), 0.5), InvalidArgument);
    EXPECT_THROW(mix_regions(ImageBuffer(2, 2, 3), ImageBuffer(2, 2, 3), 1.5), InvalidArgument);
}

TEST(ImageIndex, FloorOfKNOverN)
{
    EXPECT_EQ(image_index_for(64, 2, 128), 1u);
    EXPECT_EQ(image_index_for(0, 2, 128), 0u);
    EXPECT_EQ(image_index_for(63, 2, 128), 0u);
    EXPECT_EQ(image_index_for(127, 2, 128), 1u);
    EXPECT_EQ(image_index_for(5, 3, 12), 1u);
}

TEST(SelectVariant, CoversAllAblationRows)
{
    struct Row {
        const char* name;
        MixScope scope;
        ProposalSource source;
        bool use_max;
    };
    const Row rows[] = {
        {"roimix", MixScope::multi_image, ProposalSource::pseudo_roi, true},
        {"gtmix", MixScope::multi_image, ProposalSource::ground_truth, true},
        {"single_gtmix", MixScope::single_image, ProposalSource::ground_truth, true},
        {"single_roimix", MixScope::single_image, ProposalSource::pseudo_roi, true},
        {"roimix_nomax", MixScope::multi_image, ProposalSource::pseudo_roi, false},
        {"single_roimix_nomax", MixScope::single_image, ProposalSource::pseudo_roi, false},
    };
    for (const auto& row : rows) {
        const MixConfig c = select_variant(row.name);
        EXPECT_EQ(c.scope, row.scope) << row.name;
        EXPECT_EQ(c.source, row.source) << row.name;
        EXPECT_EQ(c.use_max, row.use_max) << row.name;
        EXPECT_EQ(variant_name(c), row.name);
    }
    EXPECT_EQ(variant_names().size(), 6u);
    EXPECT_THROW(select_variant("cutmix"), InvalidArgument);
}

TEST(Proposals, GroundTruthIsCycledWithoutJitter)
{
    const Batch batch = make_batch(3, 5);
    MixConfig config = small_config("gtmix", 7);
    RandomStream rng(1);
    std::size_t calls = 0;
    const auto proposals = build_proposals(batch.images, batch.annotations, config, rng, &calls);
    EXPECT_EQ(calls, 0u);
    ASSERT_EQ(proposals.size(), 21u);
    for (std::size_t k = 0; k < proposals.size(); ++k) {
        const auto& objs = batch.annotations[k / 7];
        EXPECT_EQ(proposals[k].image_index, k / 7);
        EXPECT_EQ(proposals[k].region, objs[(k % 7) % objs.size()].box);
        EXPECT_EQ(proposals[k].image_index, image_index_for(k, 3, 21));
    }
}

TEST(Proposals, PseudoRoisJitterEveryProposal)
{
    const Batch batch = make_batch(2, 6);
    RandomStream rng(1);
    std::size_t calls = 0;
    const auto proposals = build_proposals(batch.images, batch.annotations, small_config("roimix", 5), rng, &calls);
    EXPECT_EQ(calls, 10u);
    for (const auto& p : proposals) {
        EXPECT_TRUE(p.region.inside(batch.images[p.image_index].width(), batch.images[p.image_index].height()));
    }
}

TEST(Pairing, IsABijectionAndRespectsScope)
{
    const Batch batch = make_batch(4, 7);
    for (MixScope scope : {MixScope::multi_image, MixScope::single_image}) {
        RandomStream rng(3);
        MixConfig config = small_config("roimix", 9);
        const auto proposals = build_proposals(batch.images, batch.annotations, config, rng);
        const auto partner = draw_pairing(proposals, scope, rng);
        std::vector<std::size_t> sorted = partner;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            ASSERT_EQ(sorted[i], i);
        }
        if (scope == MixScope::single_image) {
            for (std::size_t k = 0; k < partner.size(); ++k) {
                ASSERT_EQ(proposals[k].image_index, proposals[partner[k]].image_index);
            }
        }
    }
}

TEST(RoiMixBatch, UnitRatioLeavesImagesUntouched)
{
    const Batch batch = make_batch(3, 8);
    RandomStream rng(1);
    const auto out = roimix_batch(batch.images, batch.annotations, small_config("roimix"), rng,
                                  [](RandomStream&) { return 1.0; });
    EXPECT_EQ(out.images, batch.images);
    EXPECT_FALSE(out.steps.empty());
}

TEST(RoiMixBatch, SingleImageBatchIgnoresScope)
{
    const Batch batch = make_batch(1, 9);
    const auto multi = roimix_batch(batch.images, batch.annotations, small_config("roimix"));
    const auto single = roimix_batch(batch.images, batch.annotations, small_config("single_roimix"));
    EXPECT_EQ(multi.images, single.images);
}

TEST(RoiMixBatch, ChangesStayInsideProposalBoxes)
{
    const Batch batch = make_batch(4, 10, true);
    for (auto variant : variant_names()) {
        const auto out = roimix_batch(batch.images, batch.annotations, small_config(variant));
        for (std::size_t b = 0; b < batch.images.size(); ++b) {
            const ImageBuffer& before = batch.images[b];
            const ImageBuffer& after = out.images[b];
            for (int y = 0; y < before.height(); ++y) {
                for (int x = 0; x < before.width(); ++x) {
                    const bool covered = std::any_of(out.proposals.begin(), out.proposals.end(), [&](const Proposal& p) {
                        return p.image_index == b && p.region.contains(x, y);
                    });
                    if (covered) {
                        continue;
                    }
                    for (int c = 0; c < 3; ++c) {
                        ASSERT_EQ(before.at(x, y, c), after.at(x, y, c)) << variant << " image " << b;
                    }
                }
            }
            if (batch.annotations[b].empty()) {
                EXPECT_EQ(before, after);
            }
        }
    }
}

TEST(RoiMixBatch, LastPasteWinsWhereBoxesOverlap)
{
    // One image, two identical GT boxes; each k pastes over the same box, so
    // the final content is the mix computed at the last k.
    ImageBuffer img = random_image(16, 16, 1, 3);
    std::vector<ImageBuffer> images{img};
    std::vector<std::vector<LabeledBox>> anns{{{{2, 2, 10, 10}, "scallop", false}, {{2, 2, 10, 10}, "scallop", false}}};
    MixConfig config = small_config("single_gtmix", 2);
    RandomStream rng(4);
    const auto out = roimix_batch(images, anns, config, rng, [](RandomStream&) { return 0.6; });
    const ImageBuffer patch = crop(img, {2, 2, 10, 10});
    EXPECT_EQ(crop(out.images[0], {2, 2, 10, 10}), mix_regions(patch, patch, 0.6));
}

TEST(RoiMixBatch, SingleScopeIsolatesImages)
{
    const Batch batch = make_batch(4, 11);
    for (auto variant : {"single_roimix", "single_gtmix", "single_roimix_nomax"}) {
        const MixConfig config = small_config(variant);
        const auto base = roimix_batch(batch.images, batch.annotations, config);
        for (std::size_t t = 0; t < batch.images.size(); ++t) {
            std::vector<ImageBuffer> zeroed = batch.images;
            zeroed[t] = ImageBuffer(zeroed[t].width(), zeroed[t].height(), 3, 0.0f);
            const auto out = roimix_batch(zeroed, batch.annotations, config);
            for (std::size_t b = 0; b < batch.images.size(); ++b) {
                if (b != t) {
                    ASSERT_EQ(out.images[b], base.images[b]) << variant << " zeroed " << t << " changed " << b;
                }
            }
        }
    }
}

TEST(RoiMixBatch, MultiScopeMixesAcrossImages)
{
    const Batch batch = make_batch(4, 12);
    const MixConfig config = small_config("roimix", 16);
    const auto out = roimix_batch(batch.images, batch.annotations, config);
    std::size_t cross = 0;
    for (const auto& step : out.steps) {
        cross += out.proposals[step.partner].image_index != step.image ? 1 : 0;
    }
    EXPECT_GT(cross, 0u);
}

TEST(RoiMixBatch, Deterministic)
{
    const Batch batch = make_batch(4, 13);
    for (auto variant : variant_names()) {
        const auto a = roimix_batch(batch.images, batch.annotations, small_config(variant));
        const auto b = roimix_batch(batch.images, batch.annotations, small_config(variant));
        EXPECT_EQ(a.images, b.images) << variant;
    }
}

TEST(RoiMixBatch, MaxRuleBoundsRatios)
{
    const Batch batch = make_batch(4, 14);
    MixConfig with_max = small_config("roimix", 64);
    MixConfig without = small_config("roimix_nomax", 64);
    with_max.alpha = without.alpha = 1.0;
    const auto a = roimix_batch(batch.images, batch.annotations, with_max);
    const auto b = roimix_batch(batch.images, batch.annotations, without);
    double min_a = 1.0;
    double min_b = 1.0;
    for (const auto& s : a.steps) {
        min_a = std::min(min_a, s.lambda_prime);
    }
    for (const auto& s : b.steps) {
        min_b = std::min(min_b, s.lambda_prime);
        EXPECT_EQ(s.lambda, s.lambda_prime);
    }
    EXPECT_GE(min_a, 0.5);
    EXPECT_LT(min_b, 0.5);
}

TEST(RoiMixBatch, Errors)
{
    const Batch batch = make_batch(2, 15);
    EXPECT_THROW(roimix_batch({}, {}, small_config("roimix")), InvalidArgument);
    MixConfig zero = small_config("roimix");
    zero.proposals_per_image = 0;
    EXPECT_THROW(roimix_batch(batch.images, batch.annotations, zero), InvalidArgument);
    MixConfig bad_alpha = small_config("roimix");
    bad_alpha.alpha = 0.0;
    EXPECT_THROW(roimix_batch(batch.images, batch.annotations, bad_alpha), InvalidArgument);
    std::vector<std::vector<LabeledBox>> short_anns(1);
    EXPECT_THROW(roimix_batch(batch.images, short_anns, small_config("roimix")), InvalidArgument);
}
