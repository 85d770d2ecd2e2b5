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

#include <gtest/gtest.h>

#include "roimix/error.hpp"
#include "roimix/evaluation.hpp"
#include "support/oracles.hpp"

using namespace roimix;
using F = MatchFlag;

namespace {

constexpr F TP = F::true_positive;
constexpr F FP = F::false_positive;

} // namespace

TEST(Match, ExactDetectionIsTruePositive)
{
    const std::vector<GroundTruthRecord> gts{{"img", "scallop", {0, 0, 10, 10}, false}};
    const std::vector<DetectionRecord> dets{{"img", "scallop", 0.9, {0, 0, 10, 10}}};
    EXPECT_EQ(match_detections(dets, gts), std::vector<F>{TP});
}

TEST(Match, DuplicateIsFalsePositive)
{
    const std::vector<GroundTruthRecord> gts{{"img", "scallop", {0, 0, 10, 10}, false}};
    // Lower-scored detection listed first: order of processing is by score.
    const std::vector<DetectionRecord> dets{{"img", "scallop", 0.8, {0, 0, 10, 10}},
                                            {"img", "scallop", 0.9, {0, 0, 10, 10}}};
    EXPECT_EQ(match_detections(dets, gts), (std::vector<F>{FP, TP}));
}

TEST(Match, WrongImageOrClassIsFalsePositive)
{
    const std::vector<GroundTruthRecord> gts{{"img", "scallop", {0, 0, 10, 10}, false}};
    const std::vector<DetectionRecord> dets{{"other", "scallop", 0.9, {0, 0, 10, 10}},
                                            {"img", "echinus", 0.9, {0, 0, 10, 10}},
                                            {"img", "scallop", 0.9, {20, 20, 30, 30}}};
    EXPECT_EQ(match_detections(dets, gts), (std::vector<F>{FP, FP, FP}));
}

TEST(Match, DifficultMatchesAreIgnored)
{
    const std::vector<GroundTruthRecord> gts{{"img", "scallop", {0, 0, 10, 10}, true}};
    const std::vector<DetectionRecord> dets{{"img", "scallop", 0.9, {0, 0, 10, 10}},
                                            {"img", "scallop", 0.8, {0, 0, 9, 10}}};
    EXPECT_EQ(match_detections(dets, gts), (std::vector<F>{F::ignored, F::ignored}));
}

TEST(Match, ThresholdIsInclusive)
{
    const std::vector<GroundTruthRecord> gts{{"img", "scallop", {0, 0, 10, 10}, false}};
    const std::vector<DetectionRecord> dets{{"img", "scallop", 0.9, {5, 0, 15, 10}}}; // IoU 1/3
    EXPECT_EQ(match_detections(dets, gts, 1.0 / 3.0), std::vector<F>{TP});
    EXPECT_EQ(match_detections(dets, gts, 0.34), std::vector<F>{FP});
    EXPECT_THROW(match_detections(dets, gts, 0.0), InvalidArgument);
    EXPECT_TRUE(match_detections({}, {}).empty());
}

TEST(AveragePrecision, HandCases)
{
    for (ApMode mode : {ApMode::eleven_point, ApMode::all_point}) {
        EXPECT_DOUBLE_EQ(average_precision(std::vector<F>{TP}, 1, mode), 1.0);
        EXPECT_DOUBLE_EQ(average_precision(std::vector<F>{FP, FP}, 1, mode), 0.0);
        EXPECT_DOUBLE_EQ(average_precision(std::vector<F>{}, 0, mode), 0.0);
    }
    EXPECT_NEAR(average_precision(std::vector<F>{TP, FP, TP}, 2, ApMode::all_point), 5.0 / 6.0, 1e-15);
    // 11-point: recall 0.5 reached at precision 1, recall 1 at 2/3.
    EXPECT_NEAR(average_precision(std::vector<F>{TP, FP, TP}, 2, ApMode::eleven_point),
                (6.0 * 1.0 + 5.0 * (2.0 / 3.0)) / 11.0, 1e-15);
}

TEST(AveragePrecision, IgnoredFlagsAreSkipped)
{
    EXPECT_DOUBLE_EQ(average_precision(std::vector<F>{F::ignored, TP}, 1, ApMode::all_point), 1.0);
}

TEST(AveragePrecision, MatchesBruteForceOracle)
{
    RandomStream rng(17);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = rng.uniform_index(7);
        std::vector<F> flags;
        std::size_t tps = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool tp = rng.uniform() < 0.5;
            tps += tp;
            flags.push_back(tp ? TP : FP);
        }
        const std::size_t num_gt = std::max<std::size_t>(tps, 1) + rng.uniform_index(3);
        const double expected = test_support::brute_force_all_point_ap(flags, num_gt).value();
        ASSERT_NEAR(average_precision(flags, num_gt, ApMode::all_point), expected, 1e-12);
    }
}

TEST(AveragePrecision, RemovingFalsePositiveNeverHurts)
{
    RandomStream rng(18);
    for (int t = 0; t < 500; ++t) {
        std::vector<F> flags;
        for (int i = 0; i < 8; ++i) {
            flags.push_back(rng.uniform() < 0.5 ? TP : FP);
        }
        for (ApMode mode : {ApMode::eleven_point, ApMode::all_point}) {
            const double ap = average_precision(flags, 8, mode);
            ASSERT_GE(ap, 0.0);
            ASSERT_LE(ap, 1.0);
            for (std::size_t i = 0; i < flags.size(); ++i) {
                if (flags[i] != FP) {
                    continue;
                }
                std::vector<F> fewer = flags;
                fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
                ASSERT_GE(average_precision(fewer, 8, mode) + 1e-12, ap);
            }
        }
    }
}

TEST(Evaluate, MeanOverClassesWithGroundTruth)
{
    const std::vector<GroundTruthRecord> gts{{"a", "scallop", {0, 0, 10, 10}, false},
                                             {"b", "scallop", {0, 0, 10, 10}, false},
                                             {"a", "echinus", {20, 20, 30, 30}, false},
                                             {"b", "starfish", {5, 5, 8, 8}, true}};
    const std::vector<DetectionRecord> dets{{"a", "scallop", 0.9, {0, 0, 10, 10}},
                                            {"b", "scallop", 0.3, {0, 0, 10, 10}},
                                            {"a", "echinus", 0.5, {0, 0, 5, 5}},
                                            {"b", "holothurian", 0.5, {0, 0, 5, 5}},
                                            {"zzz", "scallop", 0.99, {0, 0, 10, 10}}};
    const std::vector<std::string> images{"a", "b"};
    const EvalReport r = evaluate(dets, gts, images, 0.5, ApMode::all_point);
    ASSERT_EQ(r.per_class.size(), 2u); // starfish only has a difficult box
    EXPECT_DOUBLE_EQ(r.per_class.at("scallop").ap, 1.0);
    EXPECT_DOUBLE_EQ(r.per_class.at("echinus").ap, 0.0);
    EXPECT_EQ(r.per_class.at("scallop").num_gt, 2u);
    EXPECT_DOUBLE_EQ(r.map, 0.5);
    EXPECT_EQ(r.dropped_detections, 1u);
}

TEST(Evaluate, TiesKeepInputOrder)
{
    const std::vector<GroundTruthRecord> gts{{"a", "scallop", {0, 0, 10, 10}, false}};
    const std::vector<DetectionRecord> first_tp{{"a", "scallop", 0.5, {0, 0, 10, 10}},
                                                {"a", "scallop", 0.5, {50, 50, 60, 60}}};
    const std::vector<DetectionRecord> first_fp{first_tp[1], first_tp[0]};
    const std::vector<std::string> images{"a"};
    EXPECT_DOUBLE_EQ(evaluate(first_tp, gts, images, 0.5, ApMode::all_point).map, 1.0);
    EXPECT_DOUBLE_EQ(evaluate(first_fp, gts, images, 0.5, ApMode::all_point).map, 0.5);
}

TEST(DetectionFile, ParsesAndFormats)
{
    const auto dets = parse_detections("# comment\n\n000001 scallop 0.75 1 2 30 40\n000002 echinus 1e-3 0 0 5.4 6\n");
    ASSERT_EQ(dets.size(), 2u);
    EXPECT_EQ(dets[0].image_id, "000001");
    EXPECT_EQ(dets[0].box, (BoundingBox{1, 2, 30, 40}));
    EXPECT_EQ(dets[1].box, (BoundingBox{0, 0, 5, 6}));
    EXPECT_DOUBLE_EQ(dets[1].score, 1e-3);
    const auto again = parse_detections(format_detections(dets));
    ASSERT_EQ(again.size(), 2u);
    EXPECT_EQ(again[1].score, dets[1].score);
}

TEST(DetectionFile, ErrorsNameTheLine)
{
    auto message = [](const std::string& text) {
        try {
            parse_detections(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("a b 0.5 0 0 1 1\na b 0.5 0 0 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("\n\na b x 0 0 1 1\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("a b 0.5 0 0 1 1 extra\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("a b 0.5 5 0 1 1\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("a b nan 0 0 1 1\n").find("line 1"), std::string::npos);
}

TEST(ApMode, Names)
{
    EXPECT_EQ(parse_ap_mode("all_point"), ApMode::all_point);
    EXPECT_EQ(parse_ap_mode(to_string(ApMode::eleven_point)), ApMode::eleven_point);
    EXPECT_THROW(parse_ap_mode("coco"), InvalidArgument);
}
