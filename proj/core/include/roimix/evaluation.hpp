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

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roimix/dataset.hpp"
#include "roimix/geometry.hpp"

namespace roimix {

struct DetectionRecord {
    std::string image_id;
    std::string label;
    double score = 0.0;
    BoundingBox box;
};

struct GroundTruthRecord {
    std::string image_id;
    std::string label;
    BoundingBox box;
    bool difficult = false;
};

enum class MatchFlag { true_positive, false_positive, ignored };

enum class ApMode { eleven_point, all_point };

std::string_view to_string(ApMode mode);
ApMode parse_ap_mode(std::string_view name);

/// VOC matching. Returns one flag per detection, aligned with `dets`.
///
/// Detections are visited in descending score (stable on input order). Each
/// is compared with every ground truth of the same image and class; the one
/// with highest IoU decides: below threshold -> FP; difficult -> ignored;
/// already claimed -> FP; otherwise TP and the ground truth is claimed.
std::vector<MatchFlag> match_detections(std::span<const DetectionRecord> dets,
                                        std::span<const GroundTruthRecord> gts,
                                        double iou_threshold = 0.5);

/// AP of a score-ordered TP/FP sequence (ignored flags are skipped).
/// num_gt == 0 yields 0.
double average_precision(std::span<const MatchFlag> flags, std::size_t num_gt, ApMode mode);

struct ClassResult {
    double ap = 0.0;
    std::size_t num_gt = 0;
    std::size_t num_detections = 0;
};

struct EvalReport {
    std::map<std::string, ClassResult> per_class; ///< classes with >= 1 non-difficult GT
    double map = 0.0;
    double iou_threshold = 0.5;
    ApMode mode = ApMode::eleven_point;
    std::size_t dropped_detections = 0; ///< detections naming unknown images
};

/// Evaluates detections against in-memory ground truth. `known_images`
/// lists valid image ids; detections outside it are dropped and counted.
EvalReport evaluate(std::span<const DetectionRecord> dets, std::span<const GroundTruthRecord> gts,
                    std::span<const std::string> known_images, double iou_threshold, ApMode mode);

/// Loads ground truth for every manifest entry (image id = stem) and evaluates.
EvalReport evaluate(std::span<const DetectionRecord> dets, const DatasetManifest& manifest,
                    double iou_threshold, ApMode mode);

/// Parses "image_id label score x_min y_min x_max y_max" lines. Blank lines and
/// lines starting with '#' are skipped. Errors name the offending line number.
std::vector<DetectionRecord> parse_detections(std::string_view text);

std::string format_detections(std::span<const DetectionRecord> dets);

} // namespace roimix
