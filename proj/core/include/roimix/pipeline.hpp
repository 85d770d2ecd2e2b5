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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "roimix/evaluation.hpp"
#include "roimix/mixer.hpp"

namespace roimix {

/// Running moments plus extrema of a scalar stream.
struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = 0.0;
    double max = 0.0;

    void add(double x);
    double variance() const { return count > 1 ? m2 / static_cast<double>(count) : 0.0; }
};

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> bins;

    Histogram(double lo_, double hi_, std::size_t n) : lo(lo_), hi(hi_), bins(n, 0) {}
    void add(double x);
};

struct AugmentOptions {
    std::filesystem::path dataset;
    std::string split = "trainval";
    std::filesystem::path out;
    MixConfig mix = select_variant("roimix");
    std::size_t batch_size = 2;
    std::size_t epochs = 1;
    std::size_t workers = 1;
};

struct AugmentSummary {
    std::size_t images = 0;
    std::size_t images_modified = 0;
    std::size_t batches = 0;
    std::size_t proposals_mixed = 0;
    std::size_t jitter_calls = 0;
    Moments lambda;
    Moments lambda_prime;
};

/// Runs the mixer over the dataset in batches of `batch_size` images (manifest
/// order) and writes a VOC-layout copy to `out`.
///
/// Batch b of epoch e draws from RandomStream(seed).derive({e, b}), so output
/// is independent of the worker count. Mixed images are written as PNG;
/// untouched images and all annotations are copied byte-for-byte. Work happens
/// in a sibling staging directory that is renamed onto `out` only on success.
/// With epochs > 1, each epoch is a separate VOC root out/epoch_NNN.
AugmentSummary run_augment(const AugmentOptions& options);

enum class CorruptionKind { gaussian, poisson, salt, pepper, salt_and_pepper, blur };

std::string_view to_string(CorruptionKind kind);
CorruptionKind parse_corruption_kind(std::string_view name);

struct CorruptOptions {
    std::filesystem::path dataset;
    std::string split = "test";
    std::filesystem::path out;
    CorruptionKind kind = CorruptionKind::gaussian;
    std::optional<double> sigma; ///< gaussian noise stddev (default 0.05) or blur sigma (default 1.0)
    double probability = 0.05;
    double scale = 255.0;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct CorruptSummary {
    std::size_t images = 0;
};

/// Applies one corruption to every image (image i uses RandomStream(seed).derive({i}))
/// and writes a VOC-layout copy with PNG images and verbatim annotations.
CorruptSummary run_corrupt(const CorruptOptions& options);

struct EvaluateOptions {
    std::filesystem::path dataset;
    std::string split = "test";
    std::filesystem::path detections;
    double iou_threshold = 0.5;
    ApMode mode = ApMode::eleven_point;
    std::optional<std::filesystem::path> baseline_report;
    std::optional<std::filesystem::path> report_out;
};

EvalReport run_evaluate(const EvaluateOptions& options);

/// JSON form of a report (also the --baseline-report input format).
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);

/// Line-oriented key=value form.
std::string report_to_text(const EvalReport& report);

/// Human-readable table; adds a delta column when `baseline` is given.
void print_report_table(std::ostream& os, const EvalReport& report, const EvalReport* baseline);

struct LambdaStatsOptions {
    double alpha = 0.1;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

struct LambdaStats {
    Moments lambda;
    Moments lambda_prime;
    Histogram lambda_hist{0.0, 1.0, 20};
    Histogram lambda_prime_hist{0.0, 1.0, 20};
};

LambdaStats run_lambda_stats(const LambdaStatsOptions& options);

void print_lambda_stats(std::ostream& os, const LambdaStats& stats);

void print_augment_summary(std::ostream& os, const AugmentSummary& summary);

} // namespace roimix
