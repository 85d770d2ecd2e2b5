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

#include "roimix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "roimix/dataset.hpp"
#include "roimix/error.hpp"

namespace fs = std::filesystem;

namespace roimix {

void Moments::add(double x)
{
    ++count;
    if (count == 1) {
        min = max = x;
    } else {
        min = std::min(min, x);
        max = std::max(max, x);
    }
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void Histogram::add(double x)
{
    if (bins.empty()) {
        return;
    }
    const double t = (x - lo) / (hi - lo) * static_cast<double>(bins.size());
    const auto idx = static_cast<std::ptrdiff_t>(std::floor(t));
    bins[std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins.size()) - 1)] += 1;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// stops the scheduling of new items and is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn)
{
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto run = [&] {
        for (;;) {
            if (failed.load()) {
                return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(run);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

bool is_within(const fs::path& child, const fs::path& parent)
{
    const fs::path c = fs::weakly_canonical(child);
    const fs::path p = fs::weakly_canonical(parent);
    auto [pe, ce] = std::mismatch(p.begin(), p.end(), c.begin(), c.end());
    return pe == p.end();
}

// Output directory written through a sibling staging directory that is renamed
// into place by commit(). Anything left uncommitted is removed.
class StagedOutput {
public:
    StagedOutput(const fs::path& out, const fs::path& input_root) : final_(fs::absolute(out))
    {
        if (final_.filename().empty()) {
            final_ = final_.parent_path();
        }
        if (is_within(final_, input_root) || is_within(input_root, final_)) {
            throw InvalidArgument("output directory must not overlap the input dataset: " + final_.string());
        }
        if (fs::exists(final_) && !(fs::is_directory(final_) && fs::is_empty(final_))) {
            throw IoError("output path already exists and is not an empty directory: " + final_.string());
        }
        staging_ = final_.parent_path() / ("." + final_.filename().string() + ".partial");
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }

    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    ~StagedOutput()
    {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    const fs::path& dir() const { return staging_; }

    void commit()
    {
        if (fs::exists(final_)) {
            fs::remove(final_); // empty directory, checked in the constructor
        }
        fs::rename(staging_, final_);
        committed_ = true;
    }

private:
    fs::path final_;
    fs::path staging_;
    bool committed_ = false;
};

void make_voc_root(const fs::path& root, const DatasetManifest& manifest)
{
    fs::create_directories(root / "JPEGImages");
    fs::create_directories(root / "Annotations");
    fs::create_directories(root / "ImageSets" / "Main");
    const fs::path list = fs::path("ImageSets") / "Main" / (manifest.split + ".txt");
    fs::copy_file(manifest.root / list, root / list);
}

void copy_annotation(const ManifestEntry& entry, const fs::path& root)
{
    fs::copy_file(entry.annotation, root / "Annotations" / entry.annotation.filename());
}

fs::path png_output_path(const ManifestEntry& entry, const fs::path& root)
{
    return root / "JPEGImages" / (entry.stem + ".png");
}

ImageBuffer to_rgb(const ImageBuffer& gray)
{
    std::vector<float> data;
    data.reserve(gray.size() * 3);
    for (float v : gray.data()) {
        data.insert(data.end(), 3, v);
    }
    return ImageBuffer(gray.width(), gray.height(), 3, std::move(data));
}

struct BatchResult {
    std::size_t images_modified = 0;
    std::size_t jitter_calls = 0;
    std::vector<MixStep> steps;
};

BatchResult augment_batch(const DatasetManifest& manifest, std::size_t first, std::size_t last,
                          const std::vector<VocAnnotation>& annotations, const MixConfig& mix, RandomStream rng,
                          const fs::path& root)
{
    std::vector<ImageBuffer> images;
    std::vector<std::vector<LabeledBox>> objects;
    bool any_color = false;
    for (std::size_t i = first; i < last; ++i) {
        images.push_back(load_image(manifest.entries[i].image));
        objects.push_back(annotations[i].objects);
        any_color = any_color || images.back().channels() == 3;
    }
    if (any_color) {
        for (auto& image : images) {
            if (image.channels() == 1) {
                image = to_rgb(image);
            }
        }
    }

    MixOutcome outcome = roimix_batch(images, objects, mix, rng);

    std::vector<bool> touched(images.size(), false);
    for (const auto& p : outcome.proposals) {
        touched[p.image_index] = true;
    }

    BatchResult result;
    result.jitter_calls = outcome.jitter_calls;
    for (std::size_t b = 0; b < images.size(); ++b) {
        const ManifestEntry& entry = manifest.entries[first + b];
        if (touched[b]) {
            save_image(outcome.images[b], png_output_path(entry, root));
            ++result.images_modified;
        } else {
            fs::copy_file(entry.image, root / "JPEGImages" / entry.image.filename());
        }
        copy_annotation(entry, root);
    }
    result.steps = std::move(outcome.steps);
    return result;
}

} // namespace

AugmentSummary run_augment(const AugmentOptions& options)
{
    options.mix.validate();
    if (options.batch_size == 0) {
        throw InvalidArgument("batch size must be >= 1");
    }
    if (options.epochs == 0) {
        throw InvalidArgument("epochs must be >= 1");
    }

    const DatasetManifest manifest = load_dataset(options.dataset, options.split);
    std::vector<VocAnnotation> annotations;
    annotations.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        annotations.push_back(load_annotation(entry.annotation));
    }

    StagedOutput output(options.out, options.dataset);
    const std::size_t n = manifest.entries.size();
    const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
    const RandomStream base(options.mix.seed);

    AugmentSummary summary;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        fs::path root = output.dir();
        if (options.epochs > 1) {
            std::ostringstream name;
            name << "epoch_" << std::setw(3) << std::setfill('0') << epoch;
            root /= name.str();
        }
        make_voc_root(root, manifest);

        std::vector<BatchResult> results(batches);
        parallel_for(batches, options.workers, [&](std::size_t b) {
            const std::size_t first = b * options.batch_size;
            const std::size_t last = std::min(n, first + options.batch_size);
            results[b] = augment_batch(manifest, first, last, annotations, options.mix, base.derive({epoch, b}), root);
            spdlog::debug("epoch {} batch {}: {} mixes", epoch, b, results[b].steps.size());
        });

        // Merged in batch order so the summary is independent of scheduling.
        for (const auto& r : results) {
            summary.images_modified += r.images_modified;
            summary.jitter_calls += r.jitter_calls;
            summary.proposals_mixed += r.steps.size();
            for (const auto& step : r.steps) {
                summary.lambda.add(step.lambda);
                summary.lambda_prime.add(step.lambda_prime);
            }
        }
        summary.images += n;
        summary.batches += batches;
    }

    output.commit();
    spdlog::info("augment: wrote {} images to {}", summary.images, options.out.string());
    return summary;
}

std::string_view to_string(CorruptionKind kind)
{
    switch (kind) {
    case CorruptionKind::gaussian: return "gaussian";
    case CorruptionKind::poisson: return "poisson";
    case CorruptionKind::salt: return "salt";
    case CorruptionKind::pepper: return "pepper";
    case CorruptionKind::salt_and_pepper: return "salt-pepper";
    case CorruptionKind::blur: return "blur";
    }
    return "unknown";
}

CorruptionKind parse_corruption_kind(std::string_view name)
{
    for (CorruptionKind k : {CorruptionKind::gaussian, CorruptionKind::poisson, CorruptionKind::salt,
                             CorruptionKind::pepper, CorruptionKind::salt_and_pepper, CorruptionKind::blur}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    if (name == "salt_and_pepper") {
        return CorruptionKind::salt_and_pepper;
    }
    throw InvalidArgument("unknown corruption kind: " + std::string(name) +
                          " (expected gaussian, poisson, salt, pepper, salt-pepper, blur)");
}

CorruptSummary run_corrupt(const CorruptOptions& options)
{
    // Resolve and validate parameters before touching the filesystem.
    NoiseSpec noise;
    double blur_sigma = 1.0;
    if (options.kind == CorruptionKind::blur) {
        blur_sigma = options.sigma.value_or(1.0);
        gaussian_kernel(blur_sigma);
    } else {
        noise.kind = parse_noise_kind(to_string(options.kind));
        noise.sigma = options.sigma.value_or(0.05);
        noise.probability = options.probability;
        noise.scale = options.scale;
        noise.validate();
    }

    const DatasetManifest manifest = load_dataset(options.dataset, options.split);
    for (const auto& entry : manifest.entries) {
        load_annotation(entry.annotation);
    }

    StagedOutput output(options.out, options.dataset);
    make_voc_root(output.dir(), manifest);
    const RandomStream base(options.seed);

    parallel_for(manifest.entries.size(), options.workers, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        const ImageBuffer image = load_image(entry.image);
        RandomStream rng = base.derive({i});
        const ImageBuffer corrupted =
            options.kind == CorruptionKind::blur ? gaussian_blur(image, blur_sigma) : add_noise(image, noise, rng);
        save_image(corrupted, png_output_path(entry, output.dir()));
        copy_annotation(entry, output.dir());
    });

    output.commit();
    spdlog::info("corrupt: wrote {} {} images to {}", manifest.entries.size(), to_string(options.kind),
                 options.out.string());
    return {manifest.entries.size()};
}

std::string report_to_json(const EvalReport& report)
{
    nlohmann::ordered_json j;
    j["map"] = report.map;
    j["iou_threshold"] = report.iou_threshold;
    j["ap_mode"] = std::string(to_string(report.mode));
    j["dropped_detections"] = report.dropped_detections;
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& [label, r] : report.per_class) {
        classes[label] = {{"ap", r.ap}, {"num_gt", r.num_gt}, {"num_detections", r.num_detections}};
    }
    j["per_class"] = std::move(classes);
    return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        EvalReport report;
        report.map = j.at("map").get<double>();
        report.iou_threshold = j.value("iou_threshold", 0.5);
        report.mode = parse_ap_mode(j.value("ap_mode", std::string("eleven_point")));
        report.dropped_detections = j.value("dropped_detections", std::size_t{0});
        for (const auto& [label, r] : j.at("per_class").items()) {
            report.per_class[label] = {r.at("ap").get<double>(), r.value("num_gt", std::size_t{0}),
                                       r.value("num_detections", std::size_t{0})};
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("evaluation report: ") + e.what());
    }
}

std::string report_to_text(const EvalReport& report)
{
    std::ostringstream out;
    out << std::setprecision(10);
    out << "map=" << report.map << '\n';
    out << "iou_threshold=" << report.iou_threshold << '\n';
    out << "ap_mode=" << to_string(report.mode) << '\n';
    out << "dropped_detections=" << report.dropped_detections << '\n';
    for (const auto& [label, r] : report.per_class) {
        out << "ap." << label << '=' << r.ap << '\n';
        out << "num_gt." << label << '=' << r.num_gt << '\n';
    }
    return out.str();
}

void print_report_table(std::ostream& os, const EvalReport& report, const EvalReport* baseline)
{
    std::size_t width = 5;
    for (const auto& [label, r] : report.per_class) {
        width = std::max(width, label.size());
    }
    const auto old = os.flags();
    os << std::fixed << std::setprecision(2);
    os << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::setw(9) << "AP"
       << std::setw(8) << "GT";
    if (baseline != nullptr) {
        os << std::setw(9) << "delta";
    }
    os << '\n';
    auto row = [&](const std::string& name, double value, const std::string& gt, std::optional<double> base) {
        os << std::left << std::setw(static_cast<int>(width)) << name << std::right << std::setw(9) << value * 100.0
           << std::setw(8) << gt;
        if (baseline != nullptr) {
            if (base) {
                os << std::setw(9) << std::showpos << (value - *base) * 100.0 << std::noshowpos;
            } else {
                os << std::setw(9) << "n/a";
            }
        }
        os << '\n';
    };
    for (const auto& [label, r] : report.per_class) {
        std::optional<double> base;
        if (baseline != nullptr) {
            if (auto it = baseline->per_class.find(label); it != baseline->per_class.end()) {
                base = it->second.ap;
            }
        }
        row(label, r.ap, std::to_string(r.num_gt), base);
    }
    row("mAP", report.map, "", baseline != nullptr ? std::optional<double>(baseline->map) : std::nullopt);
    os << "(iou_threshold=" << std::setprecision(2) << report.iou_threshold << ", ap_mode=" << to_string(report.mode)
       << ")\n";
    if (report.dropped_detections > 0) {
        os << "warning: dropped " << report.dropped_detections << " detections with unknown image ids\n";
    }
    os.flags(old);
}

EvalReport run_evaluate(const EvaluateOptions& options)
{
    std::optional<EvalReport> baseline;
    if (options.baseline_report) {
        baseline = report_from_json(read_file(*options.baseline_report));
    }
    const DatasetManifest manifest = load_dataset(options.dataset, options.split);
    std::vector<DetectionRecord> dets;
    try {
        dets = parse_detections(read_file(options.detections));
    } catch (const ParseError& e) {
        throw ParseError(options.detections.string() + ": " + e.what());
    }
    EvalReport report = evaluate(dets, manifest, options.iou_threshold, options.mode);
    if (report.dropped_detections > 0) {
        spdlog::warn("dropped {} detections naming images outside split '{}'", report.dropped_detections,
                     options.split);
    }
    if (options.report_out) {
        fs::path txt = *options.report_out;
        txt.replace_extension(".txt");
        write_file(*options.report_out, report_to_json(report));
        write_file(txt, report_to_text(report));
    }
    return report;
}

LambdaStats run_lambda_stats(const LambdaStatsOptions& options)
{
    if (!(options.alpha > 0.0) || !std::isfinite(options.alpha)) {
        throw InvalidArgument("alpha must be a finite value > 0");
    }
    if (options.samples == 0) {
        throw InvalidArgument("sample count must be >= 1");
    }
    RandomStream rng(options.seed);
    LambdaStats stats;
    for (std::size_t i = 0; i < options.samples; ++i) {
        const double lambda = sample_lambda(options.alpha, rng);
        const double lambda_prime = apply_max(lambda);
        stats.lambda.add(lambda);
        stats.lambda_prime.add(lambda_prime);
        stats.lambda_hist.add(lambda);
        stats.lambda_prime_hist.add(lambda_prime);
    }
    return stats;
}

namespace {

void print_moments(std::ostream& os, std::string_view name, const Moments& m)
{
    os << name << ".count=" << m.count << '\n'
       << name << ".mean=" << m.mean << '\n'
       << name << ".variance=" << m.variance() << '\n'
       << name << ".min=" << m.min << '\n'
       << name << ".max=" << m.max << '\n';
}

void print_histogram(std::ostream& os, std::string_view name, const Histogram& h)
{
    const std::size_t peak = *std::max_element(h.bins.begin(), h.bins.end());
    const double step = (h.hi - h.lo) / static_cast<double>(h.bins.size());
    os << name << " histogram:\n";
    for (std::size_t i = 0; i < h.bins.size(); ++i) {
        const int bar = peak == 0 ? 0 : static_cast<int>(std::lround(50.0 * h.bins[i] / static_cast<double>(peak)));
        os << "  [" << std::fixed << std::setprecision(2) << h.lo + i * step << ", " << h.lo + (i + 1) * step << ") "
           << std::setw(8) << h.bins[i] << ' ' << std::string(bar, '#') << '\n';
    }
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
}

} // namespace

void print_lambda_stats(std::ostream& os, const LambdaStats& stats)
{
    const auto old = os.flags();
    const auto precision = os.precision(8);
    print_moments(os, "lambda", stats.lambda);
    print_moments(os, "lambda_prime", stats.lambda_prime);
    print_histogram(os, "lambda", stats.lambda_hist);
    print_histogram(os, "lambda_prime", stats.lambda_prime_hist);
    os.precision(precision);
    os.flags(old);
}

void print_augment_summary(std::ostream& os, const AugmentSummary& summary)
{
    const auto precision = os.precision(8);
    os << "images=" << summary.images << '\n'
       << "images_modified=" << summary.images_modified << '\n'
       << "batches=" << summary.batches << '\n'
       << "proposals_mixed=" << summary.proposals_mixed << '\n'
       << "jitter_calls=" << summary.jitter_calls << '\n';
    if (summary.proposals_mixed > 0) {
        print_moments(os, "lambda", summary.lambda);
        print_moments(os, "lambda_prime", summary.lambda_prime);
    }
    os.precision(precision);
}

} // namespace roimix
