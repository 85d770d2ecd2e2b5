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

// roimix: offline proposal-mixing augmentation, corruption corpora and VOC mAP.
//
//   roimix augment --dataset VOC --split trainval --out VOC_mixed --variant roimix
//   roimix corrupt --dataset VOC --split test --out VOC_pepper --kind pepper --p 0.05
//   roimix evaluate --dataset VOC --split test --detections dets.txt --out report.json
//   roimix lambda-stats --alpha 0.1 --samples 100000

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "roimix/dataset.hpp"
#include "roimix/error.hpp"
#include "roimix/pipeline.hpp"

namespace {

void configure_logging()
{
    auto logger = spdlog::stderr_color_mt("roimix");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ROIMIX_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off"; only accept it when asked for.
        if (level != spdlog::level::off || std::string(env) == "off") {
            spdlog::set_level(level);
        } else {
            spdlog::warn("ignoring unknown ROIMIX_LOG level '{}'", env);
        }
    }
}

} // namespace

int main(int argc, char** argv)
{
    configure_logging();

    CLI::App app{"RoIMix offline augmentation and evaluation toolkit"};
    app.require_subcommand(1);

    // augment
    roimix::AugmentOptions augment;
    std::string variant = "roimix";
    double alpha = 0.1;
    bool no_max = false;
    std::uint64_t augment_seed = 0;
    auto* aug = app.add_subcommand("augment", "Mix region crops across a VOC dataset and write an augmented copy");
    aug->add_option("--dataset", augment.dataset, "Input VOC root")->required()->check(CLI::ExistingDirectory);
    aug->add_option("--split", augment.split, "Image set name under ImageSets/Main")->capture_default_str();
    aug->add_option("--out", augment.out, "Output VOC root (must not exist or be empty)")->required();
    aug->add_option("--variant", variant,
                    "roimix | gtmix | single_gtmix | single_roimix | roimix_nomax | single_roimix_nomax")
        ->capture_default_str();
    aug->add_option("--alpha", alpha, "Beta(a, a) parameter for the mixing ratio")->capture_default_str();
    aug->add_flag("--no-max", no_max, "Use the raw Beta draw instead of max(l, 1 - l)");
    aug->add_option("--proposals-per-image", augment.mix.proposals_per_image, "Proposals drawn from each image")
        ->capture_default_str();
    aug->add_option("--batch-size", augment.batch_size, "Images per mixing batch")->capture_default_str();
    aug->add_option("--jitter-center", augment.mix.jitter.center_shift, "Max center shift, fraction of box size")
        ->capture_default_str();
    aug->add_option("--jitter-scale-lo", augment.mix.jitter.scale_lo, "Min per-axis scale")->capture_default_str();
    aug->add_option("--jitter-scale-hi", augment.mix.jitter.scale_hi, "Max per-axis scale")->capture_default_str();
    aug->add_option("--epochs", augment.epochs, "Independently seeded copies (out/epoch_NNN when > 1)")
        ->capture_default_str();
    aug->add_option("--seed", augment_seed, "RNG seed")->capture_default_str();
    aug->add_option("--workers", augment.workers, "Worker threads (output does not depend on this)")
        ->capture_default_str();

    // corrupt
    roimix::CorruptOptions corrupt;
    std::string kind;
    double sigma = 0.0;
    auto* cor = app.add_subcommand("corrupt", "Write a noisy or blurred copy of a VOC dataset");
    cor->add_option("--dataset", corrupt.dataset, "Input VOC root")->required()->check(CLI::ExistingDirectory);
    cor->add_option("--split", corrupt.split, "Image set name")->capture_default_str();
    cor->add_option("--out", corrupt.out, "Output VOC root")->required();
    cor->add_option("--kind", kind, "gaussian | poisson | salt | pepper | salt-pepper | blur")->required();
    auto* sigma_opt =
        cor->add_option("--sigma", sigma, "Gaussian noise stddev (default 0.05) or blur sigma in pixels (default 1)");
    cor->add_option("--p", corrupt.probability, "Impulse noise probability")->capture_default_str();
    cor->add_option("--scale", corrupt.scale, "Poisson events per unit intensity")->capture_default_str();
    cor->add_option("--seed", corrupt.seed, "RNG seed")->capture_default_str();
    cor->add_option("--workers", corrupt.workers, "Worker threads")->capture_default_str();

    // evaluate
    roimix::EvaluateOptions evaluate;
    std::string ap_mode = "eleven_point";
    std::string baseline;
    std::string report_out;
    auto* eva = app.add_subcommand(
        "evaluate", "VOC-protocol mAP of a detection file.\n"
                    "Detection lines: image_id label score x_min y_min x_max y_max\n"
                    "(0-based pixels, max edges exclusive; image_id is the split stem)");
    eva->add_option("--dataset", evaluate.dataset, "VOC root with ground truth")
        ->required()
        ->check(CLI::ExistingDirectory);
    eva->add_option("--split", evaluate.split, "Image set name")->capture_default_str();
    eva->add_option("--detections", evaluate.detections, "Detection file, one per line: image_id label score x_min y_min x_max y_max (0-based, max edges exclusive)")->required()->check(CLI::ExistingFile);
    eva->add_option("--iou-thresh", evaluate.iou_threshold, "IoU needed for a true positive")->capture_default_str();
    eva->add_option("--ap-mode", ap_mode, "eleven_point | all_point")->capture_default_str();
    eva->add_option("--baseline-report", baseline, "JSON report to compute deltas against")
        ->check(CLI::ExistingFile);
    eva->add_option("--out", report_out, "Write the JSON report here (and key=value text next to it)");

    // lambda-stats
    roimix::LambdaStatsOptions stats;
    auto* lam = app.add_subcommand("lambda-stats", "Moments and histograms of the sampled mixing ratios");
    lam->add_option("--alpha", stats.alpha, "Beta(a, a) parameter")->capture_default_str();
    lam->add_option("--samples", stats.samples, "Number of draws")->capture_default_str();
    lam->add_option("--seed", stats.seed, "RNG seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (aug->parsed()) {
            const std::size_t proposals = augment.mix.proposals_per_image;
            const roimix::JitterParams jitter = augment.mix.jitter;
            augment.mix = roimix::select_variant(variant);
            augment.mix.alpha = alpha;
            augment.mix.proposals_per_image = proposals;
            augment.mix.jitter = jitter;
            augment.mix.seed = augment_seed;
            if (no_max) {
                augment.mix.use_max = false;
            }
            const auto summary = roimix::run_augment(augment);
            std::cout << "variant=" << roimix::variant_name(augment.mix) << '\n';
            roimix::print_augment_summary(std::cout, summary);
        } else if (cor->parsed()) {
            corrupt.kind = roimix::parse_corruption_kind(kind);
            if (sigma_opt->count() > 0) {
                corrupt.sigma = sigma;
            }
            const auto summary = roimix::run_corrupt(corrupt);
            std::cout << "kind=" << roimix::to_string(corrupt.kind) << "\nimages=" << summary.images << '\n';
        } else if (eva->parsed()) {
            evaluate.mode = roimix::parse_ap_mode(ap_mode);
            if (!baseline.empty()) {
                evaluate.baseline_report = baseline;
            }
            if (!report_out.empty()) {
                evaluate.report_out = report_out;
            }
            const auto report = roimix::run_evaluate(evaluate);
            std::optional<roimix::EvalReport> base;
            if (evaluate.baseline_report) {
                base = roimix::report_from_json(roimix::read_file(*evaluate.baseline_report));
            }
            roimix::print_report_table(std::cout, report, base ? &*base : nullptr);
        } else if (lam->parsed()) {
            roimix::print_lambda_stats(std::cout, roimix::run_lambda_stats(stats));
        }
    } catch (const roimix::Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return 2;
    }
    return 0;
}
