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

#include "roimix/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "roimix/error.hpp"

namespace roimix {

std::string_view to_string(ApMode mode)
{
    return mode == ApMode::eleven_point ? "eleven_point" : "all_point";
}

ApMode parse_ap_mode(std::string_view name)
{
    if (name == "eleven_point" || name == "11point" || name == "voc07") {
        return ApMode::eleven_point;
    }
    if (name == "all_point" || name == "area" || name == "voc12") {
        return ApMode::all_point;
    }
    throw InvalidArgument("unknown AP mode: " + std::string(name));
}

namespace {

std::string key_of(std::string_view image_id, std::string_view label)
{
    std::string key;
    key.reserve(image_id.size() + label.size() + 1);
    key.append(image_id).push_back('\0');
    key.append(label);
    return key;
}

// Indices of `dets` by descending score; ties keep input order.
std::vector<std::size_t> score_order(std::span<const DetectionRecord> dets)
{
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
    return order;
}

} // namespace

std::vector<MatchFlag> match_detections(std::span<const DetectionRecord> dets,
                                        std::span<const GroundTruthRecord> gts, double iou_threshold)
{
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
        throw InvalidArgument("IoU threshold must lie in (0, 1)");
    }
    std::unordered_map<std::string, std::vector<std::size_t>> by_key;
    for (std::size_t g = 0; g < gts.size(); ++g) {
        by_key[key_of(gts[g].image_id, gts[g].label)].push_back(g);
    }

    std::vector<MatchFlag> flags(dets.size(), MatchFlag::false_positive);
    std::vector<bool> claimed(gts.size(), false);
    for (std::size_t d : score_order(dets)) {
        const auto it = by_key.find(key_of(dets[d].image_id, dets[d].label));
        if (it == by_key.end()) {
            continue;
        }
        double best = -1.0;
        std::size_t best_gt = 0;
        for (std::size_t g : it->second) {
            const double overlap = iou(dets[d].box, gts[g].box);
            if (overlap > best) {
                best = overlap;
                best_gt = g;
            }
        }
        if (best < iou_threshold) {
            continue;
        }
        if (gts[best_gt].difficult) {
            flags[d] = MatchFlag::ignored;
        } else if (!claimed[best_gt]) {
            claimed[best_gt] = true;
            flags[d] = MatchFlag::true_positive;
        }
    }
    return flags;
}

double average_precision(std::span<const MatchFlag> flags, std::size_t num_gt, ApMode mode)
{
    if (num_gt == 0) {
        return 0.0;
    }
    std::vector<double> recall;
    std::vector<double> precision;
    std::size_t tp = 0;
    std::size_t seen = 0;
    for (MatchFlag f : flags) {
        if (f == MatchFlag::ignored) {
            continue;
        }
        ++seen;
        if (f == MatchFlag::true_positive) {
            ++tp;
        }
        recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
        precision.push_back(static_cast<double>(tp) / static_cast<double>(seen));
    }

    if (mode == ApMode::eleven_point) {
        double ap = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double t = i / 10.0;
            double p = 0.0;
            for (std::size_t j = 0; j < recall.size(); ++j) {
                if (recall[j] >= t) {
                    p = std::max(p, precision[j]);
                }
            }
            ap += p;
        }
        return ap / 11.0;
    }

    std::vector<double> mrec{0.0};
    std::vector<double> mpre{0.0};
    mrec.insert(mrec.end(), recall.begin(), recall.end());
    mpre.insert(mpre.end(), precision.begin(), precision.end());
    mrec.push_back(1.0);
    mpre.push_back(0.0);
    for (std::size_t i = mpre.size() - 1; i > 0; --i) {
        mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
    }
    double ap = 0.0;
    for (std::size_t i = 1; i < mrec.size(); ++i) {
        if (mrec[i] != mrec[i - 1]) {
            ap += (mrec[i] - mrec[i - 1]) * mpre[i];
        }
    }
    return ap;
}

EvalReport evaluate(std::span<const DetectionRecord> dets, std::span<const GroundTruthRecord> gts,
                    std::span<const std::string> known_images, double iou_threshold, ApMode mode)
{
    EvalReport report;
    report.iou_threshold = iou_threshold;
    report.mode = mode;

    const std::unordered_set<std::string> images(known_images.begin(), known_images.end());
    std::set<std::string> classes;
    for (const auto& g : gts) {
        if (!g.difficult) {
            classes.insert(g.label);
        }
    }

    std::map<std::string, std::vector<DetectionRecord>> dets_by_class;
    for (const auto& d : dets) {
        if (!images.contains(d.image_id)) {
            ++report.dropped_detections;
            continue;
        }
        if (classes.contains(d.label)) {
            dets_by_class[d.label].push_back(d);
        }
    }

    double sum = 0.0;
    for (const auto& label : classes) {
        std::vector<GroundTruthRecord> class_gts;
        ClassResult result;
        for (const auto& g : gts) {
            if (g.label == label) {
                class_gts.push_back(g);
                if (!g.difficult) {
                    ++result.num_gt;
                }
            }
        }
        const auto& class_dets = dets_by_class[label];
        result.num_detections = class_dets.size();

        const std::vector<MatchFlag> flags = match_detections(class_dets, class_gts, iou_threshold);
        std::vector<MatchFlag> ordered;
        ordered.reserve(flags.size());
        for (std::size_t d : score_order(class_dets)) {
            ordered.push_back(flags[d]);
        }
        result.ap = average_precision(ordered, result.num_gt, mode);
        sum += result.ap;
        report.per_class.emplace(label, result);
    }
    report.map = classes.empty() ? 0.0 : sum / static_cast<double>(classes.size());
    return report;
}

EvalReport evaluate(std::span<const DetectionRecord> dets, const DatasetManifest& manifest, double iou_threshold,
                    ApMode mode)
{
    std::vector<GroundTruthRecord> gts;
    std::vector<std::string> ids;
    for (const auto& entry : manifest.entries) {
        ids.push_back(entry.stem);
        for (auto& obj : load_annotation(entry.annotation).objects) {
            gts.push_back({entry.stem, std::move(obj.label), obj.box, obj.difficult});
        }
    }
    return evaluate(dets, gts, ids, iou_threshold, mode);
}

std::vector<DetectionRecord> parse_detections(std::string_view text)
{
    std::vector<DetectionRecord> out;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        DetectionRecord d;
        double coords[4];
        std::string extra;
        if (!(fields >> d.image_id >> d.label >> d.score >> coords[0] >> coords[1] >> coords[2] >> coords[3]) ||
            (fields >> extra)) {
            throw ParseError("detections line " + std::to_string(line_no) +
                             ": expected 'image_id label score x_min y_min x_max y_max'");
        }
        if (!std::isfinite(d.score)) {
            throw ParseError("detections line " + std::to_string(line_no) + ": score is not finite");
        }
        int rounded[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::isfinite(coords[i]) || std::abs(coords[i]) > 1e9) {
                throw ParseError("detections line " + std::to_string(line_no) + ": bad coordinate");
            }
            rounded[i] = static_cast<int>(std::lround(coords[i]));
        }
        d.box = {rounded[0], rounded[1], rounded[2], rounded[3]};
        if (!d.box.valid()) {
            throw ParseError("detections line " + std::to_string(line_no) + ": box is empty or negative");
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string format_detections(std::span<const DetectionRecord> dets)
{
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& d : dets) {
        out << d.image_id << ' ' << d.label << ' ' << d.score << ' ' << d.box.x_min << ' ' << d.box.y_min << ' '
            << d.box.x_max << ' ' << d.box.y_max << '\n';
    }
    return out.str();
}

} // namespace roimix
