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

#include "roimix/mixer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "roimix/error.hpp"

namespace roimix {

void MixConfig::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument("alpha must be a finite value > 0");
    }
    if (proposals_per_image == 0) {
        throw InvalidArgument("proposals_per_image must be >= 1");
    }
    jitter.validate();
}

namespace {

struct VariantRow {
    std::string_view name;
    MixScope scope;
    ProposalSource source;
    bool use_max;
};

constexpr std::array<VariantRow, 6> kVariants{{
    {"roimix", MixScope::multi_image, ProposalSource::pseudo_roi, true},
    {"gtmix", MixScope::multi_image, ProposalSource::ground_truth, true},
    {"single_gtmix", MixScope::single_image, ProposalSource::ground_truth, true},
    {"single_roimix", MixScope::single_image, ProposalSource::pseudo_roi, true},
    {"roimix_nomax", MixScope::multi_image, ProposalSource::pseudo_roi, false},
    {"single_roimix_nomax", MixScope::single_image, ProposalSource::pseudo_roi, false},
}};

constexpr std::array<std::string_view, 6> kVariantNames{
    kVariants[0].name, kVariants[1].name, kVariants[2].name,
    kVariants[3].name, kVariants[4].name, kVariants[5].name,
};

// log of a Gamma(shape, 1) variate. Marsaglia-Tsang for shape >= 1; for
// shape < 1 the boost Gamma(shape + 1) * U^(1 / shape) is kept in log space,
// which matters at shape = 0.01 where U^100 underflows a double.
double log_gamma_variate(double shape, RandomStream& rng)
{
    if (shape < 1.0) {
        const double boost = std::log(rng.uniform_open_low()) / shape;
        return log_gamma_variate(shape + 1.0, rng) + boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open_low();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) {
            return std::log(d * v);
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return std::log(d * v);
        }
    }
}

} // namespace

std::span<const std::string_view> variant_names()
{
    return kVariantNames;
}

MixConfig select_variant(std::string_view name)
{
    for (const auto& row : kVariants) {
        if (row.name == name) {
            MixConfig config;
            config.scope = row.scope;
            config.source = row.source;
            config.use_max = row.use_max;
            return config;
        }
    }
    std::ostringstream msg;
    msg << "unknown variant '" << name << "' (expected one of:";
    for (const auto& row : kVariants) {
        msg << ' ' << row.name;
    }
    msg << ')';
    throw InvalidArgument(msg.str());
}

std::string variant_name(const MixConfig& config)
{
    for (const auto& row : kVariants) {
        if (row.scope == config.scope && row.source == config.source && row.use_max == config.use_max) {
            return std::string(row.name);
        }
    }
    return "custom";
}

std::string_view to_string(MixScope scope)
{
    return scope == MixScope::single_image ? "single_image" : "multi_image";
}

std::string_view to_string(ProposalSource source)
{
    return source == ProposalSource::ground_truth ? "ground_truth" : "pseudo_roi";
}

double sample_lambda(double alpha, RandomStream& rng)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument("alpha must be a finite value > 0");
    }
    // Beta(a, a) = X / (X + Y) with X, Y ~ Gamma(a); 1 / (1 + exp(log Y - log X))
    // stays finite when both gammas underflow.
    const double log_x = log_gamma_variate(alpha, rng);
    const double log_y = log_gamma_variate(alpha, rng);
    const double lambda = 1.0 / (1.0 + std::exp(log_y - log_x));
    return std::clamp(lambda, kLambdaEpsilon, 1.0 - kLambdaEpsilon);
}

double apply_max(double lambda)
{
    return std::max(lambda, 1.0 - lambda);
}

ImageBuffer mix_regions(const ImageBuffer& x_i, const ImageBuffer& x_j, double lambda_prime)
{
    if (!(lambda_prime >= 0.0 && lambda_prime <= 1.0)) {
        throw InvalidArgument("mixing ratio must lie in [0, 1]");
    }
    if (x_i.channels() != x_j.channels()) {
        throw InvalidArgument("cannot mix regions with different channel counts");
    }
    return blend(x_i, resize_bilinear(x_j, x_i.width(), x_i.height()), lambda_prime);
}

std::size_t image_index_for(std::size_t k, std::size_t batch_images, std::size_t total_proposals)
{
    if (total_proposals == 0) {
        throw InvalidArgument("image_index_for: no proposals");
    }
    return k * batch_images / total_proposals;
}

std::vector<Proposal> build_proposals(std::span<const ImageBuffer> images,
                                      std::span<const std::vector<LabeledBox>> annotations,
                                      const MixConfig& config, RandomStream& rng, std::size_t* jitter_calls)
{
    if (images.size() != annotations.size()) {
        throw InvalidArgument("images and annotation lists differ in length");
    }
    std::vector<Proposal> proposals;
    proposals.reserve(images.size() * config.proposals_per_image);
    for (std::size_t b = 0; b < images.size(); ++b) {
        const auto& objects = annotations[b];
        const ImageBuffer& image = images[b];
        for (const auto& obj : objects) {
            require_inside(obj.box, image.width(), image.height());
        }
        if (objects.empty()) {
            continue;
        }
        for (std::size_t p = 0; p < config.proposals_per_image; ++p) {
            const LabeledBox& gt = objects[p % objects.size()];
            Proposal proposal{b, gt.box, gt.label};
            if (config.source == ProposalSource::pseudo_roi) {
                proposal.region = jitter_box(gt.box, image.width(), image.height(), config.jitter, rng);
                if (jitter_calls != nullptr) {
                    ++*jitter_calls;
                }
            }
            proposals.push_back(std::move(proposal));
        }
    }
    return proposals;
}

std::vector<std::size_t> draw_pairing(std::span<const Proposal> proposals, MixScope scope, RandomStream& rng)
{
    std::vector<std::size_t> partner(proposals.size());
    for (std::size_t i = 0; i < partner.size(); ++i) {
        partner[i] = i;
    }
    // Fisher-Yates over [first, last), written out so the sequence is fixed
    // across standard library implementations.
    auto shuffle = [&](std::size_t first, std::size_t last) {
        for (std::size_t i = last - first; i > 1; --i) {
            const std::size_t j = rng.uniform_index(i);
            std::swap(partner[first + i - 1], partner[first + j]);
        }
    };
    if (scope == MixScope::multi_image) {
        shuffle(0, partner.size());
        return partner;
    }
    std::size_t first = 0;
    while (first < proposals.size()) {
        std::size_t last = first;
        while (last < proposals.size() && proposals[last].image_index == proposals[first].image_index) {
            ++last;
        }
        shuffle(first, last);
        first = last;
    }
    return partner;
}

MixOutcome roimix_batch(std::span<const ImageBuffer> images, std::span<const std::vector<LabeledBox>> annotations,
                        const MixConfig& config, RandomStream& rng, const RatioSampler& sampler)
{
    if (images.empty()) {
        throw InvalidArgument("roimix_batch: empty batch");
    }
    config.validate();

    MixOutcome outcome;
    outcome.images.assign(images.begin(), images.end());
    outcome.proposals = build_proposals(images, annotations, config, rng, &outcome.jitter_calls);

    const auto& proposals = outcome.proposals;
    const std::vector<std::size_t> partner = draw_pairing(proposals, config.scope, rng);

    outcome.steps.reserve(proposals.size());
    for (std::size_t k = 0; k < proposals.size(); ++k) {
        const Proposal& target = proposals[k];
        const Proposal& source = proposals[partner[k]];

        MixStep step;
        step.k = k;
        step.partner = partner[k];
        step.image = target.image_index;
        step.lambda = sampler ? sampler(rng) : sample_lambda(config.alpha, rng);
        step.lambda_prime = config.use_max ? apply_max(step.lambda) : step.lambda;

        const ImageBuffer x_i = crop(images[target.image_index], target.region);
        const ImageBuffer x_j = crop(images[source.image_index], source.region);
        paste_into(outcome.images[step.image], target.region, mix_regions(x_i, x_j, step.lambda_prime));
        outcome.steps.push_back(step);
    }
    return outcome;
}

MixOutcome roimix_batch(std::span<const ImageBuffer> images, std::span<const std::vector<LabeledBox>> annotations,
                        const MixConfig& config)
{
    RandomStream rng(config.seed);
    return roimix_batch(images, annotations, config, rng);
}

} // namespace roimix
