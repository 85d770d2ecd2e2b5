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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roimix/geometry.hpp"
#include "roimix/image.hpp"
#include "roimix/random.hpp"

namespace roimix {

/// Whether mixing partners are drawn from the whole batch or only from the
/// proposal's own image.
enum class MixScope { single_image, multi_image };

/// Whether proposals are the ground-truth boxes themselves or jittered
/// pseudo-RoIs derived from them.
enum class ProposalSource { ground_truth, pseudo_roi };

struct MixConfig {
    double alpha = 0.1;
    MixScope scope = MixScope::multi_image;
    ProposalSource source = ProposalSource::pseudo_roi;
    bool use_max = true;
    std::size_t proposals_per_image = 128;
    std::uint64_t seed = 0;
    JitterParams jitter;

    void validate() const;
};

/// Names of the six ablation configurations accepted by select_variant.
std::span<const std::string_view> variant_names();

/// Template for a named ablation variant: roimix, gtmix, single_gtmix,
/// single_roimix, roimix_nomax, single_roimix_nomax. Only scope, source and
/// use_max differ from a default MixConfig.
MixConfig select_variant(std::string_view name);

/// Inverse of select_variant; "custom" for combinations without a name.
std::string variant_name(const MixConfig& config);

std::string_view to_string(MixScope scope);
std::string_view to_string(ProposalSource source);

/// A region in one image of the batch, carrying the label it was derived from.
struct Proposal {
    std::size_t image_index = 0;
    BoundingBox region;
    std::string label;

    friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Clamp applied to every Beta draw so mixes never degenerate to exactly 0 or 1.
inline constexpr double kLambdaEpsilon = 1e-6;

/// One draw from Beta(alpha, alpha), clamped to [kLambdaEpsilon, 1 - kLambdaEpsilon].
double sample_lambda(double alpha, RandomStream& rng);

/// max(lambda, 1 - lambda): the larger share always goes to the labeled region.
double apply_max(double lambda);

/// lambda_prime * x_i + (1 - lambda_prime) * x_j, after bilinearly resizing
/// x_j to x_i's size. The result takes x_i's shape (and, by convention, its
/// label).
ImageBuffer mix_regions(const ImageBuffer& x_i, const ImageBuffer& x_j, double lambda_prime);

/// Image owning the k-th of n image-major proposals in a batch of N images,
/// floor(k * N / n).
std::size_t image_index_for(std::size_t k, std::size_t batch_images, std::size_t total_proposals);

/// Proposal lists for each image, laid out image-major.
///
/// Images without annotations contribute nothing. Ground-truth boxes are
/// cycled (or truncated) to proposals_per_image; pseudo-RoIs jitter the cycled
/// boxes. `jitter_calls`, when given, is incremented once per jitter_box call.
std::vector<Proposal> build_proposals(std::span<const ImageBuffer> images,
                                      std::span<const std::vector<LabeledBox>> annotations,
                                      const MixConfig& config, RandomStream& rng,
                                      std::size_t* jitter_calls = nullptr);

/// Partner index for every proposal; a permutation of [0, proposals.size()).
/// With single_image scope each image's block is permuted independently.
std::vector<std::size_t> draw_pairing(std::span<const Proposal> proposals, MixScope scope,
                                      RandomStream& rng);

/// Record of one iteration of the batch loop.
struct MixStep {
    std::size_t k = 0;
    std::size_t partner = 0;
    std::size_t image = 0;
    double lambda = 0.0;
    double lambda_prime = 0.0;
};

struct MixOutcome {
    std::vector<ImageBuffer> images;
    std::vector<Proposal> proposals;
    std::vector<MixStep> steps;
    std::size_t jitter_calls = 0;
};

/// Source of mixing ratios; sample_lambda(alpha, .) unless overridden.
using RatioSampler = std::function<double(RandomStream&)>;

/// Mixes every proposal of the batch with its permutation partner and pastes
/// the result back over the proposal's own box.
///
/// Both crops are taken from the unmodified input images; pastes land on the
/// output copies in ascending k, so later boxes overwrite earlier ones where
/// they overlap. Annotations are not touched. RNG use is, in order: proposal
/// jitter, pairing permutation, one ratio per k.
MixOutcome roimix_batch(std::span<const ImageBuffer> images,
                        std::span<const std::vector<LabeledBox>> annotations, const MixConfig& config,
                        RandomStream& rng, const RatioSampler& sampler = {});

/// Convenience overload seeded from config.seed.
MixOutcome roimix_batch(std::span<const ImageBuffer> images,
                        std::span<const std::vector<LabeledBox>> annotations, const MixConfig& config);

} // namespace roimix
