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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roimix/geometry.hpp"
#include "roimix/random.hpp"

namespace roimix {

/// Row-major H x W x C raster of intensities in [0, 1].
///
/// Channels are interleaved: the sample for (x, y, c) lives at
/// ((y * width) + x) * channels + c. Only 1- and 3-channel images are
/// supported.
class ImageBuffer {
public:
    ImageBuffer() = default;

    /// Filled with `fill`, which is clamped into [0, 1].
    ImageBuffer(int width, int height, int channels, float fill = 0.0f);

    /// Takes ownership of `data`; every value is clamped into [0, 1].
    ImageBuffer(int width, int height, int channels, std::vector<float> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    /// Stores `v` clamped into [0, 1].
    void set(int x, int y, int c, float v);

    std::span<const float> data() const { return data_; }

    /// Raw write access for kernels. Callers must leave every value in [0, 1].
    std::span<float> mutable_data() { return data_; }

    BoundingBox bounds() const { return {0, 0, width_, height_}; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Bilinear resampling with half-pixel-center alignment: output pixel x samples
/// source coordinate (x + 0.5) * src_w / new_w - 0.5, clamped to the edge.
/// Same-size requests return an identical copy.
ImageBuffer resize_bilinear(const ImageBuffer& src, int new_width, int new_height);

/// Copy of the region covered by `box`; the box must lie inside `src`.
ImageBuffer crop(const ImageBuffer& src, const BoundingBox& box);

/// Overwrites the region `box` of `dst` with `patch` in place.
void paste_into(ImageBuffer& dst, const BoundingBox& box, const ImageBuffer& patch);

/// Value-returning form of paste_into.
ImageBuffer paste(ImageBuffer dst, const BoundingBox& box, const ImageBuffer& patch);

ImageBuffer flip_horizontal(const ImageBuffer& src);

/// Elementwise weight * a + (1 - weight) * b for same-shaped buffers,
/// evaluated in double precision and rounded once to float.
ImageBuffer blend(const ImageBuffer& a, const ImageBuffer& b, double weight);

enum class NoiseKind { gaussian, poisson, salt, pepper, salt_and_pepper };

/// One noise model plus its parameter. Only the field relevant to `kind` is
/// read: sigma for gaussian, scale for poisson, probability for the impulse
/// kinds.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 0.05;
    double scale = 255.0;
    double probability = 0.05;

    void validate() const;
};

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Applies the noise model:
///  - gaussian: adds N(0, sigma^2) independently per sample, then clamps;
///  - poisson: v -> Poisson(v * scale) / scale per sample, then clamps;
///  - salt / pepper: each pixel (all channels) becomes 1 / 0 with the given
///    probability;
///  - salt_and_pepper: 1 with probability p/2, 0 with probability p/2.
ImageBuffer add_noise(const ImageBuffer& src, const NoiseSpec& spec, RandomStream& rng);

/// Normalized discrete Gaussian of radius ceil(3 * sigma); index r is the
/// center tap.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-edge borders.
ImageBuffer gaussian_blur(const ImageBuffer& src, double sigma);

} // namespace roimix
