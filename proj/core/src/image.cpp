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

#include "roimix/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roimix/error.hpp"

namespace roimix {
namespace {

float clamp01(double v)
{
    // NaN maps to 0 so the [0, 1] invariant holds unconditionally.
    if (!(v > 0.0)) {
        return 0.0f;
    }
    if (v >= 1.0) {
        return 1.0f;
    }
    return static_cast<float>(v);
}

void check_shape(int width, int height, int channels)
{
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be >= 1");
    }
    if (channels != 1 && channels != 3) {
        throw InvalidArgument("images must have 1 or 3 channels");
    }
}

} // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels)
{
    check_shape(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * height * channels, clamp01(fill));
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    check_shape(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw InvalidArgument("image data length does not match width * height * channels");
    }
    for (float& v : data_) {
        v = clamp01(v);
    }
}

void ImageBuffer::set(int x, int y, int c, float v)
{
    data_[index(x, y, c)] = clamp01(v);
}

ImageBuffer resize_bilinear(const ImageBuffer& src, int new_width, int new_height)
{
    if (new_width < 1 || new_height < 1) {
        throw InvalidArgument("resize target dimensions must be >= 1");
    }
    if (src.empty()) {
        throw InvalidArgument("cannot resize an empty image");
    }
    if (new_width == src.width() && new_height == src.height()) {
        return src;
    }

    const int channels = src.channels();
    const double sx = static_cast<double>(src.width()) / new_width;
    const double sy = static_cast<double>(src.height()) / new_height;

    // Per-column source taps, shared by every row.
    std::vector<int> x0(new_width), x1(new_width);
    std::vector<double> fx(new_width);
    for (int x = 0; x < new_width; ++x) {
        const double pos = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width() - 1));
        x0[x] = static_cast<int>(std::floor(pos));
        x1[x] = std::min(x0[x] + 1, src.width() - 1);
        fx[x] = pos - x0[x];
    }

    ImageBuffer out(new_width, new_height, channels);
    auto dst = out.mutable_data();
    std::size_t i = 0;
    for (int y = 0; y < new_height; ++y) {
        const double pos = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height() - 1));
        const int y0 = static_cast<int>(std::floor(pos));
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double fy = pos - y0;
        for (int x = 0; x < new_width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const double top = (1.0 - fx[x]) * src.at(x0[x], y0, c) + fx[x] * src.at(x1[x], y0, c);
                const double bottom = (1.0 - fx[x]) * src.at(x0[x], y1, c) + fx[x] * src.at(x1[x], y1, c);
                dst[i++] = clamp01((1.0 - fy) * top + fy * bottom);
            }
        }
    }
    return out;
}

ImageBuffer crop(const ImageBuffer& src, const BoundingBox& box)
{
    require_inside(box, src.width(), src.height());
    const int channels = src.channels();
    ImageBuffer out(box.width(), box.height(), channels);
    auto dst = out.mutable_data();
    const auto in = src.data();
    const std::size_t row = static_cast<std::size_t>(box.width()) * channels;
    for (int y = 0; y < box.height(); ++y) {
        const std::size_t from = (static_cast<std::size_t>(box.y_min + y) * src.width() + box.x_min) * channels;
        std::copy_n(in.begin() + from, row, dst.begin() + y * row);
    }
    return out;
}

void paste_into(ImageBuffer& dst, const BoundingBox& box, const ImageBuffer& patch)
{
    require_inside(box, dst.width(), dst.height());
    if (patch.width() != box.width() || patch.height() != box.height()) {
        std::ostringstream msg;
        msg << "patch is " << patch.width() << "x" << patch.height() << " but box " << box << " is "
            << box.width() << "x" << box.height();
        throw InvalidArgument(msg.str());
    }
    if (patch.channels() != dst.channels()) {
        throw InvalidArgument("patch and destination channel counts differ");
    }
    const int channels = dst.channels();
    auto out = dst.mutable_data();
    const auto in = patch.data();
    const std::size_t row = static_cast<std::size_t>(box.width()) * channels;
    for (int y = 0; y < box.height(); ++y) {
        const std::size_t to = (static_cast<std::size_t>(box.y_min + y) * dst.width() + box.x_min) * channels;
        std::copy_n(in.begin() + y * row, row, out.begin() + to);
    }
}

ImageBuffer paste(ImageBuffer dst, const BoundingBox& box, const ImageBuffer& patch)
{
    paste_into(dst, box, patch);
    return dst;
}

ImageBuffer flip_horizontal(const ImageBuffer& src)
{
    ImageBuffer out = src;
    auto dst = out.mutable_data();
    const int w = src.width();
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < src.channels(); ++c) {
                dst[(static_cast<std::size_t>(y) * w + x) * src.channels() + c] = src.at(w - 1 - x, y, c);
            }
        }
    }
    return out;
}

ImageBuffer blend(const ImageBuffer& a, const ImageBuffer& b, double weight)
{
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
        throw InvalidArgument("blend requires buffers of identical shape");
    }
    ImageBuffer out = a;
    auto dst = out.mutable_data();
    const auto rhs = b.data();
    const double other = 1.0 - weight;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = clamp01(weight * dst[i] + other * rhs[i]);
    }
    return out;
}

void NoiseSpec::validate() const
{
    switch (kind) {
    case NoiseKind::gaussian:
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InvalidArgument("gaussian noise sigma must be > 0");
        }
        break;
    case NoiseKind::poisson:
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw InvalidArgument("poisson noise scale must be > 0");
        }
        break;
    case NoiseKind::salt:
    case NoiseKind::pepper:
    case NoiseKind::salt_and_pepper:
        if (!(probability > 0.0 && probability <= 1.0)) {
            throw InvalidArgument("impulse noise probability must be in (0, 1]");
        }
        break;
    }
}

std::string_view to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::poisson: return "poisson";
    case NoiseKind::salt: return "salt";
    case NoiseKind::pepper: return "pepper";
    case NoiseKind::salt_and_pepper: return "salt-pepper";
    }
    return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name)
{
    for (NoiseKind k : {NoiseKind::gaussian, NoiseKind::poisson, NoiseKind::salt, NoiseKind::pepper,
                        NoiseKind::salt_and_pepper}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    if (name == "salt_and_pepper") {
        return NoiseKind::salt_and_pepper;
    }
    throw InvalidArgument("unknown noise kind: " + std::string(name));
}

ImageBuffer add_noise(const ImageBuffer& src, const NoiseSpec& spec, RandomStream& rng)
{
    spec.validate();
    ImageBuffer out = src;
    auto px = out.mutable_data();
    const auto channels = static_cast<std::size_t>(src.channels());

    switch (spec.kind) {
    case NoiseKind::gaussian:
        for (float& v : px) {
            v = clamp01(v + spec.sigma * rng.normal());
        }
        break;
    case NoiseKind::poisson:
        for (float& v : px) {
            v = clamp01(static_cast<double>(rng.poisson(v * spec.scale)) / spec.scale);
        }
        break;
    case NoiseKind::salt:
    case NoiseKind::pepper:
    case NoiseKind::salt_and_pepper:
        for (std::size_t i = 0; i < px.size(); i += channels) {
            const double u = rng.uniform();
            float value = -1.0f;
            if (spec.kind == NoiseKind::salt) {
                value = u < spec.probability ? 1.0f : -1.0f;
            } else if (spec.kind == NoiseKind::pepper) {
                value = u < spec.probability ? 0.0f : -1.0f;
            } else if (u < 0.5 * spec.probability) {
                value = 1.0f;
            } else if (u < spec.probability) {
                value = 0.0f;
            }
            if (value >= 0.0f) {
                std::fill_n(px.begin() + i, channels, value);
            }
        }
        break;
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("blur sigma must be > 0");
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
        k[i + radius] = w;
        sum += w;
    }
    for (double& w : k) {
        w /= sum;
    }
    return k;
}

namespace {

// One 1-D pass. Taps at equal distance are summed pairwise before weighting so
// the result does not depend on the direction of traversal.
void convolve_line(const double* in, std::size_t stride, int length, const std::vector<double>& kernel,
                   double* out, std::size_t out_stride)
{
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int i = 0; i < length; ++i) {
        double acc = kernel[radius] * in[i * stride];
        for (int r = 1; r <= radius; ++r) {
            const int lo = std::max(i - r, 0);
            const int hi = std::min(i + r, length - 1);
            acc += kernel[radius + r] * (in[lo * stride] + in[hi * stride]);
        }
        out[i * out_stride] = acc;
    }
}

} // namespace

ImageBuffer gaussian_blur(const ImageBuffer& src, double sigma)
{
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int w = src.width();
    const int h = src.height();
    const int channels = src.channels();
    const std::size_t row_stride = static_cast<std::size_t>(w) * channels;

    std::vector<double> plane(src.data().begin(), src.data().end());
    std::vector<double> tmp(plane.size());

    for (int y = 0; y < h; ++y) {
        for (int c = 0; c < channels; ++c) {
            const std::size_t base = y * row_stride + c;
            convolve_line(plane.data() + base, channels, w, kernel, tmp.data() + base, channels);
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int c = 0; c < channels; ++c) {
            const std::size_t base = static_cast<std::size_t>(x) * channels + c;
            convolve_line(tmp.data() + base, row_stride, h, kernel, plane.data() + base, row_stride);
        }
    }

    ImageBuffer out(w, h, channels);
    auto dst = out.mutable_data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = clamp01(plane[i]);
    }
    return out;
}

} // namespace roimix
