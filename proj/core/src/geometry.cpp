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

#include "roimix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "roimix/error.hpp"

namespace roimix {

std::int64_t BoundingBox::area() const
{
    if (x_max <= x_min || y_max <= y_min) {
        return 0;
    }
    return static_cast<std::int64_t>(width()) * height();
}

bool BoundingBox::valid() const
{
    return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max;
}

bool BoundingBox::inside(int image_width, int image_height) const
{
    return valid() && x_max <= image_width && y_max <= image_height;
}

std::ostream& operator<<(std::ostream& os, const BoundingBox& box)
{
    return os << '(' << box.x_min << ',' << box.y_min << ',' << box.x_max << ',' << box.y_max << ')';
}

void require_valid(const BoundingBox& box)
{
    if (!box.valid()) {
        std::ostringstream msg;
        msg << "invalid bounding box " << box;
        throw InvalidArgument(msg.str());
    }
}

void require_inside(const BoundingBox& box, int image_width, int image_height)
{
    if (!box.inside(image_width, image_height)) {
        std::ostringstream msg;
        msg << "bounding box " << box << " is not inside a " << image_width << "x" << image_height << " image";
        throw InvalidArgument(msg.str());
    }
}

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b)
{
    const int w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const int h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (w <= 0 || h <= 0) {
        return 0;
    }
    return static_cast<std::int64_t>(w) * h;
}

double iou(const BoundingBox& a, const BoundingBox& b)
{
    const std::int64_t inter = intersection_area(a, b);
    const std::int64_t uni = a.area() + b.area() - inter;
    if (uni <= 0) {
        return 0.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

void JitterParams::validate() const
{
    if (!(center_shift >= 0.0) || !std::isfinite(center_shift)) {
        throw InvalidArgument("jitter center shift must be a finite value >= 0");
    }
    if (!(scale_lo > 0.0) || !(scale_hi >= scale_lo) || !std::isfinite(scale_hi)) {
        throw InvalidArgument("jitter scale range must satisfy 0 < lo <= hi");
    }
}

BoundingBox jitter_box(const BoundingBox& gt, int image_width, int image_height,
                       const JitterParams& jitter, RandomStream& rng)
{
    require_inside(gt, image_width, image_height);
    jitter.validate();

    const double w = gt.width();
    const double h = gt.height();
    const double dx = rng.uniform(-1.0, 1.0) * jitter.center_shift * w;
    const double dy = rng.uniform(-1.0, 1.0) * jitter.center_shift * h;
    const double sx = rng.uniform(jitter.scale_lo, jitter.scale_hi);
    const double sy = rng.uniform(jitter.scale_lo, jitter.scale_hi);

    const double cx = 0.5 * (gt.x_min + gt.x_max) + dx;
    const double cy = 0.5 * (gt.y_min + gt.y_max) + dy;
    const double half_w = 0.5 * w * sx;
    const double half_h = 0.5 * h * sy;

    BoundingBox out{
        static_cast<int>(std::lround(cx - half_w)),
        static_cast<int>(std::lround(cy - half_h)),
        static_cast<int>(std::lround(cx + half_w)),
        static_cast<int>(std::lround(cy + half_h)),
    };
    out.x_min = std::clamp(out.x_min, 0, image_width);
    out.y_min = std::clamp(out.y_min, 0, image_height);
    out.x_max = std::clamp(out.x_max, 0, image_width);
    out.y_max = std::clamp(out.y_max, 0, image_height);

    if (!out.valid()) {
        return gt;
    }
    return out;
}

} // namespace roimix
