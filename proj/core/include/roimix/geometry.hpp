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

#include <cstdint>
#include <iosfwd>
#include <string>

#include "roimix/random.hpp"

namespace roimix {

/// Axis-aligned rectangle in integer pixel coordinates.
///
/// The minimum edges are inclusive and the maximum edges exclusive, so a box
/// (x_min, y_min, x_max, y_max) covers (x_max - x_min) * (y_max - y_min)
/// pixels. VOC's 1-based inclusive convention is converted at the I/O layer.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
    std::int64_t area() const;

    /// Non-degenerate: at least one pixel of area, no negative coordinates.
    bool valid() const;

    /// valid() and fully inside an image of the given size.
    bool inside(int image_width, int image_height) const;

    bool contains(int x, int y) const { return x >= x_min && x < x_max && y >= y_min && y < y_max; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

std::ostream& operator<<(std::ostream& os, const BoundingBox& box);

/// A box with its class label and the VOC "difficult" flag.
struct LabeledBox {
    BoundingBox box;
    std::string label;
    bool difficult = false;

    friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

/// Throws InvalidArgument unless box.valid().
void require_valid(const BoundingBox& box);

/// Throws InvalidArgument unless box.inside(width, height).
void require_inside(const BoundingBox& box, int image_width, int image_height);

/// Intersection area; zero for disjoint boxes.
std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union in [0, 1]. Symmetric in its arguments.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Perturbation applied to ground-truth boxes to synthesize RoI-like proposals.
struct JitterParams {
    double center_shift = 0.15; ///< max |shift| as a fraction of box width/height
    double scale_lo = 0.8;
    double scale_hi = 1.25;

    void validate() const;
};

/// Pseudo-proposal around `gt`.
///
/// The center moves by up to center_shift * (width, height), each axis is
/// scaled independently by a factor in [scale_lo, scale_hi], and the result is
/// rounded to pixels and clipped to the image. If clipping leaves less than one
/// pixel the unmodified `gt` is returned. Always consumes exactly four draws.
BoundingBox jitter_box(const BoundingBox& gt, int image_width, int image_height,
                       const JitterParams& jitter, RandomStream& rng);

} // namespace roimix
