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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "roimix/geometry.hpp"
#include "roimix/image.hpp"

namespace roimix {

/// Modeled subset of a Pascal VOC annotation. Boxes use the internal 0-based,
/// max-exclusive convention.
struct VocAnnotation {
    std::string filename;
    int width = 0;
    int height = 0;
    int depth = 3;
    std::vector<LabeledBox> objects;

    friend bool operator==(const VocAnnotation&, const VocAnnotation&) = default;
};

/// VOC bndbox (1-based, inclusive) -> internal box.
BoundingBox from_voc_box(int xmin, int ymin, int xmax, int ymax);

struct VocBox {
    int xmin, ymin, xmax, ymax;
};

/// Internal box -> VOC bndbox.
VocBox to_voc_box(const BoundingBox& box);

/// Throws ParseError for malformed XML, missing elements, or boxes that do not
/// fit the declared image size.
VocAnnotation parse_voc_xml(std::string_view text);

std::string write_voc_xml(const VocAnnotation& ann);

struct ManifestEntry {
    std::string stem;
    std::filesystem::path image;
    std::filesystem::path annotation;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::string split;
    std::vector<ManifestEntry> entries;
};

/// Reads ImageSets/Main/<split>.txt under `root` and pairs every stem with
/// JPEGImages/<stem>.{jpg,jpeg,png} and Annotations/<stem>.xml, in list order.
DatasetManifest load_dataset(const std::filesystem::path& root, std::string_view split);

VocAnnotation load_annotation(const std::filesystem::path& path);

/// PNG (1/3/4 channel, 8 or 16 bit) or JPEG, chosen by file signature.
/// Alpha is dropped; 16-bit samples are reduced to 8 bits.
ImageBuffer load_image(const std::filesystem::path& path);

/// 8-bit PNG; intensities are stored as round(v * 255).
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

/// 8-bit conversions shared by the codecs.
float from_u8(unsigned char v);
unsigned char to_u8(float v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

} // namespace roimix
