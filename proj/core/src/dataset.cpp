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

#include "roimix/dataset.hpp"

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <jpeglib.h>
#include <png.h>

#include "roimix/error.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace roimix {

BoundingBox from_voc_box(int xmin, int ymin, int xmax, int ymax)
{
    return {xmin - 1, ymin - 1, xmax, ymax};
}

VocBox to_voc_box(const BoundingBox& box)
{
    return {box.x_min + 1, box.y_min + 1, box.x_max, box.y_max};
}

namespace {

const pt::ptree& required_child(const pt::ptree& node, const char* path, const char* where)
{
    auto child = node.get_child_optional(path);
    if (!child) {
        throw ParseError(std::string("VOC annotation: missing <") + path + "> in <" + where + ">");
    }
    return *child;
}

int required_int(const pt::ptree& node, const char* path, const char* where)
{
    const std::string text = required_child(node, path, where).data();
    // Some exporters write fractional pixel coordinates; round to the nearest pixel.
    std::istringstream in(text);
    double value = 0.0;
    if (!(in >> value) || !std::isfinite(value) || std::abs(value) > 1e9) {
        throw ParseError(std::string("VOC annotation: <") + path + "> is not a number: '" + text + "'");
    }
    in >> std::ws;
    if (!in.eof()) {
        throw ParseError(std::string("VOC annotation: <") + path + "> has trailing text: '" + text + "'");
    }
    return static_cast<int>(std::lround(value));
}

} // namespace

VocAnnotation parse_voc_xml(std::string_view text)
{
    pt::ptree doc;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, doc, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed XML: ") + e.what());
    }

    const pt::ptree& root = required_child(doc, "annotation", "document");
    const pt::ptree& size = required_child(root, "size", "annotation");

    VocAnnotation ann;
    ann.filename = required_child(root, "filename", "annotation").data();
    if (ann.filename.empty()) {
        throw ParseError("VOC annotation: empty <filename>");
    }
    ann.width = required_int(size, "width", "size");
    ann.height = required_int(size, "height", "size");
    ann.depth = size.get_child_optional("depth") ? required_int(size, "depth", "size") : 3;
    if (ann.width < 1 || ann.height < 1) {
        throw ParseError("VOC annotation: image size must be at least 1x1");
    }

    for (const auto& [key, node] : root) {
        if (key != "object") {
            continue;
        }
        LabeledBox obj;
        obj.label = required_child(node, "name", "object").data();
        if (obj.label.empty()) {
            throw ParseError("VOC annotation: empty object <name>");
        }
        if (node.get_child_optional("difficult")) {
            obj.difficult = required_int(node, "difficult", "object") != 0;
        }
        const pt::ptree& bnd = required_child(node, "bndbox", "object");
        const int xmin = required_int(bnd, "xmin", "bndbox");
        const int ymin = required_int(bnd, "ymin", "bndbox");
        const int xmax = required_int(bnd, "xmax", "bndbox");
        const int ymax = required_int(bnd, "ymax", "bndbox");
        obj.box = from_voc_box(xmin, ymin, xmax, ymax);
        if (!obj.box.inside(ann.width, ann.height)) {
            std::ostringstream msg;
            msg << "VOC annotation: object '" << obj.label << "' bndbox (" << xmin << ',' << ymin << ',' << xmax
                << ',' << ymax << ") is empty or outside the " << ann.width << 'x' << ann.height << " image";
            throw ParseError(msg.str());
        }
        ann.objects.push_back(std::move(obj));
    }
    return ann;
}

std::string write_voc_xml(const VocAnnotation& ann)
{
    pt::ptree root;
    root.put("filename", ann.filename);
    root.put("size.width", ann.width);
    root.put("size.height", ann.height);
    root.put("size.depth", ann.depth);
    for (const auto& obj : ann.objects) {
        const VocBox v = to_voc_box(obj.box);
        pt::ptree node;
        node.put("name", obj.label);
        node.put("difficult", obj.difficult ? 1 : 0);
        node.put("bndbox.xmin", v.xmin);
        node.put("bndbox.ymin", v.ymin);
        node.put("bndbox.xmax", v.xmax);
        node.put("bndbox.ymax", v.ymax);
        root.add_child("object", node);
    }
    pt::ptree doc;
    doc.add_child("annotation", root);

    std::ostringstream out;
    pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 4));
    return out.str();
}

VocAnnotation load_annotation(const fs::path& path)
{
    try {
        return parse_voc_xml(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

DatasetManifest load_dataset(const fs::path& root, std::string_view split)
{
    if (!fs::is_directory(root)) {
        throw IoError("dataset root is not a directory: " + root.string());
    }
    for (const char* sub : {"JPEGImages", "Annotations"}) {
        if (!fs::is_directory(root / sub)) {
            throw IoError("dataset is missing " + (root / sub).string());
        }
    }
    const fs::path list = root / "ImageSets" / "Main" / (std::string(split) + ".txt");
    if (!fs::is_regular_file(list)) {
        throw IoError("split list not found: " + list.string());
    }

    DatasetManifest manifest{root, std::string(split), {}};
    std::istringstream lines(read_file(list));
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string stem;
        if (!(fields >> stem)) {
            continue;
        }
        ManifestEntry entry{stem, {}, root / "Annotations" / (stem + ".xml")};
        for (const char* ext : {".jpg", ".jpeg", ".png", ".JPG", ".PNG"}) {
            const fs::path candidate = root / "JPEGImages" / (stem + ext);
            if (fs::is_regular_file(candidate)) {
                entry.image = candidate;
                break;
            }
        }
        if (entry.image.empty()) {
            throw IoError("no image found for stem '" + stem + "' in " + (root / "JPEGImages").string());
        }
        if (!fs::is_regular_file(entry.annotation)) {
            throw IoError("no annotation found for stem '" + stem + "': " + entry.annotation.string());
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return bytes;
}

void write_file(const fs::path& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

float from_u8(unsigned char v)
{
    return static_cast<float>(v) / 255.0f;
}

unsigned char to_u8(float v)
{
    const long q = std::lround(static_cast<double>(v) * 255.0);
    return static_cast<unsigned char>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

namespace {

ImageBuffer from_bytes(int width, int height, int channels, const std::vector<unsigned char>& bytes)
{
    std::vector<float> data(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        data[i] = from_u8(bytes[i]);
    }
    return ImageBuffer(width, height, channels, std::move(data));
}

ImageBuffer decode_png(const std::string& bytes, const fs::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw IoError("PNG decode failed for " + path.string() + ": " + image.message);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image), 0);
    // Alpha, if present, is composited onto black.
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("PNG decode failed for " + path.string() + ": " + image.message);
    }
    return from_bytes(static_cast<int>(image.width), static_cast<int>(image.height), channels, pixels);
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

extern "C" void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Only trivially destructible locals live in this frame, so longjmp out of
// libjpeg is safe. `pixels` is owned by the caller.
bool decode_jpeg_into(const std::string& bytes, std::vector<unsigned char>& pixels, int& width, int& height,
                      int& channels, JpegErrorManager& err)
{
    jpeg_decompress_struct cinfo{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
                 static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    pixels.resize(stride * height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

ImageBuffer decode_jpeg(const std::string& bytes, const fs::path& path)
{
    std::vector<unsigned char> pixels;
    int width = 0;
    int height = 0;
    int channels = 0;
    JpegErrorManager err{};
    if (!decode_jpeg_into(bytes, pixels, width, height, channels, err)) {
        throw IoError("JPEG decode failed for " + path.string() + ": " + err.message);
    }
    return from_bytes(width, height, channels, pixels);
}

} // namespace

ImageBuffer load_image(const fs::path& path)
{
    const std::string bytes = read_file(path);
    static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, reinterpret_cast<const unsigned char*>(bytes.data()))) {
        return decode_png(bytes, path);
    }
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff &&
        static_cast<unsigned char>(bytes[1]) == 0xd8 && static_cast<unsigned char>(bytes[2]) == 0xff) {
        return decode_jpeg(bytes, path);
    }
    throw IoError("unsupported image format: " + path.string());
}

void save_image(const ImageBuffer& image, const fs::path& path)
{
    if (image.empty()) {
        throw InvalidArgument("cannot save an empty image");
    }
    std::vector<unsigned char> pixels(image.size());
    const auto data = image.data();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = to_u8(data[i]);
    }
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(png, size, 0, pixels.data(), 0, nullptr)) {
        throw IoError("PNG encode failed for " + path.string() + ": " + png.message);
    }
    std::string encoded(size, '\0');
    if (!png_image_write_to_memory(&png, encoded.data(), &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError("PNG encode failed for " + path.string() + ": " + png.message);
    }
    encoded.resize(size);
    write_file(path, encoded);
}

} // namespace roimix
