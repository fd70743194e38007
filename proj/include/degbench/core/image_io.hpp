#pragma once

// PNG and JPEG file boundary. Samples are quantized to 8 (or 16) bits only
// here; everything inside the library stays floating point.

#include <jpeglib.h>
#include <jerror.h>
#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"

namespace degbench {

enum class ImageFormat { png, jpeg };

struct SaveOptions {
  int jpeg_quality = 95;   // 1..100
  int png_bit_depth = 8;   // 8 or 16
  int png_compression = 3; // zlib level 0..9
};

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(!in.bad(), ErrorKind::io, "read failed for '" + path.string() + "'");
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  require(static_cast<bool>(out), ErrorKind::io, "write failed for '" + path.string() + "'");
}

inline std::uint8_t quantize8(float v) noexcept {
  return static_cast<std::uint8_t>(std::lround(ImageBuffer::sanitize(v) * 255.0f));
}

inline std::uint16_t quantize16(float v) noexcept {
  return static_cast<std::uint16_t>(std::lround(static_cast<double>(ImageBuffer::sanitize(v)) * 65535.0));
}

namespace detail {

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
  char message[256] = {0};
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + count > st->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, st->bytes.data() + st->offset, count);
  st->offset += count;
}

inline void png_error_to_jmp(png_structp png, png_const_charp msg) {
  auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
  if (st) std::snprintf(st->message, sizeof(st->message), "%s", msg);
  png_longjmp(png, 1);
}

inline void png_silent_warning(png_structp, png_const_charp) {}

struct PngRaw {
  int width = 0, height = 0, channels = 0, bit_depth = 8;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
};

// Returns false with st.message set on any libpng error. No object with a
// non-trivial destructor is created between setjmp and the libpng calls.
inline bool decode_png_raw(PngReadState& st, PngRaw& raw) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, png_error_to_jmp, png_silent_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st, png_read_from_memory);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  int channels = png_get_channels(png, info);
  if (channels == 2) {  // gray+alpha widens to RGBA
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    channels = png_get_channels(png, info);
  }
  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.bit_depth = png_get_bit_depth(png, info);
  raw.channels = channels;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  raw.pixels.resize(rowbytes * static_cast<std::size_t>(raw.height));
  raw.rows.resize(static_cast<std::size_t>(raw.height));
  for (int y = 0; y < raw.height; ++y) raw.rows[static_cast<std::size_t>(y)] = raw.pixels.data() + rowbytes * y;
  png_read_image(png, raw.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

inline ImageBuffer decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  PngReadState st{bytes};
  PngRaw raw;
  if (!decode_png_raw(st, raw))
    fail(ErrorKind::io, "cannot decode PNG '" + name + "': " + std::string(st.message));
  require(raw.channels == 1 || raw.channels == 3 || raw.channels == 4, ErrorKind::format,
          "unsupported PNG channel layout in '" + name + "'");
  require(raw.bit_depth == 8 || raw.bit_depth == 16, ErrorKind::format,
          "unsupported PNG bit depth in '" + name + "'");
  ImageBuffer img(raw.width, raw.height, raw.channels);
  auto d = img.data();
  if (raw.bit_depth == 8) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<float>(raw.pixels[i]) / 255.0f;
  } else {
    for (std::size_t i = 0; i < d.size(); ++i) {
      const unsigned v = (static_cast<unsigned>(raw.pixels[2 * i]) << 8) | raw.pixels[2 * i + 1];
      d[i] = static_cast<float>(static_cast<double>(v) / 65535.0);
    }
  }
  return img;
}

struct JpegErrorState {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = {0};
  bool truncated = false;
};

inline void jpeg_error_to_jmp(j_common_ptr cinfo) {
  auto* st = reinterpret_cast<JpegErrorState*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, st->message);
  std::longjmp(st->jump, 1);
}

// Premature end of data is only a warning in libjpeg; record it so the
// caller can report a truncated file.
inline void jpeg_note_warning(j_common_ptr cinfo, int level) {
  if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF)
    reinterpret_cast<JpegErrorState*>(cinfo->err)->truncated = true;
}

struct JpegRaw {
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> pixels;
};

inline bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, JpegErrorState& err, JpegRaw& raw) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_to_jmp;
  err.mgr.emit_message = jpeg_note_warning;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    std::snprintf(err.message, sizeof(err.message), "CMYK JPEG is not supported");
    jpeg_destroy_decompress(&cinfo);
    raw.channels = -1;
    return false;
  }
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  raw.width = static_cast<int>(cinfo.output_width);
  raw.height = static_cast<int>(cinfo.output_height);
  raw.channels = cinfo.output_components;
  const std::size_t stride = static_cast<std::size_t>(raw.width) * raw.channels;
  raw.pixels.resize(stride * static_cast<std::size_t>(raw.height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = raw.pixels.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

inline ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes, const std::string& name) {
  JpegErrorState err;
  JpegRaw raw;
  if (!decode_jpeg_raw(bytes, err, raw)) {
    if (raw.channels == -1) fail(ErrorKind::format, "'" + name + "': " + err.message);
    fail(ErrorKind::io, "cannot decode JPEG '" + name + "': " + std::string(err.message));
  }
  require(!err.truncated, ErrorKind::io, "JPEG '" + name + "' is truncated");
  ImageBuffer img(raw.width, raw.height, raw.channels);
  auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<float>(raw.pixels[i]) / 255.0f;
  return img;
}

inline void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

inline void png_flush_noop(png_structp) {}

inline bool encode_png_raw(const std::vector<std::uint8_t>& pixels, int width, int height, int channels,
                           int bit_depth, int level, std::vector<std::uint8_t>& out, PngReadState& st) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st, png_error_to_jmp, png_silent_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY
                         : channels == 3 ? PNG_COLOR_TYPE_RGB
                                         : PNG_COLOR_TYPE_RGBA;
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, level);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + stride * static_cast<std::size_t>(y)));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

inline bool encode_jpeg_raw(const std::vector<std::uint8_t>& pixels, int width, int height, int channels,
                            int quality, JpegErrorState& err, std::vector<std::uint8_t>& out) {
  jpeg_compress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_to_jmp;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  if (channels == 3) {
    const int factor = quality < 90 ? 2 : 1;  // 4:2:0 below quality 90, else 4:4:4
    cinfo.comp_info[0].h_samp_factor = factor;
    cinfo.comp_info[0].v_samp_factor = factor;
    cinfo.comp_info[1].h_samp_factor = cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = cinfo.comp_info[2].v_samp_factor = 1;
  }
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(pixels.data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  out.assign(buffer, buffer + size);
  std::free(buffer);
  return true;
}

}  // namespace detail

/// Decode PNG (8/16-bit) or baseline JPEG bytes. Gray stays single-channel;
/// gray+alpha widens to RGBA.
inline ImageBuffer decode_image(std::span<const std::uint8_t> bytes, const std::string& name = "<memory>") {
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  require(bytes.size() >= 8, ErrorKind::io, "'" + name + "' is truncated");
  if (std::memcmp(bytes.data(), kPngSig, 8) == 0) return detail::decode_png(bytes, name);
  if (bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return detail::decode_jpeg(bytes, name);
  fail(ErrorKind::format, "'" + name + "' is neither PNG nor JPEG");
}

inline ImageBuffer load_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_image(bytes, path.string());
}

inline std::vector<std::uint8_t> encode_png(const ImageBuffer& img, int bit_depth = 8, int level = 3) {
  require(bit_depth == 8 || bit_depth == 16, ErrorKind::parameter, "PNG bit depth must be 8 or 16");
  std::vector<std::uint8_t> pixels;
  const auto d = img.data();
  if (bit_depth == 8) {
    pixels.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) pixels[i] = quantize8(d[i]);
  } else {
    pixels.resize(d.size() * 2);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::uint16_t v = quantize16(d[i]);
      pixels[2 * i] = static_cast<std::uint8_t>(v >> 8);
      pixels[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  std::vector<std::uint8_t> out;
  detail::PngReadState st;
  if (!detail::encode_png_raw(pixels, img.width(), img.height(), img.channels(), bit_depth, level, out, st))
    fail(ErrorKind::io, std::string("PNG encode failed: ") + st.message);
  return out;
}

/// Encode with libjpeg. Alpha is dropped.
inline std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
  require(quality >= 1 && quality <= 100, ErrorKind::parameter, "JPEG quality must be in 1..100");
  const int cc = img.color_channels();
  std::vector<std::uint8_t> pixels(img.pixel_count() * static_cast<std::size_t>(cc));
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < cc; ++c) pixels[p * cc + c] = quantize8(img.data()[p * img.channels() + c]);
  std::vector<std::uint8_t> out;
  detail::JpegErrorState err;
  if (!detail::encode_jpeg_raw(pixels, img.width(), img.height(), cc, quality, err, out))
    fail(ErrorKind::io, std::string("JPEG encode failed: ") + err.message);
  return out;
}

inline void save_image(const ImageBuffer& img, const std::filesystem::path& path, ImageFormat format,
                       const SaveOptions& opts = {}) {
  require(!img.empty(), ErrorKind::parameter, "cannot save an empty image");
  const auto bytes = format == ImageFormat::png ? encode_png(img, opts.png_bit_depth, opts.png_compression)
                                                : encode_jpeg(img, opts.jpeg_quality);
  write_file_bytes(path, bytes);
}

inline ImageFormat format_from_extension(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".png") return ImageFormat::png;
  if (ext == ".jpg" || ext == ".jpeg") return ImageFormat::jpeg;
  fail(ErrorKind::format, "unknown image extension '" + ext + "'");
}

inline bool is_image_path(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace degbench
