#include "plantsim/image.hpp"

#include <png.h>

#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

// jpeglib.h expects size_t and FILE to be declared first.
#include <jpeglib.h>

namespace plantsim {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height), background_(fill) {
  if (width < 0 || height < 0) throw Error("negative image dimensions");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (auto v : cells()) n += v != 0;
  return n;
}

namespace {

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<std::uint8_t> out;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_write_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  static void write(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngWriter*>(png_get_io_ptr(p));
    self->out.insert(self->out.end(), data, data + len);
  }
  static void flush(png_structp) {}
};

std::vector<std::uint8_t> write_png(int width, int height, int bit_depth, int color_type,
                                    const std::vector<std::vector<std::uint8_t>>& rows) {
  if (width <= 0 || height <= 0) throw Error("cannot encode an empty image");
  PngWriter w;
  if (setjmp(png_jmpbuf(w.png))) throw Error("PNG encoding failed");
  png_set_write_fn(w.png, &w, &PngWriter::write, &PngWriter::flush);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(w.png, 6);
  png_set_filter(w.png, 0, PNG_ALL_FILTERS);
  png_write_info(w.png, w.info);
  for (const auto& row : rows) png_write_row(w.png, const_cast<png_bytep>(row.data()));
  png_write_end(w.png, nullptr);
  return std::move(w.out);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;

  explicit PngReader(std::span<const std::uint8_t> bytes) : in(bytes) {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_read_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_read_struct(&png, nullptr, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  static void read(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngReader*>(png_get_io_ptr(p));
    if (self->pos + len > self->in.size()) png_error(p, "truncated PNG");
    std::memcpy(data, self->in.data() + self->pos, len);
    self->pos += len;
  }
};

enum class Want { rgb8, gray16, gray8 };

// Decodes into rows of the requested layout.
std::vector<std::vector<std::uint8_t>> read_png(std::span<const std::uint8_t> bytes, Want want,
                                                int& width, int& height) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw Error("not a PNG stream");
  PngReader r(bytes);
  if (setjmp(png_jmpbuf(r.png))) throw Error("PNG decoding failed");
  png_set_read_fn(r.png, &r, &PngReader::read);
  png_read_info(r.png, r.info);
  width = static_cast<int>(png_get_image_width(r.png, r.info));
  height = static_cast<int>(png_get_image_height(r.png, r.info));
  const int color = png_get_color_type(r.png, r.info);
  const int depth = png_get_bit_depth(r.png, r.info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
  if (want == Want::rgb8) {
    if (depth == 16) png_set_strip_16(r.png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(r.png);
  } else {
    if (color != PNG_COLOR_TYPE_GRAY) throw Error("expected a grayscale PNG");
    if (want == Want::gray16 && depth != 16) throw Error("expected a 16-bit PNG");
    if (want == Want::gray16) png_set_swap(r.png);  // little-endian host order
  }
  png_read_update_info(r.png, r.info);
  const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(height),
                                              std::vector<std::uint8_t>(rowbytes));
  std::vector<png_bytep> ptrs;
  for (auto& row : rows) ptrs.push_back(row.data());
  png_read_image(r.png, ptrs.data());
  png_read_end(r.png, nullptr);
  return rows;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(image.height()));
  const auto bytes = image.bytes();
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  for (int y = 0; y < image.height(); ++y) {
    rows[y].assign(bytes.begin() + y * stride, bytes.begin() + (y + 1) * stride);
  }
  return write_png(image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto rows = read_png(bytes, Want::rgb8, w, h);
  RasterImage img(w, h);
  auto out = img.bytes();
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  for (int y = 0; y < h; ++y) std::memcpy(out.data() + y * stride, rows[y].data(), stride);
  return img;
}

std::vector<std::uint8_t> encode_png_gray16(const OrganIdBuffer& ids) {
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(ids.height()));
  for (int y = 0; y < ids.height(); ++y) {
    auto& row = rows[y];
    row.resize(static_cast<std::size_t>(ids.width()) * 2);
    for (int x = 0; x < ids.width(); ++x) {
      const std::uint32_t v = ids.at(x, y);
      if (v > 0xFFFF) throw Error("organ id " + std::to_string(v) + " does not fit in 16 bits");
      row[2 * x] = static_cast<std::uint8_t>(v >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  return write_png(ids.width(), ids.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

OrganIdBuffer decode_png_gray16(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto rows = read_png(bytes, Want::gray16, w, h);
  OrganIdBuffer ids(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      ids.at(x, y) = static_cast<std::uint32_t>(rows[y][2 * x]) |
                     (static_cast<std::uint32_t>(rows[y][2 * x + 1]) << 8);
    }
  }
  return ids;
}

std::vector<std::uint8_t> encode_png_mask(const BinaryMask& mask) {
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(mask.height()));
  for (int y = 0; y < mask.height(); ++y) {
    auto& row = rows[y];
    row.assign((static_cast<std::size_t>(mask.width()) + 7) / 8, 0);
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }
  }
  return write_png(mask.width(), mask.height(), 1, PNG_COLOR_TYPE_GRAY, rows);
}

BinaryMask decode_png_mask(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto rows = read_png(bytes, Want::gray8, w, h);
  BinaryMask mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mask.at(x, y) = rows[y][x] >= 128 ? 1 : 0;
  }
  return mask;
}

namespace {

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

}  // namespace

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  RasterImage img;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error("JPEG decoding failed");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  img = RasterImage(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  auto out = img.bytes();
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path.string());
}

RasterImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  throw Error("unsupported image format: " + path.string());
}

void save_png(const std::filesystem::path& path, const RasterImage& image) {
  write_file(path, encode_png(image));
}

}  // namespace plantsim
