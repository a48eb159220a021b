#include "mathseed/png.hpp"

#include <zlib.h>

#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mathseed/error.hpp"

namespace mathseed {

namespace {

constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

[[noreturn]] void fail(const std::string& why) { throw Error(ErrorKind::PngDecode, why); }

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Bitmap& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height)) {
    throw Error(ErrorKind::InvalidConfig, "bitmap dimensions do not match pixel count");
  }
  std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});
  put_chunk(out, "IHDR", ihdr);

  const std::size_t stride = static_cast<std::size_t>(img.width);
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const auto* row = img.pixels.data() + static_cast<std::size_t>(y) * stride;
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(len);
  if (compress2(packed.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw Error(ErrorKind::Io, "zlib compression failed");
  }
  packed.resize(len);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

Bitmap decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kSignature.size() || !std::equal(kSignature.begin(), kSignature.end(), bytes.begin())) {
    fail("missing PNG signature");
  }
  std::size_t pos = kSignature.size();
  int width = 0, height = 0;
  bool have_header = false, have_end = false;
  std::vector<std::uint8_t> idat;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = get_u32(&bytes[pos]);
    if (pos + 12 + static_cast<std::size_t>(len) > bytes.size()) fail("truncated chunk");
    const std::uint8_t* type = &bytes[pos + 4];
    const std::uint8_t* data = &bytes[pos + 8];
    const std::uint32_t crc = get_u32(data + len);
    if (crc32(0L, type, static_cast<uInt>(len + 4)) != crc) fail("chunk CRC mismatch");
    const std::string name(reinterpret_cast<const char*>(type), 4);
    if (name == "IHDR") {
      if (len != 13) fail("bad IHDR length");
      width = static_cast<int>(get_u32(data));
      height = static_cast<int>(get_u32(data + 4));
      if (width <= 0 || height <= 0) fail("bad dimensions");
      if (data[8] != 8 || data[9] != 0) fail("only 8-bit grayscale is supported");
      if (data[10] != 0 || data[11] != 0 || data[12] != 0) fail("unsupported compression, filter or interlace");
      have_header = true;
    } else if (name == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (name == "IEND") {
      have_end = true;
      break;
    } else if ((type[0] & 0x20) == 0) {
      fail("unknown critical chunk " + name);
    }
    pos += 12 + len;
  }
  if (!have_header || !have_end) fail("missing IHDR or IEND");

  const std::size_t stride = static_cast<std::size_t>(width);
  std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(height));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    fail("corrupt image data");
  }

  Bitmap img(width, height, 0);
  std::vector<std::uint8_t> prev(stride, 0);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = &raw[static_cast<std::size_t>(y) * (stride + 1)];
    const std::uint8_t filter = src[0];
    std::uint8_t* dst = &img.pixels[static_cast<std::size_t>(y) * stride];
    for (std::size_t x = 0; x < stride; ++x) {
      const int a = x > 0 ? dst[x - 1] : 0;
      const int b = prev[x];
      const int c = x > 0 ? prev[x - 1] : 0;
      int predictor;
      switch (filter) {
        case 0: predictor = 0; break;
        case 1: predictor = a; break;
        case 2: predictor = b; break;
        case 3: predictor = (a + b) / 2; break;
        case 4: predictor = paeth(a, b, c); break;
        default: fail("unknown row filter");
      }
      dst[x] = static_cast<std::uint8_t>(src[1 + x] + predictor);
    }
    std::memcpy(prev.data(), dst, stride);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Bitmap& img) {
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Bitmap read_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace mathseed
