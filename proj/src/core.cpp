#include "patchcert/core.hpp"

#include <sstream>

namespace patchcert {
namespace {

template <typename A, typename B>
void require_same_frame(const A& a, const B& b, const char* op) {
  if (a.width() != b.width() || a.height() != b.height()) {
    std::ostringstream msg;
    msg << op << ": frame mismatch " << a.width() << "x" << a.height() << " vs " << b.width()
        << "x" << b.height();
    throw DimensionError(msg.str());
  }
}

void require_frame(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

}  // namespace

Sample::Sample(PixelArray pixels, Pixel alphabet) : pixels_(std::move(pixels)), alphabet_(alphabet) {
  require_frame(width(), height());
  if ((pixels_ > alphabet_).any()) {
    throw DomainError("pixel value exceeds alphabet size " + std::to_string(alphabet_));
  }
}

Sample::Sample(int width, int height, Pixel alphabet, std::span<const Pixel> row_major) {
  require_frame(width, height);
  if (row_major.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError("expected " + std::to_string(width * height) + " pixels, got " +
                         std::to_string(row_major.size()));
  }
  PixelArray grid(height, width);
  std::copy(row_major.begin(), row_major.end(), grid.data());
  *this = Sample(std::move(grid), alphabet);
}

Sample Sample::filled(int width, int height, Pixel alphabet, Pixel value) {
  require_frame(width, height);
  return Sample(PixelArray::Constant(height, width, value), alphabet);
}

bool Sample::contains_sentinel() const { return (pixels_ == kSentinel).any(); }

BinaryRegion::BinaryRegion(BitArray bits) : bits_(std::move(bits)) {
  require_frame(width(), height());
  if ((bits_ > std::uint8_t{1}).any()) throw DomainError("binary region holds a value other than 0 or 1");
}

BinaryRegion BinaryRegion::ones(int width, int height) {
  require_frame(width, height);
  return BinaryRegion(BitArray::Ones(height, width));
}

BinaryRegion BinaryRegion::zeros(int width, int height) {
  require_frame(width, height);
  return BinaryRegion(BitArray::Zero(height, width));
}

BinaryRegion BinaryRegion::rectangle(int width, int height, int row, int col, int rect_height,
                                     int rect_width) {
  require_frame(width, height);
  if (row < 0 || col < 0 || rect_height < 0 || rect_width < 0 || row + rect_height > height ||
      col + rect_width > width) {
    throw GeometryError("rectangle does not fit inside the frame");
  }
  BitArray bits = BitArray::Zero(height, width);
  bits.block(row, col, rect_height, rect_width).setOnes();
  return BinaryRegion(std::move(bits));
}

std::size_t BinaryRegion::popcount() const { return static_cast<std::size_t>((bits_ != std::uint8_t{0}).count()); }

bool BinaryRegion::inside(const BinaryRegion& outer) const {
  require_same_frame(*this, outer, "inside");
  return ((bits_ * outer.bits_) == bits_).all();
}

bool BinaryRegion::overlaps(const BinaryRegion& other) const {
  require_same_frame(*this, other, "overlaps");
  return ((bits_ * other.bits_) != std::uint8_t{0}).any();
}

BinaryRegion region_add(const BinaryRegion& u, const BinaryRegion& v) {
  require_same_frame(u, v, "region_add");
  return BinaryRegion(u.bits().max(v.bits()));
}

BinaryRegion region_sub(const BinaryRegion& u, const BinaryRegion& v) {
  require_same_frame(u, v, "region_sub");
  return BinaryRegion((u.bits() > v.bits()).cast<std::uint8_t>());
}

BinaryRegion region_mul(const BinaryRegion& u, const BinaryRegion& v) {
  require_same_frame(u, v, "region_mul");
  return BinaryRegion(u.bits() * v.bits());
}

Sample apply_region(const Sample& x, const BinaryRegion& r) {
  require_same_frame(x, r, "apply_region");
  return Sample(x.pixels() * r.bits(), x.alphabet());
}

Sample remove_region(const Sample& x, const BinaryRegion& m) {
  require_same_frame(x, m, "remove_region");
  return Sample(x.pixels() * (Pixel{1} - m.bits()), x.alphabet());
}

Sample overwrite_patch(const Sample& x, const BinaryRegion& p, std::span<const Pixel> content) {
  require_same_frame(x, p, "overwrite_patch");
  if (content.size() != p.popcount()) {
    throw DomainError("patch content has " + std::to_string(content.size()) +
                      " pixels, patch region has " + std::to_string(p.popcount()));
  }
  PixelArray out = x.pixels();
  std::size_t next = 0;
  for (int i = 0; i < x.height(); ++i) {
    for (int j = 0; j < x.width(); ++j) {
      if (!p(i, j)) continue;
      const Pixel v = content[next++];
      if (v > x.alphabet()) {
        throw DomainError("patch content value " + std::to_string(v) + " exceeds alphabet " +
                          std::to_string(x.alphabet()));
      }
      out(i, j) = v;
    }
  }
  return Sample(std::move(out), x.alphabet());
}

std::string to_string(const Sample& x) {
  std::ostringstream out;
  for (int i = 0; i < x.height(); ++i) {
    for (int j = 0; j < x.width(); ++j) {
      if (j) out << ' ';
      out << static_cast<int>(x(i, j));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace patchcert
