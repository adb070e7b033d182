#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "patchcert/error.hpp"

namespace patchcert {

using Pixel = std::uint8_t;
using Label = std::uint32_t;

/// Row-major pixel grid; rows are image rows (height), columns image columns (width).
using PixelArray = Eigen::Array<Pixel, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BitArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Value 0 is the removed/masked sentinel.
inline constexpr Pixel kSentinel = 0;

/// A single-channel image with integer pixels in [0, alphabet].
class Sample {
 public:
  Sample() = default;
  Sample(PixelArray pixels, Pixel alphabet);
  /// Row-major pixel list of length width*height.
  Sample(int width, int height, Pixel alphabet, std::span<const Pixel> row_major);

  static Sample filled(int width, int height, Pixel alphabet, Pixel value);

  int width() const noexcept { return static_cast<int>(pixels_.cols()); }
  int height() const noexcept { return static_cast<int>(pixels_.rows()); }
  Pixel alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(pixels_.size()); }

  Pixel operator()(int row, int col) const { return pixels_(row, col); }
  const PixelArray& pixels() const noexcept { return pixels_; }
  std::span<const Pixel> data() const noexcept { return {pixels_.data(), size()}; }
  std::vector<Pixel> to_vector() const { return {pixels_.data(), pixels_.data() + size()}; }

  bool contains_sentinel() const;

  friend bool operator==(const Sample& a, const Sample& b) {
    return a.pixels_.rows() == b.pixels_.rows() && a.pixels_.cols() == b.pixels_.cols() &&
           (a.pixels_ == b.pixels_).all();
  }

 private:
  PixelArray pixels_;
  Pixel alphabet_ = 0;
};

/// A binary matrix over the frame: houses J, O, patches, masks and ablations.
class BinaryRegion {
 public:
  BinaryRegion() = default;
  explicit BinaryRegion(BitArray bits);

  static BinaryRegion ones(int width, int height);
  static BinaryRegion zeros(int width, int height);
  /// Axis-aligned rectangle of ones with top-left corner (row, col).
  static BinaryRegion rectangle(int width, int height, int row, int col, int rect_height,
                                int rect_width);

  int width() const noexcept { return static_cast<int>(bits_.cols()); }
  int height() const noexcept { return static_cast<int>(bits_.rows()); }
  bool operator()(int row, int col) const { return bits_(row, col) != 0; }
  const BitArray& bits() const noexcept { return bits_; }

  std::size_t popcount() const;
  bool is_empty() const { return (bits_ == std::uint8_t{0}).all(); }
  bool is_full() const { return (bits_ != std::uint8_t{0}).all(); }

  /// True iff this region lies inside `outer` (this ⊙ outer = this).
  bool inside(const BinaryRegion& outer) const;
  /// True iff the elementwise product is not O.
  bool overlaps(const BinaryRegion& other) const;

  friend bool operator==(const BinaryRegion& a, const BinaryRegion& b) {
    return a.bits_.rows() == b.bits_.rows() && a.bits_.cols() == b.bits_.cols() &&
           (a.bits_ == b.bits_).all();
  }

 private:
  BitArray bits_;
};

/// U + V: elementwise max.
BinaryRegion region_add(const BinaryRegion& u, const BinaryRegion& v);
/// U - V: u_ij - v_ij where u_ij = 1, else 0.
BinaryRegion region_sub(const BinaryRegion& u, const BinaryRegion& v);
/// U ⊙ V: elementwise product.
BinaryRegion region_mul(const BinaryRegion& u, const BinaryRegion& v);

/// Keeps pixels where r is 1 and writes the sentinel elsewhere.
Sample apply_region(const Sample& x, const BinaryRegion& r);
/// (J - m) ⊙ x.
Sample remove_region(const Sample& x, const BinaryRegion& m);

/// x' = (J - p) ⊙ x + p ⊙ x''. `content` fills the cells of p in row-major order.
Sample overwrite_patch(const Sample& x, const BinaryRegion& p, std::span<const Pixel> content);

std::string to_string(const Sample& x);

}  // namespace patchcert
