#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "patchcert/core.hpp"

namespace patchcert {

/// Every placement of a side x side square inside the frame, row-major by top-left corner.
struct PatchSet {
  int width = 0;
  int height = 0;
  int side = 0;
  std::vector<BinaryRegion> regions;

  std::size_t size() const noexcept { return regions.size(); }
  const BinaryRegion& operator[](std::size_t i) const { return regions[i]; }
};

/// k x k strided grid of masks; every patch lies inside at least one mask.
struct MaskSet {
  int width = 0;
  int height = 0;
  int masks_per_axis = 0;
  int mask_width = 0;
  int mask_height = 0;
  int stride_x = 0;
  int stride_y = 0;
  std::vector<BinaryRegion> masks;

  std::size_t size() const noexcept { return masks.size(); }
  const BinaryRegion& operator[](std::size_t i) const { return masks[i]; }
};

/// Wrap-around column bands at stride 1: band i keeps columns i .. i+b-1 (mod w).
struct AblationSet {
  int width = 0;
  int height = 0;
  int band_width = 0;
  std::vector<BinaryRegion> bands;

  std::size_t size() const noexcept { return bands.size(); }
  const BinaryRegion& operator[](std::size_t i) const { return bands[i]; }
};

PatchSet build_patch_set(int width, int height, int patch_side);

/// Throws GeometryError when k < 1, the patch does not fit, or covering fails.
MaskSet build_mask_set(int width, int height, int patch_side, int masks_per_axis);

struct CoveringResult {
  bool covered = true;
  std::optional<std::size_t> first_uncovered_patch;
  explicit operator bool() const noexcept { return covered; }
};

CoveringResult verify_covering(const MaskSet& masks, const PatchSet& patches);

AblationSet build_ablation_set(int width, int height, int band_width);

/// Largest number of bands any patch overlaps, counted exhaustively.
std::size_t compute_delta(const AblationSet& ablations, const PatchSet& patches);

/// Indices of the bands overlapping `patch`.
std::vector<std::size_t> overlapping_bands(const AblationSet& ablations, const BinaryRegion& patch);

}  // namespace patchcert
