#include "patchcert/geometry.hpp"

#include <algorithm>
#include <string>

namespace patchcert {
namespace {

struct AxisLayout {
  int side = 0;
  int stride = 0;
  std::vector<int> offsets;
};

bool layout_covers(const AxisLayout& axis, int axis_len, int patch_side) {
  // A mask at offset o covers patch starts o .. o + side - patch_side.
  for (int start = 0; start + patch_side <= axis_len; ++start) {
    const bool hit = std::any_of(axis.offsets.begin(), axis.offsets.end(), [&](int o) {
      return start >= o && start + patch_side <= o + axis.side;
    });
    if (!hit) return false;
  }
  return true;
}

AxisLayout place_axis(int axis_len, int patch_side, int k) {
  AxisLayout axis;
  if (k == 1) {
    axis.side = axis_len;
    axis.offsets = {0};
    return axis;
  }
  axis.stride = (axis_len - patch_side + k - 1) / k;
  const auto place = [&](int side) {
    axis.side = side;
    axis.offsets.clear();
    for (int i = 0; i < k; ++i) axis.offsets.push_back(std::min(i * axis.stride, axis_len - side));
  };
  place(std::max(patch_side + axis.stride - 1, 1));
  if (!layout_covers(axis, axis_len, patch_side) && axis.side < axis_len) place(axis.side + 1);
  return axis;
}

}  // namespace

PatchSet build_patch_set(int width, int height, int patch_side) {
  if (width <= 0 || height <= 0) throw GeometryError("frame dimensions must be positive");
  if (patch_side < 1 || patch_side > std::min(width, height)) {
    throw GeometryError("patch side " + std::to_string(patch_side) + " must be in [1, " +
                        std::to_string(std::min(width, height)) + "]");
  }
  PatchSet set{width, height, patch_side, {}};
  for (int row = 0; row + patch_side <= height; ++row) {
    for (int col = 0; col + patch_side <= width; ++col) {
      set.regions.push_back(BinaryRegion::rectangle(width, height, row, col, patch_side, patch_side));
    }
  }
  return set;
}

MaskSet build_mask_set(int width, int height, int patch_side, int masks_per_axis) {
  if (masks_per_axis < 1) {
    throw GeometryError("masks per axis must be at least 1, got " + std::to_string(masks_per_axis));
  }
  const PatchSet patches = build_patch_set(width, height, patch_side);
  const AxisLayout cols = place_axis(width, patch_side, masks_per_axis);
  const AxisLayout rows = place_axis(height, patch_side, masks_per_axis);

  MaskSet set;
  set.width = width;
  set.height = height;
  set.masks_per_axis = masks_per_axis;
  set.mask_width = cols.side;
  set.mask_height = rows.side;
  set.stride_x = cols.stride;
  set.stride_y = rows.stride;
  for (int r : rows.offsets) {
    for (int c : cols.offsets) {
      set.masks.push_back(BinaryRegion::rectangle(width, height, r, c, rows.side, cols.side));
    }
  }

  const auto covering = verify_covering(set, patches);
  if (!covering) {
    throw GeometryError("mask set (k=" + std::to_string(masks_per_axis) +
                        ") leaves patch #" + std::to_string(*covering.first_uncovered_patch) +
                        " uncovered");
  }
  return set;
}

CoveringResult verify_covering(const MaskSet& masks, const PatchSet& patches) {
  if (masks.width != patches.width || masks.height != patches.height) {
    throw DimensionError("verify_covering: mask set and patch set frames differ");
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const bool covered = std::any_of(masks.masks.begin(), masks.masks.end(),
                                     [&](const BinaryRegion& m) { return patches[i].inside(m); });
    if (!covered) return {false, i};
  }
  return {};
}

AblationSet build_ablation_set(int width, int height, int band_width) {
  if (width <= 0 || height <= 0) throw GeometryError("frame dimensions must be positive");
  if (band_width < 1 || band_width > width) {
    throw GeometryError("ablation band width " + std::to_string(band_width) + " must be in [1, " +
                        std::to_string(width) + "]");
  }
  AblationSet set{width, height, band_width, {}};
  for (int start = 0; start < width; ++start) {
    BitArray bits = BitArray::Zero(height, width);
    for (int c = 0; c < band_width; ++c) bits.col((start + c) % width).setOnes();
    set.bands.emplace_back(std::move(bits));
  }
  return set;
}

std::vector<std::size_t> overlapping_bands(const AblationSet& ablations, const BinaryRegion& patch) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ablations.size(); ++i) {
    if (ablations[i].overlaps(patch)) out.push_back(i);
  }
  return out;
}

std::size_t compute_delta(const AblationSet& ablations, const PatchSet& patches) {
  if (ablations.width != patches.width || ablations.height != patches.height) {
    throw DimensionError("compute_delta: ablation set and patch set frames differ");
  }
  std::size_t delta = 0;
  for (const auto& p : patches.regions) delta = std::max(delta, overlapping_bands(ablations, p).size());
  return delta;
}

}  // namespace patchcert
