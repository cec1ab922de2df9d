#pragma once

// Storage for the two distribution buffers under four interchangeable layouts.
//
//   Dense        9 per-direction planes per buffer, row-major nodes.
//   BitmaskNode  Dense storage plus one activity bit per node; the kernel only
//                visits nodes whose bit is set.
//   Tile         contiguous array of 16x16 tiles, tile-grid row-major; each
//                tile holds [buffer][direction][256 nodes].
//   PointerTile  one pointer per tile; tiles whose nodes are all Solid are
//                never allocated.
//
// Domains that are not tile multiples are padded; padded nodes count as Solid.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "lbm2d/aligned_buffer.hpp"
#include "lbm2d/descriptors.hpp"

namespace lbm2d {

enum class LayoutKind : std::uint8_t { Dense, Tile, BitmaskNode, PointerTile };

std::string_view to_string(LayoutKind k);
std::optional<LayoutKind> parse_layout(std::string_view s);

inline constexpr LayoutKind kAllLayouts[] = {LayoutKind::Dense, LayoutKind::Tile,
                                             LayoutKind::BitmaskNode, LayoutKind::PointerTile};

enum class BufferRole : std::uint8_t { Pre, Post };

inline constexpr int kTileEdge = 16;
inline constexpr int kTileNodes = kTileEdge * kTileEdge;

template <typename T>
struct alignas(kCacheLine) TileBlock {
  T f[2][9][kTileNodes];
};

struct NodeCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

template <typename T>
class PdfField {
public:
  /// Zero-initialised field. For PointerTile, tiles without any non-solid node
  /// stay unallocated.
  PdfField(const NodeDescriptorField& nodes, LayoutKind layout);

  PdfField(PdfField&&) noexcept = default;
  PdfField& operator=(PdfField&&) noexcept = default;

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  LayoutKind layout() const noexcept { return layout_; }

  /// Out-of-range coordinates or direction throw InvalidArgument. Unallocated
  /// PointerTile tiles read as 0.
  T read(int x, int y, int i, BufferRole which) const;
  /// Writing into an unallocated PointerTile tile allocates it.
  void write(int x, int y, int i, BufferRole which, T value);

  /// O(1): flips which physical buffer is "pre".
  void swap_buffers() noexcept { parity_ ^= 1; }
  int parity() const noexcept { return parity_; }
  int physical(BufferRole which) const noexcept {
    return which == BufferRole::Pre ? parity_ : 1 - parity_;
  }

  /// Bytes of distribution payload currently allocated (both buffers).
  std::size_t allocated_bytes() const noexcept;
  std::size_t allocated_tile_count() const noexcept;

  // ---- raw access used by the kernels ----

  std::size_t plane_stride() const noexcept { return plane_stride_; }
  T* plane(int buffer, int i) noexcept {
    return dense_.data() + (static_cast<std::size_t>(buffer) * 9 + static_cast<std::size_t>(i)) *
                               plane_stride_;
  }
  const T* plane(int buffer, int i) const noexcept {
    return dense_.data() + (static_cast<std::size_t>(buffer) * 9 + static_cast<std::size_t>(i)) *
                               plane_stride_;
  }

  int tiles_x() const noexcept { return tiles_x_; }
  int tiles_y() const noexcept { return tiles_y_; }
  std::size_t tile_count() const noexcept {
    return static_cast<std::size_t>(tiles_x_) * static_cast<std::size_t>(tiles_y_);
  }
  TileBlock<T>* tile(std::size_t id) noexcept {
    return layout_ == LayoutKind::Tile ? &tiles_[id] : tile_ptrs_[id].get();
  }
  const TileBlock<T>* tile(std::size_t id) const noexcept {
    return layout_ == LayoutKind::Tile ? &tiles_[id] : tile_ptrs_[id].get();
  }
  const std::vector<std::uint32_t>& allocated_tiles() const noexcept { return allocated_ids_; }
  std::size_t tile_id(int x, int y) const noexcept {
    return static_cast<std::size_t>(y / kTileEdge) * static_cast<std::size_t>(tiles_x_) +
           static_cast<std::size_t>(x / kTileEdge);
  }
  static std::size_t tile_local(int x, int y) noexcept {
    return static_cast<std::size_t>((y % kTileEdge) * kTileEdge + (x % kTileEdge));
  }

  /// BitmaskNode: one bit per node, rows padded to whole 64-bit words.
  std::size_t words_per_row() const noexcept { return words_per_row_; }
  const std::uint64_t* active_row(int y) const noexcept {
    return active_bits_.data() + static_cast<std::size_t>(y) * words_per_row_;
  }

  /// Calls fn(NodeCoord) for every node the kernel visits under this layout.
  template <typename Fn>
  void for_each_visited(Fn&& fn) const;
  std::size_t visited_count() const;

private:
  void check(int x, int y, int i) const;

  int nx_ = 0;
  int ny_ = 0;
  LayoutKind layout_ = LayoutKind::Dense;
  int parity_ = 0;

  // Dense / BitmaskNode
  std::size_t plane_stride_ = 0;
  AlignedBuffer<T> dense_;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> active_bits_;

  // Tile / PointerTile
  int tiles_x_ = 0;
  int tiles_y_ = 0;
  std::vector<TileBlock<T>> tiles_;
  std::vector<std::unique_ptr<TileBlock<T>>> tile_ptrs_;
  std::vector<std::uint32_t> allocated_ids_;
};

template <typename T>
template <typename Fn>
void PdfField<T>::for_each_visited(Fn&& fn) const {
  switch (layout_) {
    case LayoutKind::Dense:
      for (int y = 0; y < ny_; ++y) {
        for (int x = 0; x < nx_; ++x) fn(NodeCoord{x, y});
      }
      break;
    case LayoutKind::BitmaskNode:
      for (int y = 0; y < ny_; ++y) {
        const std::uint64_t* row = active_row(y);
        for (std::size_t w = 0; w < words_per_row_; ++w) {
          for (std::uint64_t bits = row[w]; bits != 0; bits &= bits - 1) {
            fn(NodeCoord{static_cast<int>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))), y});
          }
        }
      }
      break;
    case LayoutKind::Tile:
    case LayoutKind::PointerTile: {
      auto visit_tile = [&](std::size_t id) {
        const int x0 = static_cast<int>(id % static_cast<std::size_t>(tiles_x_)) * kTileEdge;
        const int y0 = static_cast<int>(id / static_cast<std::size_t>(tiles_x_)) * kTileEdge;
        for (int y = y0; y < std::min(y0 + kTileEdge, ny_); ++y) {
          for (int x = x0; x < std::min(x0 + kTileEdge, nx_); ++x) fn(NodeCoord{x, y});
        }
      };
      if (layout_ == LayoutKind::Tile) {
        for (std::size_t id = 0; id < tile_count(); ++id) visit_tile(id);
      } else {
        for (std::uint32_t id : allocated_ids_) visit_tile(id);
      }
      break;
    }
  }
}

extern template class PdfField<float>;
extern template class PdfField<double>;

}  // namespace lbm2d
