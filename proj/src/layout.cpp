#include "lbm2d/layout.hpp"

#include <algorithm>
#include <bit>
#include <new>
#include <string>

namespace lbm2d {

std::string_view to_string(LayoutKind k) {
  switch (k) {
    case LayoutKind::Dense: return "dense";
    case LayoutKind::Tile: return "tile";
    case LayoutKind::BitmaskNode: return "bitmask_node";
    case LayoutKind::PointerTile: return "pointer_tile";
  }
  return "unknown";
}

std::optional<LayoutKind> parse_layout(std::string_view s) {
  for (LayoutKind k : kAllLayouts) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

template <typename T>
PdfField<T>::PdfField(const NodeDescriptorField& nodes, LayoutKind layout)
    : nx_(nodes.nx()), ny_(nodes.ny()), layout_(layout) {
  if (nx_ <= 0 || ny_ <= 0) {
    throw InvalidArgument("field dimensions must be positive");
  }
  const auto node_count = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  switch (layout_) {
    case LayoutKind::Dense:
    case LayoutKind::BitmaskNode:
      plane_stride_ = round_up(node_count, kCacheLine / sizeof(T));
      dense_ = AlignedBuffer<T>(2 * 9 * plane_stride_);
      if (layout_ == LayoutKind::BitmaskNode) {
        words_per_row_ = (static_cast<std::size_t>(nx_) + 63) / 64;
        active_bits_.assign(words_per_row_ * static_cast<std::size_t>(ny_), 0);
        for (int y = 0; y < ny_; ++y) {
          for (int x = 0; x < nx_; ++x) {
            if (nodes.type(x, y) != NodeType::Solid) {
              active_bits_[static_cast<std::size_t>(y) * words_per_row_ +
                           static_cast<std::size_t>(x) / 64] |= std::uint64_t{1} << (x % 64);
            }
          }
        }
      }
      break;
    case LayoutKind::Tile:
    case LayoutKind::PointerTile: {
      tiles_x_ = (nx_ + kTileEdge - 1) / kTileEdge;
      tiles_y_ = (ny_ + kTileEdge - 1) / kTileEdge;
      try {
        if (layout_ == LayoutKind::Tile) {
          tiles_.resize(tile_count());
          for (std::size_t id = 0; id < tile_count(); ++id) {
            allocated_ids_.push_back(static_cast<std::uint32_t>(id));
          }
        } else {
          tile_ptrs_.resize(tile_count());
          std::vector<bool> needed(tile_count(), false);
          for (int y = 0; y < ny_; ++y) {
            for (int x = 0; x < nx_; ++x) {
              if (nodes.type(x, y) != NodeType::Solid) needed[tile_id(x, y)] = true;
            }
          }
          for (std::size_t id = 0; id < tile_count(); ++id) {
            if (needed[id]) {
              tile_ptrs_[id] = std::make_unique<TileBlock<T>>();
              allocated_ids_.push_back(static_cast<std::uint32_t>(id));
            }
          }
        }
      } catch (const std::bad_alloc&) {
        throw ResourceError("failed to allocate tile storage");
      }
      break;
    }
  }
}

template <typename T>
void PdfField<T>::check(int x, int y, int i) const {
  if (x < 0 || y < 0 || x >= nx_ || y >= ny_) {
    throw InvalidArgument("node (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") outside field");
  }
  if (i < 0 || i >= 9) {
    throw InvalidArgument("direction index out of range: " + std::to_string(i));
  }
}

template <typename T>
T PdfField<T>::read(int x, int y, int i, BufferRole which) const {
  check(x, y, i);
  const int b = physical(which);
  switch (layout_) {
    case LayoutKind::Dense:
    case LayoutKind::BitmaskNode:
      return plane(b, i)[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
                         static_cast<std::size_t>(x)];
    case LayoutKind::Tile:
    case LayoutKind::PointerTile: {
      const TileBlock<T>* t = tile(tile_id(x, y));
      return t ? t->f[b][i][tile_local(x, y)] : T(0);
    }
  }
  return T(0);
}

template <typename T>
void PdfField<T>::write(int x, int y, int i, BufferRole which, T value) {
  check(x, y, i);
  const int b = physical(which);
  switch (layout_) {
    case LayoutKind::Dense:
    case LayoutKind::BitmaskNode:
      plane(b, i)[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
                  static_cast<std::size_t>(x)] = value;
      return;
    case LayoutKind::Tile:
    case LayoutKind::PointerTile: {
      const std::size_t id = tile_id(x, y);
      if (layout_ == LayoutKind::PointerTile && !tile_ptrs_[id]) {
        tile_ptrs_[id] = std::make_unique<TileBlock<T>>();
        allocated_ids_.insert(
            std::lower_bound(allocated_ids_.begin(), allocated_ids_.end(), id),
            static_cast<std::uint32_t>(id));
      }
      tile(id)->f[b][i][tile_local(x, y)] = value;
      return;
    }
  }
}

template <typename T>
std::size_t PdfField<T>::allocated_tile_count() const noexcept {
  return (layout_ == LayoutKind::Tile || layout_ == LayoutKind::PointerTile) ? allocated_ids_.size()
                                                                              : 0;
}

template <typename T>
std::size_t PdfField<T>::allocated_bytes() const noexcept {
  switch (layout_) {
    case LayoutKind::Dense:
    case LayoutKind::BitmaskNode:
      return dense_.bytes();
    case LayoutKind::Tile:
    case LayoutKind::PointerTile:
      return allocated_ids_.size() * sizeof(TileBlock<T>);
  }
  return 0;
}

template <typename T>
std::size_t PdfField<T>::visited_count() const {
  std::size_t n = 0;
  switch (layout_) {
    case LayoutKind::Dense:
      return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    case LayoutKind::BitmaskNode:
      for (std::uint64_t w : active_bits_) n += static_cast<std::size_t>(std::popcount(w));
      return n;
    case LayoutKind::Tile:
    case LayoutKind::PointerTile:
      for_each_visited([&](NodeCoord) { ++n; });
      return n;
  }
  return n;
}

template class PdfField<float>;
template class PdfField<double>;

}  // namespace lbm2d
