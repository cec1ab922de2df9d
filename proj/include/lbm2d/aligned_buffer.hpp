#pragma once

#include <cstddef>
#include <cstring>
#include <memory>
#include <new>
#include <span>

#include "lbm2d/error.hpp"

namespace lbm2d {

inline constexpr std::size_t kCacheLine = 64;

/// Zero-initialised, cache-line aligned array of trivially copyable elements.
template <typename T>
class AlignedBuffer {
public:
  AlignedBuffer() = default;

  explicit AlignedBuffer(std::size_t n) : size_(n) {
    if (n == 0) {
      return;
    }
    try {
      data_.reset(static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kCacheLine})));
    } catch (const std::bad_alloc&) {
      throw ResourceError("failed to allocate " + std::to_string(n * sizeof(T)) + " bytes");
    }
    std::memset(data_.get(), 0, n * sizeof(T));
  }

  T* data() noexcept { return data_.get(); }
  const T* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t bytes() const noexcept { return size_ * sizeof(T); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> span() noexcept { return {data(), size_}; }
  std::span<const T> span() const noexcept { return {data(), size_}; }

private:
  struct Deleter {
    void operator()(T* p) const noexcept { ::operator delete(p, std::align_val_t{kCacheLine}); }
  };
  std::unique_ptr<T[], Deleter> data_;
  std::size_t size_ = 0;
};

constexpr std::size_t round_up(std::size_t n, std::size_t multiple) {
  return (n + multiple - 1) / multiple * multiple;
}

}  // namespace lbm2d
