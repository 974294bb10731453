// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "uqoc/common.hpp"

namespace uqoc {

/// Counter-based generator (Philox4x32-10) with Box-Muller normals.
///
/// A generator is identified by (seed, stream); each draw advances a 64-bit
/// block counter. Distinct stream ids give statistically independent
/// sequences, so per-worker and per-sample streams can be derived without
/// coordination and without depending on the order in which work is run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  /// Independent generator for (seed, id). Does not advance *this.
  Rng stream(std::uint64_t id) const noexcept { return Rng(seed_, id); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  double normal() noexcept;

  void fill_normal(std::span<double> out) noexcept;
  Vec normal_vector(Eigen::Index n);
  Mat normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

}  // namespace uqoc
