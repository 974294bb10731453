// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/parallel.hpp"

namespace uqoc {

namespace {
std::atomic<int> g_max_jobs{1};
}

void set_max_jobs(int jobs) noexcept { g_max_jobs.store(std::max(1, jobs)); }

int max_jobs() noexcept { return g_max_jobs.load(); }

}  // namespace uqoc
