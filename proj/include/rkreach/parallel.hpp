/*******************************************************************************
* Copyright 2026 The rkreach Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*******************************************************************************/

#pragma once

#include <cstddef>
#include <functional>

namespace rkreach {

/// Worker count: RKHS_REACH_THREADS when set and positive, otherwise the
/// hardware concurrency (0 in the variable also means auto).
std::size_t thread_count();

/// Splits [0, count) into contiguous chunks, one per worker, and runs
/// body(begin, end) on each. Every index is handled by exactly one call, so
/// results written per index do not depend on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 16);

}  // namespace rkreach
