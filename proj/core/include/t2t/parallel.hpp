/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef T2T_PARALLEL_HPP_
#define T2T_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace t2t {

// Worker count from T2T_THREADS: unset or 0 means one per hardware thread.
// Throws ConfigError for a value that is not a non-negative integer.
int ThreadCount();

// Runs fn(0) .. fn(n - 1) on up to `threads` workers (0 = ThreadCount()).
// Indices are claimed in increasing order; after a failure no new indices are
// started, and the exception of the smallest failing index is rethrown, so
// the reported error does not depend on scheduling.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace t2t

#endif  // T2T_PARALLEL_HPP_
