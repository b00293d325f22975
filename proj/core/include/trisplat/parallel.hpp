// Copyright 2026 The trisplat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace trisplat {

// Hardware concurrency when requested <= 0, otherwise requested.
int resolve_threads(int requested);

// Calls fn(item, worker) for every item in [0, n). Items are dealt to
// workers round-robin (worker w gets w, w + threads, ...), so the work each
// worker sees depends only on n and the thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, int)>& fn);

}  // namespace trisplat
