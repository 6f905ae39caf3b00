/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "fairhead/common/parallel.h"

#include <atomic>

namespace fairhead {
namespace {
std::atomic<int> g_default_threads{0};
thread_local bool t_in_worker = false;
}  // namespace

void SetDefaultThreads(int threads) {
  g_default_threads.store(threads < 0 ? 0 : threads);
}

int DefaultThreads() {
  const int configured = g_default_threads.load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int ResolveThreads(int requested) {
  if (t_in_worker) return 1;
  return requested > 0 ? requested : DefaultThreads();
}

namespace internal {
WorkerScope::WorkerScope() : previous_(t_in_worker) { t_in_worker = true; }
WorkerScope::~WorkerScope() { t_in_worker = previous_; }
}  // namespace internal

}  // namespace fairhead
