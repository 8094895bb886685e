#include "fnls/parallel.hpp"

#include <atomic>
#include <thread>

namespace fnls {
namespace {
std::atomic<int> configured_threads{1};
}

void set_thread_count(int threads) { configured_threads = threads < 0 ? 1 : threads; }

int thread_count() {
  const int t = configured_threads.load();
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace fnls
