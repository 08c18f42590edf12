#include "parallel.hpp"

#include <cstdlib>
#include <string>

namespace pickands {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
  if (const int o = g_override.load(); o > 0) return o;
  if (const char* env = std::getenv("PICKANDS_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int threads) { g_override.store(threads > 0 ? threads : 0); }

}  // namespace pickands
