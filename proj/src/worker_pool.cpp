#include "worker_pool.hpp"

namespace jdlab {

namespace {
std::atomic<int> g_workers{0};
}

int default_workers() {
    const int w = g_workers.load();
    if (w > 0) return w;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_default_workers(int n) { g_workers.store(n); }

} // namespace jdlab
