#include "regbf/parallel.hpp"

namespace regbf {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }

void set_default_threads(int n) { g_threads.store(std::max(1, n)); }

}  // namespace regbf
