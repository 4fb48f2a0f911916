#pragma once

namespace vlab {

enum class Execution { Serial, Parallel };

// Worker count: explicit override, else VLAB_THREADS, else all logical cores.
int thread_count();
void set_thread_count(int n);

}  // namespace vlab
