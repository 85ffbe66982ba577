#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace vpsrom {

// Static-chunked loop over [0, n). Exceptions from workers are rethrown on the
// calling thread; the first one wins.
template <class F>
void parallel_for(int n, int workers, F&& f)
{
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) f(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace vpsrom
