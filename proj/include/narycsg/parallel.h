#pragma once

#include "narycsg/kdtree.h"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace ncsg {

// Small work-stealing pool. Each worker owns a deque: local pushes and pops
// happen at the back, steals take from the front so the oldest (largest)
// cells migrate first. Tasks may submit further tasks and may block on
// help_until, which drains other tasks instead of sleeping, so nested
// fork-join inside a task cannot deadlock.
class WorkStealingPool {
 public:
  explicit WorkStealingPool(int workers);
  ~WorkStealingPool();

  WorkStealingPool(const WorkStealingPool&) = delete;
  WorkStealingPool& operator=(const WorkStealingPool&) = delete;

  int workers() const { return static_cast<int>(queues_.size()); }

  // Index of the pool worker running the current thread, -1 outside the pool.
  static int current_worker();

  void submit(std::function<void()> task);

  // Submits `root` and blocks the calling (external) thread until the pool is
  // quiescent: every submitted task, including ones submitted by tasks, done.
  void run(std::function<void()> root);

  // Runs queued tasks on the current thread until pred() holds. Used by tasks
  // waiting for chunks they fanned out.
  void help_until(const std::function<bool()>& pred);

 private:
  struct Queue {
    std::mutex mu;
    std::deque<std::function<void()>> q;
  };

  bool try_run_one();
  void worker_main(int id);

  std::vector<std::unique_ptr<Queue>> queues_;
  std::vector<std::thread> threads_;
  std::mutex idle_mu_;
  std::condition_variable cv_;
  std::atomic<int64_t> outstanding_{0};  // submitted, not yet finished
  std::atomic<int64_t> queued_{0};       // sitting in a deque right now
  std::atomic<bool> stop_{false};

  static thread_local int tls_worker_;
};

// 0 means one worker per hardware thread.
int resolve_worker_count(int requested);

// Concatenates per-task vertex lists and brings them to canonical order.
// A repeated provenance means two tasks claimed the same vertex, which the
// half-open cell convention rules out, so that throws.
std::vector<FinalVertex> merge_results(std::vector<std::vector<FinalVertex>>&& parts);

// Parallel exploration. Equal vertex set, stats and error counts as
// kd_vertices for every worker count; with workers <= 1 it runs the
// sequential path directly.
KdResult explore_parallel(const std::vector<Mesh>& scene, const BoolFn& fn,
                          const ExplorationConfig& cfg, int workers, ErrorCounters& errs);

}  // namespace ncsg
