#include "narycsg/parallel.h"

#include <algorithm>
#include <cassert>
#include <iterator>

namespace ncsg {

thread_local int WorkStealingPool::tls_worker_ = -1;

WorkStealingPool::WorkStealingPool(int workers) {
  if (workers < 1) workers = 1;
  queues_.reserve(workers);
  for (int i = 0; i < workers; ++i) queues_.push_back(std::make_unique<Queue>());
  threads_.reserve(workers);
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this, i] { worker_main(i); });
}

WorkStealingPool::~WorkStealingPool() {
  {
    std::lock_guard<std::mutex> g(idle_mu_);
    stop_.store(true);
    cv_.notify_all();
  }
  for (std::thread& t : threads_) t.join();
}

int WorkStealingPool::current_worker() { return tls_worker_; }

void WorkStealingPool::submit(std::function<void()> task) {
  outstanding_.fetch_add(1);
  int id = tls_worker_ >= 0 ? tls_worker_ : 0;
  {
    std::lock_guard<std::mutex> g(queues_[id]->mu);
    queues_[id]->q.push_back(std::move(task));
  }
  queued_.fetch_add(1);
  {
    std::lock_guard<std::mutex> g(idle_mu_);
    cv_.notify_one();
  }
}

bool WorkStealingPool::try_run_one() {
  const int w = workers();
  const int self = tls_worker_ >= 0 ? tls_worker_ : 0;
  std::function<void()> task;
  for (int k = 0; k < w && !task; ++k) {
    Queue& qu = *queues_[(self + k) % w];
    std::lock_guard<std::mutex> g(qu.mu);
    if (qu.q.empty()) continue;
    if (k == 0) {
      task = std::move(qu.q.back());
      qu.q.pop_back();
    } else {
      task = std::move(qu.q.front());
      qu.q.pop_front();
    }
  }
  if (!task) return false;
  queued_.fetch_sub(1);
  task();
  if (outstanding_.fetch_sub(1) == 1) {
    std::lock_guard<std::mutex> g(idle_mu_);
    cv_.notify_all();
  }
  return true;
}

void WorkStealingPool::worker_main(int id) {
  tls_worker_ = id;
  while (true) {
    if (try_run_one()) continue;
    std::unique_lock<std::mutex> lk(idle_mu_);
    cv_.wait(lk, [&] { return stop_.load() || queued_.load() > 0; });
    if (stop_.load() && queued_.load() == 0) return;
  }
}

void WorkStealingPool::run(std::function<void()> root) {
  submit(std::move(root));
  std::unique_lock<std::mutex> lk(idle_mu_);
  cv_.wait(lk, [&] { return outstanding_.load() == 0; });
}

void WorkStealingPool::help_until(const std::function<bool()>& pred) {
  while (!pred()) {
    if (!try_run_one()) std::this_thread::yield();
  }
}

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<FinalVertex> merge_results(std::vector<std::vector<FinalVertex>>&& parts) {
  std::vector<FinalVertex> all;
  size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (auto& p : parts)
    all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  sort_and_check_unique(all);
  return all;
}

KdResult explore_parallel(const std::vector<Mesh>& scene, const BoolFn& fn,
                          const ExplorationConfig& cfg, int workers, ErrorCounters& errs) {
  assert(cfg.valid());
  workers = resolve_worker_count(workers);
  if (workers <= 1) return kd_vertices(scene, fn, cfg, errs);

  Box3 scene_box;
  for (const Mesh& m : scene) scene_box.expand(mesh_bbox(m));
  const double scale = scene_box.diagonal();

  struct Ctx {
    std::vector<FinalVertex> verts;
    KdStats stats;
    ErrorCounters errs;
  };
  std::vector<Ctx> ctx(workers);

  WorkStealingPool pool(workers);
  constexpr size_t kChunk = 512;  // fixed, so chunk boundaries never depend on workers

  std::function<void(KDCell&&)> process = [&](KDCell&& first) {
    Ctx& c = ctx[WorkStealingPool::current_worker()];

    // Near the root everyone would otherwise wait on one giant split, so the
    // fragment distribution fans out in fixed chunks merged back in input
    // order. Same children as the sequential split, just computed by more
    // hands.
    SplitFn chunked = [&](KDCell&& cell, KDCell& lo, KDCell& hi, KdStats& st,
                          ErrorCounters& er) {
      SplitPlane sp = choose_split(cell);
      prepare_children(cell, sp, lo, hi);
      for (int i = 0; i < cell.ind.n; ++i) {
        auto& src = cell.frags[i];
        if (src.empty()) continue;
        InputSplitResult acc;
        if (src.size() < 2 * kChunk) {
          acc = split_range(src, 0, src.size(), sp);
        } else {
          const size_t nch = (src.size() + kChunk - 1) / kChunk;
          std::vector<InputSplitResult> parts(nch);
          std::atomic<size_t> done{0};
          for (size_t k = 0; k < nch; ++k) {
            pool.submit([&, k] {
              parts[k] =
                  split_range(src, k * kChunk, std::min(src.size(), (k + 1) * kChunk), sp);
              done.fetch_add(1, std::memory_order_release);
            });
          }
          pool.help_until(
              [&] { return done.load(std::memory_order_acquire) == nch; });
          acc = std::move(parts[0]);
          for (size_t k = 1; k < nch; ++k) merge_split_results(acc, std::move(parts[k]));
        }
        src.clear();
        finish_split_input(lo, hi, i, std::move(acc), sp, scene[i], cfg.seed, scale, st, er);
      }
    };

    std::vector<KDCell> stack;
    stack.push_back(std::move(first));
    while (!stack.empty()) {
      KDCell cur = std::move(stack.back());
      stack.pop_back();
      std::pair<KDCell, KDCell> kids;
      StepResult r;
      if (cur.depth < defaults::top_parallel_levels)
        r = kd_step_with(std::move(cur), scene, fn, cfg, scale, c.verts, c.errs, c.stats, kids,
                         chunked);
      else
        r = kd_step(std::move(cur), scene, fn, cfg, scale, c.verts, c.errs, c.stats, kids);
      if (r != StepResult::Split) continue;
      for (KDCell* kid : {&kids.second, &kids.first}) {
        if (kid->total_frags() >= static_cast<size_t>(cfg.seq_threshold))
          pool.submit(
              [&process, cellk = std::move(*kid)]() mutable { process(std::move(cellk)); });
        else
          stack.push_back(std::move(*kid));
      }
    }
  };

  pool.run([&] { process(make_root_cell(scene)); });

  KdResult res;
  std::vector<std::vector<FinalVertex>> parts;
  parts.reserve(workers);
  for (Ctx& c : ctx) {
    parts.push_back(std::move(c.verts));
    res.stats += c.stats;
    errs += c.errs;
  }
  res.verts = merge_results(std::move(parts));
  return res;
}

}  // namespace ncsg
