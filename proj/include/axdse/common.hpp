#pragma once

#include <atomic>
#include <cstdint>
#include <charconv>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace axdse {

// Error raised for bad user input (files, arguments, malformed data).
// Everything else (std::runtime_error, assertions) signals an internal bug.
class UserError : public std::runtime_error {
 public:
  explicit UserError(const std::string& msg) : std::runtime_error(msg) {}
};

// Process-wide worker cap. 0 means hardware concurrency.
inline std::atomic<unsigned>& thread_limit() {
  static std::atomic<unsigned> limit{0};
  return limit;
}

inline unsigned worker_count() {
  unsigned limit = thread_limit().load();
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return limit == 0 ? hw : std::min(limit, hw);
}

// Runs fn(i) for i in [0, n). fn must only touch state owned by index i,
// which keeps results independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failed.exchange(true)) error = std::current_exception();
        break;
      }
    }
  };
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// splitmix64; used to derive independent seeds for parallel work items.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t s = root ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  return splitmix64(s);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Shortest round-trip decimal form; keeps CSV output reproducible.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) throw UserError("bad numeric field: '" + std::string(s) + "'");
  return v;
}

}  // namespace axdse
