#ifndef KHOP_UTIL_H_
#define KHOP_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

namespace khop {

// 64-bit FNV-1a. Stable across platforms; used for sample ids and manifests.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes);
  Fnv1a& add(std::uint64_t v);
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t splitmix64(std::uint64_t x);
std::string hex64(std::uint64_t v);

using Rng = std::mt19937_64;

// Uniform integer in [0, n). The standard distributions are
// implementation-defined, which would make output differ across toolchains.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
// Uniform real in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

// True when `phrase` occurs in `text` bounded by non-word characters.
bool mentions_phrase(std::string_view text, std::string_view phrase);

// KHOP_THREADS if set and positive, else hardware concurrency (at least 1).
std::size_t worker_count();

// FNV-1a digest of a file's bytes. Throws std::runtime_error if unreadable.
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace khop

#endif  // KHOP_UTIL_H_
