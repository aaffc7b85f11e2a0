#include "monotone/seeding.hpp"

namespace monotone {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t master, std::uint64_t run_index) noexcept {
  return splitmix64(splitmix64(master) ^ (run_index * 0xD1B54A32D192ED03ULL));
}

std::uint64_t stream_seed(std::uint64_t run, Stream stream) noexcept {
  return splitmix64(run ^ splitmix64(static_cast<std::uint64_t>(stream) * 0xA24BAED4963EE407ULL));
}

std::uint64_t stream_seed(std::uint64_t run, Stream stream, std::string_view tag) noexcept {
  // FNV-1a over the tag
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return splitmix64(stream_seed(run, stream) ^ h);
}

}  // namespace monotone
