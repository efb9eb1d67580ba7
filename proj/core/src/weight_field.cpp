#include "betatails/lpp.hpp"
#include "betatails/rng.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace betatails::lpp {

namespace {

constexpr int kTileBits = 6;
constexpr std::int64_t kTile = std::int64_t{1} << kTileBits;

// Keeps field keys apart from the keys RngStream uses for the same integer seed.
std::uint64_t field_key(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double quantized_exponential(std::uint64_t bits) {
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  const double e = -std::log(u);
  return (std::floor(e * 0x1.0p30) + 0.5) * 0x1.0p-30;
}

// Both weights of the column pair (2q, 2q + 1) in row i come from one Philox block.
std::array<double, 2> exponential_pair(std::uint64_t key, std::int64_t i, std::int64_t q) {
  const auto ui = static_cast<std::uint64_t>(i);
  const auto uq = static_cast<std::uint64_t>(q);
  const auto out = rng::philox4x32(
      {static_cast<std::uint32_t>(ui), static_cast<std::uint32_t>(ui >> 32), static_cast<std::uint32_t>(uq),
       static_cast<std::uint32_t>(uq >> 32)},
      {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  return {quantized_exponential((static_cast<std::uint64_t>(out[1]) << 32) | out[0]),
          quantized_exponential((static_cast<std::uint64_t>(out[3]) << 32) | out[2])};
}

constexpr int kBatch = 8;

// kBatch consecutive column pairs q0 .. q0 + kBatch - 1; the same values as exponential_pair,
// laid out so independent Philox blocks can be interleaved by the compiler.
void exponential_pairs(std::uint64_t key, std::int64_t i, std::int64_t q0, std::array<std::array<double, 2>, kBatch>& out) {
  const auto ui = static_cast<std::uint64_t>(i);
  std::uint32_t x0[kBatch], x1[kBatch], x2[kBatch], x3[kBatch];
  for (int b = 0; b < kBatch; ++b) {
    const auto uq = static_cast<std::uint64_t>(q0 + b);
    x0[b] = static_cast<std::uint32_t>(ui);
    x1[b] = static_cast<std::uint32_t>(ui >> 32);
    x2[b] = static_cast<std::uint32_t>(uq);
    x3[b] = static_cast<std::uint32_t>(uq >> 32);
  }
  std::uint32_t k0 = static_cast<std::uint32_t>(key), k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    for (int b = 0; b < kBatch; ++b) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * x0[b];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * x2[b];
      const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1[b] ^ k0;
      const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3[b] ^ k1;
      x1[b] = static_cast<std::uint32_t>(p1);
      x3[b] = static_cast<std::uint32_t>(p0);
      x0[b] = n0;
      x2[b] = n2;
    }
  }
  for (int b = 0; b < kBatch; ++b) {
    out[static_cast<std::size_t>(b)] = {quantized_exponential((static_cast<std::uint64_t>(x1[b]) << 32) | x0[b]),
                                        quantized_exponential((static_cast<std::uint64_t>(x3[b]) << 32) | x2[b])};
  }
}

double exponential_at(std::uint64_t key, std::int64_t i, std::int64_t j) {
  return exponential_pair(key, i, j >> 1)[static_cast<std::size_t>(j & 1)];
}

struct TileKey {
  std::int64_t ti, tj;
  bool operator==(const TileKey&) const = default;
};

struct TileKeyHash {
  std::size_t operator()(const TileKey& k) const {
    return std::hash<std::int64_t>{}(k.ti * 0x9E3779B97F4A7C15ll ^ k.tj);
  }
};

}  // namespace

struct WeightField::TileCache {
  std::mutex mutex;
  std::unordered_map<TileKey, std::shared_ptr<const std::vector<double>>, TileKeyHash> tiles;
  std::deque<TileKey> order;
  std::size_t capacity = 256;
  std::filesystem::path dir;  // empty: memory only
  std::string tag;
};

double exponential_weight(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return exponential_at(field_key(seed), i, j);
}

LatticeCoords to_lattice(Vertex v) { return {phi(v), psi(v)}; }

Vertex LatticeCoords::to_vertex() const {
  if ((phi + psi) % 2 != 0) throw std::invalid_argument("LatticeCoords: phi + psi must be even");
  return {(phi + psi) / 2, (phi - psi) / 2};
}

WeightField WeightField::exponential(std::uint64_t seed) { return exponential(seed, Options{}); }

WeightField WeightField::exponential(std::uint64_t seed, Options options) {
  WeightField f;
  f.seed_ = seed;
  f.half_space_ = options.half_space;
  f.zero_diagonal_ = options.zero_diagonal;
  f.cache_ = std::make_shared<TileCache>();
  f.cache_->capacity = std::max<std::size_t>(1, options.cache_tiles);
  if (const char* dir = std::getenv("BETA_TAILS_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    f.cache_->dir = dir;
    char tag[64];
    std::snprintf(tag, sizeof tag, "%016llx_%d%d", static_cast<unsigned long long>(seed), options.half_space ? 1 : 0,
                  options.zero_diagonal ? 1 : 0);
    f.cache_->tag = tag;
  }
  return f;
}

WeightField WeightField::custom(std::function<double(Vertex)> fn, bool half_space) {
  if (!fn) throw std::invalid_argument("WeightField::custom: empty function");
  WeightField f;
  f.custom_ = std::move(fn);
  f.half_space_ = half_space;
  return f;
}

WeightField WeightField::from_grid(std::vector<std::vector<double>> rows, bool half_space) {
  auto grid = std::make_shared<const std::vector<std::vector<double>>>(std::move(rows));
  return custom(
      [grid](Vertex v) {
        if (v.x < 0 || v.y < 0 || v.x >= static_cast<std::int64_t>(grid->size())) return 0.0;
        const auto& row = (*grid)[static_cast<std::size_t>(v.x)];
        return v.y < static_cast<std::int64_t>(row.size()) ? row[static_cast<std::size_t>(v.y)] : 0.0;
      },
      half_space);
}

double WeightField::raw(std::int64_t i, std::int64_t j) const {
  if (custom_) return custom_({i, j});
  if (half_space_) {
    if (i == j && zero_diagonal_) return 0.0;
    if (i > j) std::swap(i, j);
  }
  return exponential_at(field_key(seed_), i, j);
}

double WeightField::weight(Vertex v) const {
  if (custom_) return custom_(v);
  const TileKey key{v.x >> kTileBits, v.y >> kTileBits};
  const std::size_t offset = static_cast<std::size_t>((v.x & (kTile - 1)) * kTile + (v.y & (kTile - 1)));
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->tiles.find(key); it != cache_->tiles.end()) return (*it->second)[offset];
  }
  // Fill outside the lock; two threads may both compute the same tile, which is harmless.
  auto tile = std::make_shared<std::vector<double>>(static_cast<std::size_t>(kTile * kTile));
  bool loaded = false;
  std::filesystem::path file;
  if (!cache_->dir.empty()) {
    file = cache_->dir / ("tile_" + cache_->tag + "_" + std::to_string(key.ti) + "_" + std::to_string(key.tj) + ".bin");
    std::ifstream in(file, std::ios::binary);
    if (in) {
      in.read(reinterpret_cast<char*>(tile->data()), static_cast<std::streamsize>(tile->size() * sizeof(double)));
      loaded = in.gcount() == static_cast<std::streamsize>(tile->size() * sizeof(double));
    }
  }
  if (!loaded) {
    for (std::int64_t a = 0; a < kTile; ++a) {
      fill_row(key.ti * kTile + a, key.tj * kTile, std::span<double>(tile->data() + a * kTile, kTile));
    }
    if (!file.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(cache_->dir, ec);
      const auto tmp = file.string() + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(tile.get()));
      {
        std::ofstream out(tmp, std::ios::binary);
        out.write(reinterpret_cast<const char*>(tile->data()), static_cast<std::streamsize>(tile->size() * sizeof(double)));
      }
      std::filesystem::rename(tmp, file, ec);
      if (ec) std::filesystem::remove(tmp, ec);
    }
  }
  const double value = (*tile)[offset];
  std::lock_guard lock(cache_->mutex);
  if (cache_->tiles.emplace(key, std::move(tile)).second) {
    cache_->order.push_back(key);
    while (cache_->order.size() > cache_->capacity) {
      cache_->tiles.erase(cache_->order.front());
      cache_->order.pop_front();
    }
  }
  return value;
}

void WeightField::fill_row(std::int64_t i, std::int64_t j0, std::span<double> out) const {
  const auto len = static_cast<std::int64_t>(out.size());
  if (custom_ || half_space_) {
    for (std::int64_t k = 0; k < len; ++k) out[static_cast<std::size_t>(k)] = raw(i, j0 + k);
    return;
  }
  const std::uint64_t key = field_key(seed_);
  std::int64_t k = 0;
  if ((j0 & 1) != 0 && len > 0) {
    out[0] = exponential_pair(key, i, j0 >> 1)[1];
    k = 1;
  }
  // Whole column pairs, kBatch Philox blocks at a time.
  std::array<std::array<double, 2>, kBatch> pairs;
  for (; k + 2 * kBatch <= len; k += 2 * kBatch) {
    exponential_pairs(key, i, (j0 + k) >> 1, pairs);
    for (int b = 0; b < kBatch; ++b) {
      out[static_cast<std::size_t>(k + 2 * b)] = pairs[static_cast<std::size_t>(b)][0];
      out[static_cast<std::size_t>(k + 2 * b + 1)] = pairs[static_cast<std::size_t>(b)][1];
    }
  }
  for (; k + 1 < len; k += 2) {
    const auto pair = exponential_pair(key, i, (j0 + k) >> 1);
    out[static_cast<std::size_t>(k)] = pair[0];
    out[static_cast<std::size_t>(k + 1)] = pair[1];
  }
  if (k < len) out[static_cast<std::size_t>(k)] = exponential_pair(key, i, (j0 + k) >> 1)[0];
}

}  // namespace betatails::lpp
