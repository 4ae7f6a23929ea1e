#include "folia/iterated.hpp"

#include <bit>
#include <map>
#include <memory>
#include <mutex>

namespace folia {

const Grassmann& Grassmann::get(int g) {
  if (g < 0 || g > 6) throw ConfigError("too many Grassmann generators");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Grassmann>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[g];
  if (!slot) {
    auto gr = std::make_unique<Grassmann>();
    gr->g = g;
    gr->size = 1 << g;
    gr->sign.assign(static_cast<std::size_t>(gr->size) * gr->size, 0);
    gr->grade.resize(gr->size);
    for (int S = 0; S < gr->size; ++S) {
      gr->grade[S] = std::popcount(static_cast<unsigned>(S));
      for (int T = 0; T < gr->size; ++T) {
        if (S & T) continue;
        // count pairs (i in S, j in T) with i > j
        int inv = 0;
        for (int i = 0; i < g; ++i)
          if (S >> i & 1)
            for (int j = 0; j < i; ++j)
              if (T >> j & 1) ++inv;
        gr->sign[S * gr->size + T] = inv % 2 ? -1 : 1;
      }
    }
    slot = std::move(gr);
  }
  return *slot;
}

}  // namespace folia
