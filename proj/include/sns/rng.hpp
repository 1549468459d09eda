#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace sns {

/// Derives a 64-bit seed for substream (name, index) of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0);

/// Explicitly seeded random stream. Every consumer of randomness owns one;
/// there is no global generator. Distributions come from Boost.Random, whose
/// algorithms are fixed, so a given seed yields the same numbers everywhere.
class RngStream {
 public:
  RngStream(std::uint64_t root, std::string_view name, std::uint64_t index = 0)
      : engine_(derive_seed(root, name, index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace sns
