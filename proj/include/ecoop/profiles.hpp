// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "ecoop/model.hpp"

namespace ecoop {

/// E1(t) = A sin(omega t), E2(t) = A sin(omega t + theta), t = t0 .. t0+N-1.
NetEnergyProfile sinusoid(double amplitude, double omega, double theta, std::size_t n_slots,
                          long t0 = 0);

/// Standard normal variates from a seeded mt19937_64 by inverse CDF:
/// u = ((x >> 11) + 0.5) * 2^-53, z = -sqrt(2) * erfc_inv(2u).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// Adds scale*z to every net energy, drawing BS 1 then BS 2 for each slot.
/// Renewable/demand components are dropped from the result.
NetEnergyProfile add_gaussian_noise(const NetEnergyProfile& profile, double scale,
                                    std::uint64_t seed);

/// CSV with header `t,E1,E2` or `t,RE1,DE1,RE2,DE2`.
NetEnergyProfile read_profile(std::istream& in);
void write_profile(const NetEnergyProfile& profile, std::ostream& out);
NetEnergyProfile load_profile(const std::string& path);
void save_profile(const NetEnergyProfile& profile, const std::string& path);

}  // namespace ecoop
