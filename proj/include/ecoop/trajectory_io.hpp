// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ecoop/model.hpp"

namespace ecoop {

/// Header `t,E1,E2,w1,w2,c1,c2,d1,d2,x12,x21,s1,s2`; row t carries the
/// storage level at the start of slot t, and a final row t=N carries
/// s(N) only. A trailing `case` column is written when labels are given.
void write_trajectory(std::ostream& out, const NetEnergyProfile& profile, const Trajectory& traj,
                      const std::vector<std::string>* cases = nullptr);
void save_trajectory(const std::string& path, const NetEnergyProfile& profile,
                     const Trajectory& traj, const std::vector<std::string>* cases = nullptr);

/// Inverse of write_trajectory (the case column, if any, is ignored).
Trajectory read_trajectory(std::istream& in, NetEnergyProfile* profile = nullptr);

}  // namespace ecoop
