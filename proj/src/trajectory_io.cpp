// SPDX-License-Identifier: Apache-2.0
#include "ecoop/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ecoop/errors.hpp"

namespace ecoop {

namespace {

constexpr const char* kHeader = "t,E1,E2,w1,w2,c1,c2,d1,d2,x12,x21,s1,s2";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory(std::ostream& out, const NetEnergyProfile& profile, const Trajectory& traj,
                      const std::vector<std::string>* cases) {
  const std::size_t n = traj.size();
  if (profile.size() != n || traj.states.size() != n + 1) {
    throw LengthMismatch("trajectory and profile lengths differ");
  }
  if (cases && cases->size() != n) {
    throw LengthMismatch("one case label per slot required");
  }
  out << kHeader << (cases ? ",case" : "") << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    const ControlAction& a = traj.actions[t];
    out << t << ',' << fmt(profile.e1[t]) << ',' << fmt(profile.e2[t]);
    for (double v : {a.w[0], a.w[1], a.c[0], a.c[1], a.d[0], a.d[1], a.x12, a.x21}) {
      out << ',' << fmt(v);
    }
    out << ',' << fmt(traj.states[t][0]) << ',' << fmt(traj.states[t][1]);
    if (cases) out << ',' << (*cases)[t];
    out << '\n';
  }
  out << n << ",,,,,,,,,," << ',' << fmt(traj.states[n][0]) << ',' << fmt(traj.states[n][1]);
  if (cases) out << ',';
  out << '\n';
}

void save_trajectory(const std::string& path, const NetEnergyProfile& profile,
                     const Trajectory& traj, const std::vector<std::string>* cases) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write trajectory '" + path + "'");
  }
  write_trajectory(out, profile, traj, cases);
}

Trajectory read_trajectory(std::istream& in, NetEnergyProfile* profile) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0) {
    throw ParseError(lineno, "missing trajectory header");
  }
  Trajectory traj;
  std::vector<double> e1, e2;
  bool final_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (final_seen) {
      throw ParseError(lineno, "rows after the final state row");
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() < 13) {
      throw ParseError(lineno, "expected at least 13 fields");
    }
    auto num = [&](std::size_t k) {
      char* end = nullptr;
      const double v = std::strtod(cells[k].c_str(), &end);
      if (cells[k].empty() || end != cells[k].c_str() + cells[k].size() || !std::isfinite(v)) {
        throw ParseError(lineno, "bad number in column " + std::to_string(k + 1));
      }
      return v;
    };
    StorageState s;
    s[0] = num(11);
    s[1] = num(12);
    traj.states.push_back(s);
    if (cells[3].empty()) {
      final_seen = true;
      continue;
    }
    e1.push_back(num(1));
    e2.push_back(num(2));
    ControlAction a;
    a.w = {num(3), num(4)};
    a.c = {num(5), num(6)};
    a.d = {num(7), num(8)};
    a.x12 = num(9);
    a.x21 = num(10);
    traj.actions.push_back(a);
  }
  if (!final_seen) {
    throw ParseError(lineno, "missing final state row");
  }
  if (profile) *profile = NetEnergyProfile::from_net(std::move(e1), std::move(e2));
  return traj;
}

}  // namespace ecoop
