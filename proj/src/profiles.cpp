// SPDX-License-Identifier: Apache-2.0
#include "ecoop/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "ecoop/errors.hpp"

namespace ecoop {

NetEnergyProfile sinusoid(double amplitude, double omega, double theta, std::size_t n_slots,
                          long t0) {
  if (n_slots < 1) {
    throw ValidationError("n_slots must be at least 1");
  }
  std::vector<double> e1(n_slots), e2(n_slots);
  for (std::size_t k = 0; k < n_slots; ++k) {
    const double t = static_cast<double>(t0 + static_cast<long>(k));
    e1[k] = amplitude * std::sin(omega * t);
    e2[k] = amplitude * std::sin(omega * t + theta);
  }
  return NetEnergyProfile::from_net(std::move(e1), std::move(e2));
}

NormalStream::NormalStream(std::uint64_t seed) : engine_(seed) {}

double NormalStream::next() {
  const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

NetEnergyProfile add_gaussian_noise(const NetEnergyProfile& profile, double scale,
                                    std::uint64_t seed) {
  if (!(scale >= 0.0)) {
    throw ValidationError("noise scale must be nonnegative");
  }
  if (profile.e1.size() != profile.e2.size()) {
    throw LengthMismatch("E1 and E2 lengths differ");
  }
  if (scale == 0.0) {
    return profile;
  }
  NetEnergyProfile out = NetEnergyProfile::from_net(profile.e1, profile.e2);
  NormalStream z(seed);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out.e1[t] += scale * z.next();
    out.e2[t] += scale * z.next();
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  if (cell.empty()) {
    throw ParseError(line, "empty field");
  }
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
    throw ParseError(line, "not a finite number: '" + cell + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NetEnergyProfile read_profile(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  const bool net = header == std::vector<std::string>{"t", "E1", "E2"};
  const bool parts = header == std::vector<std::string>{"t", "RE1", "DE1", "RE2", "DE2"};
  if (!net && !parts) {
    throw ParseError(std::max<std::size_t>(lineno, 1),
                     "expected header t,E1,E2 or t,RE1,DE1,RE2,DE2");
  }
  const std::size_t width = header.size();
  std::vector<std::vector<double>> cols(width - 1);
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != width) {
      throw ParseError(lineno, "expected " + std::to_string(width) + " fields, got " +
                                   std::to_string(cells.size()));
    }
    parse_number(cells[0], lineno);
    for (std::size_t k = 1; k < width; ++k) cols[k - 1].push_back(parse_number(cells[k], lineno));
  }
  if (cols[0].empty()) {
    throw ParseError(lineno, "profile has no rows");
  }
  if (net) {
    return NetEnergyProfile::from_net(std::move(cols[0]), std::move(cols[1]));
  }
  for (const auto& col : cols) {
    for (double v : col) {
      if (v < 0.0) {
        throw ValidationError("renewable and demand energies must be nonnegative");
      }
    }
  }
  return NetEnergyProfile::from_components(std::move(cols[0]), std::move(cols[1]),
                                           std::move(cols[2]), std::move(cols[3]));
}

void write_profile(const NetEnergyProfile& profile, std::ostream& out) {
  if (profile.has_components()) {
    out << "t,RE1,DE1,RE2,DE2\n";
    for (std::size_t t = 0; t < profile.size(); ++t) {
      out << t << ',' << fmt(profile.re1[t]) << ',' << fmt(profile.de1[t]) << ','
          << fmt(profile.re2[t]) << ',' << fmt(profile.de2[t]) << '\n';
    }
    return;
  }
  out << "t,E1,E2\n";
  for (std::size_t t = 0; t < profile.size(); ++t) {
    out << t << ',' << fmt(profile.e1[t]) << ',' << fmt(profile.e2[t]) << '\n';
  }
}

NetEnergyProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open profile '" + path + "'");
  }
  return read_profile(in);
}

void save_profile(const NetEnergyProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write profile '" + path + "'");
  }
  write_profile(profile, out);
}

}  // namespace ecoop
