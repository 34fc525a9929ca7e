// Copyright 2026 The tether_va Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tether_va/errors.hpp"
#include "tether_va/workspace.hpp"

namespace tva
{

namespace
{

constexpr std::array<char, 8> kMagic = {'T', 'P', 'G', 'R', 'I', 'D', '0', '1'};

static_assert(std::endian::native == std::endian::little, "binary grid I/O assumes little-endian");

template <typename T>
void put(std::ostream & out, T value)
{
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream & in, const char * field)
{
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) {
    throw ConfigError(std::string("binary grid truncated while reading ") + field);
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

VoxelGrid read_text_map(std::istream & in)
{
  double resolution = 0.25;
  Vec3 origin = Vec3::Zero();
  std::vector<std::vector<std::string>> layers;
  std::vector<std::string> current;
  std::string line;
  int line_no = 0;
  bool in_header = true;

  auto fail = [&](const std::string & msg) {
    throw ConfigError("map line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (in_header && (t.rfind("resolution", 0) == 0 || t.rfind("origin", 0) == 0)) {
      std::istringstream ss(t);
      std::string key;
      ss >> key;
      if (key == "resolution") {
        if (!(ss >> resolution) || resolution <= 0.0) {
          fail("bad resolution");
        }
      } else {
        if (!(ss >> origin.x() >> origin.y() >> origin.z())) {
          fail("bad origin");
        }
      }
      continue;
    }
    if (t.empty()) {
      if (!current.empty()) {
        layers.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    in_header = false;
    for (char ch : t) {
      if (ch != '#' && ch != '.') {
        fail(std::string("unexpected character '") + ch + "'");
      }
    }
    if (!current.empty() && t.size() != current.front().size()) {
      fail("row width differs within layer");
    }
    current.push_back(t);
  }
  if (!current.empty()) {
    layers.push_back(std::move(current));
  }
  if (layers.empty()) {
    throw ConfigError("map has no layers");
  }
  const int nz = static_cast<int>(layers.size());
  const int ny = static_cast<int>(layers.front().size());
  const int nx = static_cast<int>(layers.front().front().size());
  for (const auto & layer : layers) {
    if (static_cast<int>(layer.size()) != ny || static_cast<int>(layer.front().size()) != nx) {
      throw ConfigError("map layers have inconsistent shapes");
    }
  }
  VoxelGrid grid({nx, ny, nz}, resolution, origin);
  for (int z = 0; z < nz; ++z) {
    for (int row = 0; row < ny; ++row) {
      const int y = ny - 1 - row;
      for (int x = 0; x < nx; ++x) {
        if (layers[z][row][x] == '#') {
          grid.set_occupied({x, y, z});
        }
      }
    }
  }
  return grid;
}

VoxelGrid load_text_map(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open map file: " + path);
  }
  return read_text_map(in);
}

void write_text_map(std::ostream & out, const VoxelGrid & grid)
{
  out.precision(17);
  out << "resolution " << grid.resolution() << '\n';
  out << "origin " << grid.origin().x() << ' ' << grid.origin().y() << ' ' << grid.origin().z()
      << '\n';
  const auto & n = grid.dims();
  for (int z = 0; z < n.z(); ++z) {
    out << '\n';
    for (int y = n.y() - 1; y >= 0; --y) {
      for (int x = 0; x < n.x(); ++x) {
        out << (grid.occupied({x, y, z}) ? '#' : '.');
      }
      out << '\n';
    }
  }
}

VoxelGrid read_binary_grid(std::istream & in)
{
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ConfigError("binary grid: bad magic (expected TPGRID01)");
  }
  const auto nx = get<std::uint32_t>(in, "nx");
  const auto ny = get<std::uint32_t>(in, "ny");
  const auto nz = get<std::uint32_t>(in, "nz");
  const auto res = get<double>(in, "resolution");
  Vec3 origin;
  origin.x() = get<double>(in, "origin.x");
  origin.y() = get<double>(in, "origin.y");
  origin.z() = get<double>(in, "origin.z");
  if (nx == 0 || ny == 0 || nz == 0 || nx > (1u << 16) || ny > (1u << 16) || nz > (1u << 16)) {
    throw ConfigError("binary grid: bad dimensions");
  }
  VoxelGrid grid(
    {static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)}, res, origin);
  std::vector<char> bytes(grid.size());
  if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw ConfigError("binary grid truncated in occupancy data");
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] != 0) {
      grid.set_occupied(grid.cell_at(i));
    }
  }
  return grid;
}

VoxelGrid load_binary_grid(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open grid file: " + path);
  }
  return read_binary_grid(in);
}

void write_binary_grid(std::ostream & out, const VoxelGrid & grid)
{
  out.write(kMagic.data(), kMagic.size());
  for (int ax = 0; ax < 3; ++ax) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims()[ax]));
  }
  put<double>(out, grid.resolution());
  for (int ax = 0; ax < 3; ++ax) {
    put<double>(out, grid.origin()[ax]);
  }
  for (std::uint8_t v : grid.data()) {
    out.put(v != 0 ? 1 : 0);
  }
}

}  // namespace tva
