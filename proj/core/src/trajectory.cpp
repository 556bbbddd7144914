// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/trajectory.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace aopt {

SpaceTimeField fd_time_derivative(const SpaceTimeField& f, double dt) {
  SpaceTimeField g(f.levels, f.n);
  const int L = f.levels;
  if (L < 3) fail(ErrorKind::GridTooCoarse, "need at least 3 time levels");
  for (int i = 0; i < f.n; ++i) {
    g.at(0, i) = (-3.0 * f.at(0, i) + 4.0 * f.at(1, i) - f.at(2, i)) / (2.0 * dt);
    for (int t = 1; t < L - 1; ++t) g.at(t, i) = (f.at(t + 1, i) - f.at(t - 1, i)) / (2.0 * dt);
    g.at(L - 1, i) = (3.0 * f.at(L - 1, i) - 4.0 * f.at(L - 2, i) + f.at(L - 3, i)) / (2.0 * dt);
  }
  return g;
}

SpaceTimeField fd_time_second_derivative(const SpaceTimeField& f, double dt) {
  SpaceTimeField g(f.levels, f.n);
  const int L = f.levels;
  if (L < 4) fail(ErrorKind::GridTooCoarse, "need at least 4 time levels");
  const double dt2 = dt * dt;
  for (int i = 0; i < f.n; ++i) {
    g.at(0, i) = (2.0 * f.at(0, i) - 5.0 * f.at(1, i) + 4.0 * f.at(2, i) - f.at(3, i)) / dt2;
    for (int t = 1; t < L - 1; ++t)
      g.at(t, i) = (f.at(t + 1, i) - 2.0 * f.at(t, i) + f.at(t - 1, i)) / dt2;
    g.at(L - 1, i) =
        (2.0 * f.at(L - 1, i) - 5.0 * f.at(L - 2, i) + 4.0 * f.at(L - 3, i) - f.at(L - 4, i)) / dt2;
  }
  return g;
}

void StateTrajectory::compute_time_derivatives() {
  pbar_t = fd_time_derivative(pbar, dt);
  pbar_tt = fd_time_second_derivative(pbar, dt);
  ptil_t = fd_time_derivative(ptil, dt);
  ptil_tt = fd_time_second_derivative(ptil, dt);
}

namespace {
void put_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}
}  // namespace

void write_field_binary(const std::string& path, const SpaceTimeField& f, int nx, int nz) {
  check_shape(nx * nz == f.n, "write_field_binary");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out.write("AOPT", 4);
  put_u32(out, 1u);
  put_u32(out, static_cast<uint32_t>(f.levels));
  put_u32(out, static_cast<uint32_t>(nx));
  put_u32(out, static_cast<uint32_t>(nz));
  const char pad[12] = {0};
  out.write(pad, 12);
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
}

SpaceTimeField read_field_binary(const std::string& path, int* nx_out, int* nz_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::strncmp(magic, "AOPT", 4) != 0) fail(ErrorKind::IoError, path + ": bad magic");
  const uint32_t version = get_u32(in);
  if (version != 1u) fail(ErrorKind::IoError, path + ": unsupported version");
  const int levels = static_cast<int>(get_u32(in));
  const int nx = static_cast<int>(get_u32(in));
  const int nz = static_cast<int>(get_u32(in));
  in.seekg(32);
  SpaceTimeField f(levels, nx * nz);
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!in) fail(ErrorKind::IoError, path + ": truncated payload");
  if (nx_out) *nx_out = nx;
  if (nz_out) *nz_out = nz;
  return f;
}

void write_dump_index(const std::string& path, const std::vector<DumpEntry>& entries, double dt) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << "field,file,levels,nx,nz,dt\n";
  for (const DumpEntry& e : entries) {
    out << e.field << "," << e.file << "," << e.levels << "," << e.nx << "," << e.nz << ","
        << to17(dt) << "\n";
  }
}

}  // namespace aopt
