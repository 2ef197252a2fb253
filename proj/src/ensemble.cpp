#include "ergo/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ergo {

namespace {
constexpr char kMagic[4] = {'E', 'R', 'G', 'O'};
constexpr uint32_t kVersion = 1;

void ensure(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}
}  // namespace

Ensemble::Ensemble(std::size_t n, int dim, Constraint c)
    : data_(n * std::size_t(dim), 0.0), base_(dim, 0.0), dim_(dim), constraint_(c) {
  ensure(dim >= 1, "ensemble dim must be positive");
}

void Ensemble::set_base_point(std::vector<double> x0) {
  ensure(int(x0.size()) == dim_, "base point dimension mismatch");
  base_ = std::move(x0);
}

void Ensemble::validate() const {
  ensure(dim_ >= 1, "ensemble dim must be positive");
  ensure(!data_.empty(), "ensemble must hold at least one point");
  ensure(data_.size() % dim_ == 0, "ensemble storage not a multiple of dim");
  for (double v : data_) {
    ensure(std::isfinite(v), "ensemble contains a non-finite coordinate");
  }
  if (constraint_ == Constraint::kNonnegativeOrthant) {
    for (double v : data_) ensure(v >= 0.0, "nonnegative-orthant constraint violated");
  }
}

void write_csv(const Ensemble& e, std::ostream& out) {
  char buf[40];
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto pt = e.point(i);
    for (int j = 0; j < e.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pt[j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Ensemble read_csv(std::istream& in) {
  std::vector<double> values;
  int dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int cols = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    if (dim == 0) dim = cols;
    ensure(cols == dim, "csv rows have inconsistent column counts");
  }
  ensure(dim > 0 && !values.empty(), "csv holds no points");
  Ensemble e(values.size() / dim, dim);
  e.data() = std::move(values);
  return e;
}

void write_checkpoint(const Ensemble& e, double p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  ensure(bool(out), "cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  const uint32_t version = kVersion;
  const uint32_t dim = uint32_t(e.dim());
  const uint64_t n = e.size();
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&p), 8);
  out.write(reinterpret_cast<const char*>(e.data().data()),
            std::streamsize(e.data().size() * sizeof(double)));
  ensure(bool(out), "checkpoint write failed: " + path);
}

Ensemble read_checkpoint(const std::string& path, double* p_out) {
  std::ifstream in(path, std::ios::binary);
  ensure(bool(in), "cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  ensure(bool(in) && std::memcmp(magic, kMagic, 4) == 0, "bad checkpoint magic: " + path);
  uint32_t version = 0, dim = 0;
  uint64_t n = 0;
  double p = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&p), 8);
  ensure(version == kVersion, "unsupported checkpoint version");
  ensure(dim >= 1 && n >= 1, "empty checkpoint");
  Ensemble e(n, int(dim));
  in.read(reinterpret_cast<char*>(e.data().data()),
          std::streamsize(e.data().size() * sizeof(double)));
  ensure(bool(in), "checkpoint truncated: " + path);
  if (p_out) *p_out = p;
  return e;
}

Ensemble load_ensemble(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") {
    return read_checkpoint(path);
  }
  std::ifstream in(path);
  ensure(bool(in), "cannot open ensemble file: " + path);
  return read_csv(in);
}

}  // namespace ergo
