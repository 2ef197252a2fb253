#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ergo {

enum class Constraint { kUnconstrained, kNonnegativeOrthant };

// Equal-weight empirical measure: N points in R^dim, stored row-major,
// with a base point x0 for pseudo-norms and an optional domain constraint.
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t n, int dim, Constraint c = Constraint::kUnconstrained);

  std::size_t size() const { return dim_ ? data_.size() / dim_ : 0; }
  int dim() const { return dim_; }
  Constraint constraint() const { return constraint_; }

  std::span<double> point(std::size_t i) { return {data_.data() + i * dim_, std::size_t(dim_)}; }
  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, std::size_t(dim_)};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  const std::vector<double>& base_point() const { return base_; }
  void set_base_point(std::vector<double> x0);

  // N >= 1, finite entries, per-point dimension, constraint respected.
  void validate() const;

  bool operator==(const Ensemble& other) const = default;

 private:
  std::vector<double> data_;
  std::vector<double> base_;
  int dim_ = 0;
  Constraint constraint_ = Constraint::kUnconstrained;
};

// CSV: one point per row, columns are coordinates.
void write_csv(const Ensemble& e, std::ostream& out);
Ensemble read_csv(std::istream& in);

// Binary checkpoint: magic "ERGO", version u32, dim u32, N u64, p f64,
// then N*dim little-endian f64 values.
void write_checkpoint(const Ensemble& e, double p, const std::string& path);
Ensemble read_checkpoint(const std::string& path, double* p_out = nullptr);

Ensemble load_ensemble(const std::string& path);  // dispatch on .bin/.csv

}  // namespace ergo
