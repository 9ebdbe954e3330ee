#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace bdp {

struct TensorSpec {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;  // cols == 1 for vectors

  std::size_t size() const { return rows * cols; }
};

// All learnable parameters of a model live in one contiguous 64-bit vector.
// Tensors are registered in a fixed order, so the flat layout (and with it
// optimizer state, checkpoints and gradient indexing) is deterministic.
class ParamStore {
 public:
  std::size_t add(const std::string& name, std::size_t rows,
                  std::size_t cols);

  const TensorSpec& spec(std::size_t idx) const { return tensors_[idx]; }
  const TensorSpec& spec(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  std::size_t tensor_count() const { return tensors_.size(); }
  std::size_t total_size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  double* data(const std::string& name);
  const double* data(const std::string& name) const;

  // Contiguous [offset, len) ranges covering every tensor whose name starts
  // with one of the prefixes; adjacent ranges are merged.
  std::vector<std::pair<std::size_t, std::size_t>> ranges_for_prefixes(
      const std::vector<std::string>& prefixes) const;

  const std::vector<TensorSpec>& tensors() const { return tensors_; }

 private:
  std::vector<double> values_;
  std::vector<TensorSpec> tensors_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace bdp
