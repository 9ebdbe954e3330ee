#include "core/params.hpp"

#include <algorithm>

namespace bdp {

std::size_t ParamStore::add(const std::string& name, std::size_t rows,
                            std::size_t cols) {
  if (index_.count(name)) {
    fail(ErrorCode::InvalidArgument, "duplicate tensor name: " + name);
  }
  TensorSpec spec;
  spec.name = name;
  spec.offset = values_.size();
  spec.rows = rows;
  spec.cols = cols;
  values_.resize(values_.size() + rows * cols, 0.0);
  index_[name] = tensors_.size();
  tensors_.push_back(spec);
  return tensors_.size() - 1;
}

const TensorSpec& ParamStore::spec(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    fail(ErrorCode::NotFound, "unknown tensor: " + name);
  }
  return tensors_[it->second];
}

double* ParamStore::data(const std::string& name) {
  return values_.data() + spec(name).offset;
}

const double* ParamStore::data(const std::string& name) const {
  return values_.data() + spec(name).offset;
}

std::vector<std::pair<std::size_t, std::size_t>>
ParamStore::ranges_for_prefixes(const std::vector<std::string>& prefixes) const {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& t : tensors_) {
    const bool hit = std::any_of(
        prefixes.begin(), prefixes.end(),
        [&](const std::string& p) { return t.name.rfind(p, 0) == 0; });
    if (!hit) continue;
    if (!ranges.empty() &&
        ranges.back().first + ranges.back().second == t.offset) {
      ranges.back().second += t.size();
    } else {
      ranges.emplace_back(t.offset, t.size());
    }
  }
  return ranges;
}

}  // namespace bdp
