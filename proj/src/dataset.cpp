#include "mmdscan/dataset.hpp"

#include <algorithm>
#include <string>

#include "mmdscan/errors.hpp"

namespace mmdscan {

Sequence::Sequence(std::size_t m, std::size_t d, std::vector<double> coords)
    : m_(m), d_(d), coords_(std::move(coords)) {
  if (m_ < 2) {
    throw InvalidInput("a sequence needs at least 2 samples, got " + std::to_string(m_));
  }
  if (d_ < 1) throw InvalidInput("sample dimension must be >= 1");
}

Sequence Sequence::from_scalars(std::vector<double> values) {
  const std::size_t m = values.size();
  return Sequence(m, 1, std::move(values));
}

Sequence Sequence::from_points(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw InvalidInput("a sequence needs at least 2 samples, got 0");
  const std::size_t m = points.size();
  const std::size_t d = points.front().size();
  std::vector<double> coords(m * d);
  for (std::size_t j = 0; j < m; ++j) {
    if (points[j].size() != d) {
      throw InvalidInput("sample " + std::to_string(j) + " has dimension " +
                         std::to_string(points[j].size()) + ", expected " + std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) coords[c * m + j] = points[j][c];
  }
  return Sequence(m, d, std::move(coords));
}

Sequence Sequence::from_sample_major(std::span<const double> flat, std::size_t dim) {
  if (dim == 0) throw InvalidInput("sample dimension must be >= 1");
  if (flat.size() % dim != 0) {
    throw InvalidInput(std::to_string(flat.size()) + " values do not group into samples of dimension " +
                       std::to_string(dim));
  }
  const std::size_t m = flat.size() / dim;
  std::vector<double> coords(flat.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t c = 0; c < dim; ++c) coords[c * m + j] = flat[j * dim + c];
  }
  return Sequence(m, dim, std::move(coords));
}

Sequence Sequence::concat(std::span<const Sequence* const> parts) {
  if (parts.empty()) throw InvalidInput("cannot stack zero sequences");
  const std::size_t d = parts.front()->dim();
  std::size_t m = 0;
  for (const Sequence* p : parts) {
    if (p->dim() != d) throw InvalidInput("stacked sequences differ in dimension");
    m += p->size();
  }
  std::vector<double> coords(m * d);
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t offset = 0;
    for (const Sequence* p : parts) {
      const auto src = p->coords().subspan(c * p->size(), p->size());
      std::copy(src.begin(), src.end(), coords.begin() + static_cast<std::ptrdiff_t>(c * m + offset));
      offset += p->size();
    }
  }
  return Sequence(m, d, std::move(coords));
}

std::vector<double> Sequence::point(std::size_t j) const {
  std::vector<double> p(d_);
  for (std::size_t c = 0; c < d_; ++c) p[c] = at(j, c);
  return p;
}

Dataset::Dataset(std::vector<Sequence> sequences, std::optional<Sequence> reference,
                 std::optional<std::vector<std::size_t>> truth)
    : sequences_(std::move(sequences)), reference_(std::move(reference)), truth_(std::move(truth)) {
  if (sequences_.size() < 2) {
    throw InvalidInput("a dataset needs at least 2 sequences, got " +
                       std::to_string(sequences_.size()));
  }
  const std::size_t m = sequences_.front().size();
  const std::size_t d = sequences_.front().dim();
  for (std::size_t k = 0; k < sequences_.size(); ++k) {
    if (sequences_[k].size() != m || sequences_[k].dim() != d) {
      throw InvalidInput("sequence " + std::to_string(k) + " has shape " +
                         std::to_string(sequences_[k].size()) + "x" +
                         std::to_string(sequences_[k].dim()) + ", expected " + std::to_string(m) +
                         "x" + std::to_string(d));
    }
  }
  if (reference_ && (reference_->size() != m || reference_->dim() != d)) {
    throw InvalidInput("reference sequence shape does not match the dataset");
  }
  if (truth_) {
    auto& t = *truth_;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (!t.empty() && t.back() >= sequences_.size()) {
      throw InvalidInput("ground-truth index " + std::to_string(t.back()) + " out of range");
    }
  }
}

const Sequence& Dataset::reference() const {
  if (!reference_) throw InvalidState("dataset has no reference sequence");
  return *reference_;
}

void Dataset::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != sequences_.size()) {
    throw InvalidInput("expected " + std::to_string(sequences_.size()) + " labels, got " +
                       std::to_string(labels.size()));
  }
  labels_ = std::move(labels);
}

}  // namespace mmdscan
