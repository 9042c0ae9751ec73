#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "rescal/error.hpp"

namespace rescal {

using Index = Eigen::Index;

/// Largest entity count for which an N x N slice may be materialized densely.
inline constexpr Index kDefaultDenseCap = 5000;

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Bidirectional label <-> dense index map. Indices are assigned in insertion
/// order and never reused.
template <class Tag>
class LabelDictionary {
 public:
  LabelDictionary() = default;

  /// Returns the index of `label`, inserting it if unseen.
  Index intern(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    const auto idx = static_cast<Index>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), idx);
    return idx;
  }

  /// Index of `label`, or -1 when absent.
  [[nodiscard]] Index find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    return it == index_.end() ? -1 : it->second;
  }

  [[nodiscard]] const std::string& label(Index idx) const {
    if (idx < 0 || idx >= size()) {
      throw IndexError("label index " + std::to_string(idx) + " out of range [0, " +
                       std::to_string(size()) + ")");
    }
    return labels_[static_cast<std::size_t>(idx)];
  }

  [[nodiscard]] Index size() const { return static_cast<Index>(labels_.size()); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const LabelDictionary& a, const LabelDictionary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

struct EntityTag {};
struct RelationTag {};
using EntityDictionary = LabelDictionary<EntityTag>;
using RelationDictionary = LabelDictionary<RelationTag>;

/// Coordinate (row i, column j) of a nonzero inside one frontal slice.
struct Coord {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// Cell (i, j, k) of the N x N x K tensor.
struct Cell {
  Index i = 0;
  Index j = 0;
  Index k = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Binary N x N x K tensor stored as one sorted, duplicate-free coordinate
/// list per relation. Unstored cells are zeros.
class SparseAdjacencyTensor {
 public:
  SparseAdjacencyTensor() = default;

  /// Validates ranges and canonicalizes each slice (sort + dedupe).
  SparseAdjacencyTensor(Index n_entities, Index n_relations,
                        std::vector<std::vector<Coord>> slices);

  [[nodiscard]] Index n_entities() const { return n_entities_; }
  [[nodiscard]] Index n_relations() const { return n_relations_; }

  [[nodiscard]] std::span<const Coord> slice(Index k) const;
  [[nodiscard]] Index nnz(Index k) const { return static_cast<Index>(slice(k).size()); }
  [[nodiscard]] Index nnz() const;
  [[nodiscard]] bool contains(Index i, Index j, Index k) const;
  [[nodiscard]] bool contains(const Cell& c) const { return contains(c.i, c.j, c.k); }

  friend bool operator==(const SparseAdjacencyTensor&, const SparseAdjacencyTensor&) = default;

 private:
  Index n_entities_ = 0;
  Index n_relations_ = 0;
  std::vector<std::vector<Coord>> slices_;
};

/// A tensor together with the dictionaries that name its axes.
struct LabeledTensor {
  EntityDictionary entities;
  RelationDictionary relations;
  SparseAdjacencyTensor tensor;
};

/// Builds dictionaries (first-appearance order) and the canonical tensor.
/// Throws ParseError naming the record when a label is empty after trimming.
LabeledTensor from_triples(std::span<const Triple> triples);

/// Re-emits the distinct triples held by `data`, slice by slice.
std::vector<Triple> to_triples(const LabeledTensor& data);

/// Copy of `tensor` with every listed cell forced to zero.
SparseAdjacencyTensor mask_cells(const SparseAdjacencyTensor& tensor, std::span<const Cell> cells);

/// Throws ResourceLimitError when an N x N slice would exceed `dense_cap`.
void check_dense_cap(Index n_entities, Index dense_cap);

/// Dense {0,1} matrix of slice k.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_slice(
    const SparseAdjacencyTensor& tensor, Index k, Index dense_cap = kDefaultDenseCap) {
  check_dense_cap(tensor.n_entities(), dense_cap);
  const auto coords = tensor.slice(k);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(tensor.n_entities(),
                                                                  tensor.n_entities());
  for (const auto& c : coords) out(c.row, c.col) = Scalar(1);
  return out;
}

/// All K slices materialized densely.
template <typename Scalar = double>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> dense_slices(
    const SparseAdjacencyTensor& tensor, Index dense_cap = kDefaultDenseCap) {
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> out;
  out.reserve(static_cast<std::size_t>(tensor.n_relations()));
  for (Index k = 0; k < tensor.n_relations(); ++k)
    out.push_back(dense_slice<Scalar>(tensor, k, dense_cap));
  return out;
}

/// X_k * M without materializing X_k.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> slice_times(
    const SparseAdjacencyTensor& tensor, Index k, const Eigen::MatrixBase<Derived>& m) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          tensor.n_entities(), m.cols());
  for (const auto& c : tensor.slice(k)) out.row(c.row) += m.row(c.col);
  return out;
}

/// X_k^T * M without materializing X_k.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> slice_transpose_times(
    const SparseAdjacencyTensor& tensor, Index k, const Eigen::MatrixBase<Derived>& m) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          tensor.n_entities(), m.cols());
  for (const auto& c : tensor.slice(k)) out.row(c.col) += m.row(c.row);
  return out;
}

// Triple files: `subject<TAB>relation<TAB>object` per line, '#' comments and
// blank lines skipped.

/// `source` is used in error messages only.
std::vector<Triple> read_triples(std::istream& in, std::string_view source = "<stream>");
std::vector<Triple> read_triple_file(const std::string& path);
void write_triples(std::ostream& out, std::span<const Triple> triples);

/// Two-column TSV `index<TAB>label`.
template <class Tag>
void write_dictionary(std::ostream& out, const LabelDictionary<Tag>& dict);
/// Accepts only dense indices listed in order 0..n-1.
template <class Tag>
LabelDictionary<Tag> read_dictionary(std::istream& in, std::string_view source = "<stream>");

/// FNV-1a 64 over the dictionaries and canonical coordinates.
std::uint64_t dataset_checksum(const LabeledTensor& data);

}  // namespace rescal
