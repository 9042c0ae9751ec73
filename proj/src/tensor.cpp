#include "rescal/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace rescal {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

void check_relation(const SparseAdjacencyTensor& t, Index k) {
  if (k < 0 || k >= t.n_relations()) {
    throw IndexError("relation index " + std::to_string(k) + " out of range [0, " +
                     std::to_string(t.n_relations()) + ")");
  }
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) {
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(v >> (8 * b));
  fnv_bytes(h, buf, 8);
}

void fnv_string(std::uint64_t& h, const std::string& s) {
  fnv_u64(h, s.size());
  fnv_bytes(h, s.data(), s.size());
}

}  // namespace

SparseAdjacencyTensor::SparseAdjacencyTensor(Index n_entities, Index n_relations,
                                             std::vector<std::vector<Coord>> slices)
    : n_entities_(n_entities), n_relations_(n_relations), slices_(std::move(slices)) {
  if (n_entities < 0 || n_relations < 0) throw IndexError("negative tensor dimension");
  if (static_cast<Index>(slices_.size()) != n_relations) {
    throw IndexError("expected " + std::to_string(n_relations) + " slices, got " +
                     std::to_string(slices_.size()));
  }
  for (auto& s : slices_) {
    for (const auto& c : s) {
      if (c.row < 0 || c.row >= n_entities || c.col < 0 || c.col >= n_entities) {
        throw IndexError("coordinate (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                         ") out of range for N = " + std::to_string(n_entities));
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

std::span<const Coord> SparseAdjacencyTensor::slice(Index k) const {
  check_relation(*this, k);
  return slices_[static_cast<std::size_t>(k)];
}

Index SparseAdjacencyTensor::nnz() const {
  Index total = 0;
  for (const auto& s : slices_) total += static_cast<Index>(s.size());
  return total;
}

bool SparseAdjacencyTensor::contains(Index i, Index j, Index k) const {
  const auto s = slice(k);
  return std::binary_search(s.begin(), s.end(), Coord{i, j});
}

LabeledTensor from_triples(std::span<const Triple> triples) {
  LabeledTensor out;
  std::vector<std::vector<Coord>> slices;
  std::size_t record = 0;
  for (const auto& t : triples) {
    const auto s = trim(t.subject);
    const auto r = trim(t.relation);
    const auto o = trim(t.object);
    if (s.empty() || r.empty() || o.empty()) {
      throw ParseError("triple #" + std::to_string(record) + " (\"" + t.subject + "\", \"" +
                       t.relation + "\", \"" + t.object + "\") has an empty label");
    }
    const Index i = out.entities.intern(s);
    const Index k = out.relations.intern(r);
    const Index j = out.entities.intern(o);
    if (static_cast<Index>(slices.size()) <= k) slices.resize(static_cast<std::size_t>(k) + 1);
    slices[static_cast<std::size_t>(k)].push_back({i, j});
    ++record;
  }
  out.tensor = SparseAdjacencyTensor(out.entities.size(), out.relations.size(), std::move(slices));
  return out;
}

std::vector<Triple> to_triples(const LabeledTensor& data) {
  std::vector<Triple> out;
  out.reserve(static_cast<std::size_t>(data.tensor.nnz()));
  for (Index k = 0; k < data.tensor.n_relations(); ++k) {
    for (const auto& c : data.tensor.slice(k)) {
      out.push_back({data.entities.label(c.row), data.relations.label(k),
                     data.entities.label(c.col)});
    }
  }
  return out;
}

SparseAdjacencyTensor mask_cells(const SparseAdjacencyTensor& tensor,
                                 std::span<const Cell> cells) {
  const Index n = tensor.n_entities();
  const Index kk = tensor.n_relations();
  std::vector<std::vector<Coord>> removed(static_cast<std::size_t>(kk));
  for (const auto& c : cells) {
    if (c.i < 0 || c.i >= n || c.j < 0 || c.j >= n || c.k < 0 || c.k >= kk) {
      throw IndexError("masked cell (" + std::to_string(c.i) + ", " + std::to_string(c.j) + ", " +
                       std::to_string(c.k) + ") out of range");
    }
    removed[static_cast<std::size_t>(c.k)].push_back({c.i, c.j});
  }
  std::vector<std::vector<Coord>> slices(static_cast<std::size_t>(kk));
  for (Index k = 0; k < kk; ++k) {
    auto& drop = removed[static_cast<std::size_t>(k)];
    std::sort(drop.begin(), drop.end());
    const auto keep = tensor.slice(k);
    auto& dst = slices[static_cast<std::size_t>(k)];
    std::set_difference(keep.begin(), keep.end(), drop.begin(), drop.end(),
                        std::back_inserter(dst));
  }
  return SparseAdjacencyTensor(n, kk, std::move(slices));
}

void check_dense_cap(Index n_entities, Index dense_cap) {
  if (n_entities > dense_cap) {
    throw ResourceLimitError("dense slice materialization needs N = " +
                             std::to_string(n_entities) + " <= dense cap " +
                             std::to_string(dense_cap));
  }
}

std::vector<Triple> read_triples(std::istream& in, std::string_view source) {
  std::vector<Triple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty() || view.front() == '#') continue;
    const auto t1 = view.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : view.find('\t', t1 + 1);
    if (t1 == std::string_view::npos || t2 == std::string_view::npos ||
        view.find('\t', t2 + 1) != std::string_view::npos) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) +
                       ": expected 3 TAB-separated fields");
    }
    Triple t{std::string(trim(view.substr(0, t1))),
             std::string(trim(view.substr(t1 + 1, t2 - t1 - 1))),
             std::string(trim(view.substr(t2 + 1)))};
    if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": empty label");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Triple> read_triple_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open triple file '" + path + "'");
  return read_triples(in, path);
}

void write_triples(std::ostream& out, std::span<const Triple> triples) {
  for (const auto& t : triples) out << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
}

template <class Tag>
void write_dictionary(std::ostream& out, const LabelDictionary<Tag>& dict) {
  for (Index i = 0; i < dict.size(); ++i) out << i << '\t' << dict.label(i) << '\n';
}

template <class Tag>
LabelDictionary<Tag> read_dictionary(std::istream& in, std::string_view source) {
  LabelDictionary<Tag> dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    Index idx = -1;
    const auto* first = line.data();
    const auto* last = tab == std::string::npos ? first : first + tab;
    auto [ptr, ec] = std::from_chars(first, last, idx);
    if (tab == std::string::npos || ec != std::errc{} || ptr != last) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) +
                       ": expected `index<TAB>label`");
    }
    const auto label = line.substr(tab + 1);
    if (idx != dict.size() || label.empty() || dict.find(label) >= 0) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) +
                       ": indices must be dense, ordered, and labels unique");
    }
    dict.intern(label);
  }
  return dict;
}

template void write_dictionary(std::ostream&, const EntityDictionary&);
template void write_dictionary(std::ostream&, const RelationDictionary&);
template EntityDictionary read_dictionary<EntityTag>(std::istream&, std::string_view);
template RelationDictionary read_dictionary<RelationTag>(std::istream&, std::string_view);

std::uint64_t dataset_checksum(const LabeledTensor& data) {
  std::uint64_t h = kFnvOffset;
  fnv_u64(h, static_cast<std::uint64_t>(data.entities.size()));
  for (const auto& l : data.entities.labels()) fnv_string(h, l);
  fnv_u64(h, static_cast<std::uint64_t>(data.relations.size()));
  for (const auto& l : data.relations.labels()) fnv_string(h, l);
  for (Index k = 0; k < data.tensor.n_relations(); ++k) {
    fnv_u64(h, static_cast<std::uint64_t>(data.tensor.nnz(k)));
    for (const auto& c : data.tensor.slice(k)) {
      fnv_u64(h, static_cast<std::uint64_t>(c.row));
      fnv_u64(h, static_cast<std::uint64_t>(c.col));
    }
  }
  return h;
}

}  // namespace rescal
