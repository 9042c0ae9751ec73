#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "rescal/model.hpp"

namespace rescal {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Metadata stored ahead of the factor payload.
struct ModelHeader {
  std::uint32_t version = kModelFormatVersion;
  Index n_entities = 0;
  Index n_relations = 0;
  Index rank = 0;
  Hyperparams hyperparams;
  std::uint64_t dataset_checksum = 0;

  friend bool operator==(const ModelHeader&, const ModelHeader&) = default;
};

struct ModelFile {
  ModelHeader header;
  FactorModel<double> model;
};

// Layout (all multi-byte values little-endian):
//   "RESCALMD" | u32 version | u64 N, K, r | u8 solver, u8 init (255 = unset),
//   u16 zero | f64 lambda_a, lambda_r, tol | u64 max_iter, seed, dense_cap,
//   checksum | f64[N*r] A row-major | u64 slice count | f64[r*r] per R_k
// The file ends exactly after the last slice.

void write_model(std::ostream& out, const FactorModel<double>& model, const Hyperparams& hp,
                 std::uint64_t dataset_checksum);
ModelFile read_model(std::istream& in);
/// Reads only the header block.
ModelHeader read_model_header(std::istream& in);

/// Writes to a temporary sibling and renames it over `path`.
void save_model(const std::string& path, const FactorModel<double>& model, const Hyperparams& hp,
                std::uint64_t dataset_checksum);
ModelFile load_model(const std::string& path);

}  // namespace rescal
