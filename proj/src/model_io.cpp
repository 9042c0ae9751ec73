#include "rescal/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

namespace rescal {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'E', 'S', 'C', 'A', 'L', 'M', 'D'};
constexpr std::uint8_t kInitUnset = 255;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  out.write(buf.data(), buf.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> buf{};
  for (int b = 0; b < 4; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  out.write(buf.data(), buf.size());
}

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw CorruptFileError(std::string("model file truncated while reading ") + what);
  }

  std::uint64_t u64(const char* what) {
    std::array<unsigned char, 8> buf{};
    bytes(reinterpret_cast<char*>(buf.data()), buf.size(), what);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return v;
  }

  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> buf{};
    bytes(reinterpret_cast<char*>(buf.data()), buf.size(), what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(buf[b]) << (8 * b);
    return v;
  }

  std::uint8_t u8(const char* what) {
    char c = 0;
    bytes(&c, 1, what);
    return static_cast<std::uint8_t>(c);
  }

  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  void matrix(MatrixX<double>& m, Index rows, Index cols, const char* what) {
    m.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = f64(what);
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

// Bounds keep a corrupt header from requesting absurd allocations.
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 31;

}  // namespace

void write_model(std::ostream& out, const FactorModel<double>& model, const Hyperparams& hp,
                 std::uint64_t dataset_checksum) {
  check_model(model);
  const Index n = model.n_entities();
  const Index r = model.rank();
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kModelFormatVersion);
  put_u64(out, static_cast<std::uint64_t>(n));
  put_u64(out, static_cast<std::uint64_t>(model.n_relations()));
  put_u64(out, static_cast<std::uint64_t>(r));
  put_u8(out, static_cast<std::uint8_t>(hp.solver));
  put_u8(out, hp.init ? static_cast<std::uint8_t>(*hp.init) : kInitUnset);
  put_u8(out, 0);
  put_u8(out, 0);
  put_f64(out, hp.lambda_a);
  put_f64(out, hp.lambda_r);
  put_f64(out, hp.tol);
  put_u64(out, static_cast<std::uint64_t>(hp.max_iter));
  put_u64(out, hp.seed);
  put_u64(out, static_cast<std::uint64_t>(hp.dense_cap));
  put_u64(out, dataset_checksum);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) put_f64(out, model.A(i, j));
  put_u64(out, static_cast<std::uint64_t>(model.n_relations()));
  for (const auto& rk : model.R)
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j) put_f64(out, rk(i, j));
  if (!out) throw Error("failed writing model stream");
}

ModelHeader read_model_header(std::istream& in) {
  Reader rd(in);
  std::array<char, 8> magic{};
  rd.bytes(magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw CorruptFileError("not a model file (bad magic)");
  ModelHeader h;
  h.version = rd.u32("version");
  if (h.version != kModelFormatVersion) {
    throw VersionMismatchError("model format version " + std::to_string(h.version) +
                               " is not supported (expected " +
                               std::to_string(kModelFormatVersion) + ")");
  }
  const auto n = rd.u64("N");
  const auto k = rd.u64("K");
  const auto r = rd.u64("rank");
  if (n > kMaxDim || k > kMaxDim || r > kMaxDim || r == 0 || n * r > kMaxDim ||
      k * r * r > kMaxDim)
    throw CorruptFileError("model header dimensions out of range");
  h.n_entities = static_cast<Index>(n);
  h.n_relations = static_cast<Index>(k);
  h.rank = static_cast<Index>(r);
  const auto solver = rd.u8("solver");
  const auto init = rd.u8("init");
  rd.u8("reserved");
  rd.u8("reserved");
  if (solver > 1 || (init > 1 && init != kInitUnset))
    throw CorruptFileError("model header has an unknown solver or init code");
  auto& hp = h.hyperparams;
  hp.solver = static_cast<Solver>(solver);
  if (init != kInitUnset) hp.init = static_cast<InitMethod>(init);
  hp.rank = h.rank;
  hp.lambda_a = rd.f64("lambda_a");
  hp.lambda_r = rd.f64("lambda_r");
  hp.tol = rd.f64("tol");
  hp.max_iter = static_cast<Index>(rd.u64("max_iter"));
  hp.seed = rd.u64("seed");
  hp.dense_cap = static_cast<Index>(rd.u64("dense_cap"));
  h.dataset_checksum = rd.u64("checksum");
  return h;
}

ModelFile read_model(std::istream& in) {
  ModelFile file;
  file.header = read_model_header(in);
  const auto& h = file.header;
  Reader rd(in);
  rd.matrix(file.model.A, h.n_entities, h.rank, "A");
  const auto slices = rd.u64("slice count");
  if (slices != static_cast<std::uint64_t>(h.n_relations)) {
    throw DimensionError("model payload holds " + std::to_string(slices) +
                         " relation matrices but the header declares K = " +
                         std::to_string(h.n_relations));
  }
  file.model.R.resize(static_cast<std::size_t>(h.n_relations));
  for (auto& rk : file.model.R) rd.matrix(rk, h.rank, h.rank, "R");
  if (!rd.at_end()) throw CorruptFileError("trailing bytes after model payload");
  check_model(file.model);
  return file;
}

void save_model(const std::string& path, const FactorModel<double>& model, const Hyperparams& hp,
                std::uint64_t dataset_checksum) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    write_model(out, model, hp, dataset_checksum);
    out.flush();
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return read_model(in);
}

}  // namespace rescal
