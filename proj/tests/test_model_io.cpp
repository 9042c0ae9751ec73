#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rescal/model.hpp"
#include "rescal/model_io.hpp"

using namespace rescal;

namespace {

Hyperparams hp_for(Index rank) {
  Hyperparams hp;
  hp.rank = rank;
  hp.seed = 42;
  hp.solver = Solver::logit;
  hp.lambda_a = 0.25;
  hp.lambda_r = 1.5;
  hp.init = InitMethod::random;
  return hp;
}

std::string serialize(const FactorModel<double>& m, const Hyperparams& hp) {
  std::ostringstream out(std::ios::binary);
  write_model(out, m, hp, 0xDEADBEEFULL);
  return out.str();
}

}  // namespace

TEST_CASE("round trip is bit exact") {
  const auto hp = hp_for(3);
  auto m = init_model(5, 4, hp);
  m.A(0, 0) = -0.0;
  m.A(1, 1) = 1e-310;  // subnormal
  std::istringstream in(serialize(m, hp), std::ios::binary);
  const auto file = read_model(in);
  CHECK(file.model == m);
  CHECK(std::signbit(file.model.A(0, 0)));
  CHECK(file.header.n_entities == 5);
  CHECK(file.header.n_relations == 4);
  CHECK(file.header.rank == 3);
  CHECK(file.header.dataset_checksum == 0xDEADBEEFULL);
  CHECK(file.header.hyperparams.solver == Solver::logit);
  CHECK(file.header.hyperparams.lambda_r == 1.5);
  CHECK(file.header.hyperparams.init == InitMethod::random);
}

TEST_CASE("header is little endian") {
  const auto hp = hp_for(1);
  const auto bytes = serialize(init_model(2, 1, hp), hp);
  CHECK(bytes.substr(0, 8) == "RESCALMD");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);  // version low byte
  CHECK(bytes[9] == 0);
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // N
}

TEST_CASE("truncated file is corrupt") {
  const auto hp = hp_for(2);
  const auto bytes = serialize(init_model(4, 2, hp), hp);
  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    CHECK_THROWS_AS(read_model(in), CorruptFileError);
  }
  std::istringstream trailing(bytes + "x", std::ios::binary);
  CHECK_THROWS_AS(read_model(trailing), CorruptFileError);
}

TEST_CASE("slice count disagreeing with header K is a dimension error") {
  const auto hp = hp_for(2);
  auto m = init_model(3, 2, hp);
  auto bytes = serialize(m, hp);
  // Header declares K = 2; rewrite it to 3 while the payload holds 2 slices.
  bytes[20] = 3;
  std::istringstream in(bytes, std::ios::binary);
  CHECK_THROWS_AS(read_model(in), DimensionError);
}

TEST_CASE("version mismatch") {
  const auto hp = hp_for(1);
  auto bytes = serialize(init_model(2, 1, hp), hp);
  bytes[8] = 9;
  std::istringstream in(bytes, std::ios::binary);
  CHECK_THROWS_AS(read_model(in), VersionMismatchError);
}

TEST_CASE("save/load via files") {
  const auto hp = hp_for(2);
  const auto m = init_model(6, 3, hp);
  const auto path = (std::filesystem::temp_directory_path() / "rescal_model_io_test.bin").string();
  save_model(path, m, hp, 7);
  const auto file = load_model(path);
  CHECK(file.model == m);
  CHECK(!std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), Error);
}
