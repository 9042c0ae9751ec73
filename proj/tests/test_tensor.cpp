#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "rescal/tensor.hpp"

using namespace rescal;

namespace {

std::vector<Coord> coords(const SparseAdjacencyTensor& t, Index k) {
  const auto s = t.slice(k);
  return {s.begin(), s.end()};
}

std::vector<Triple> random_triples(std::mt19937_64& gen, int n_labels, int n_rel, int count) {
  std::uniform_int_distribution<int> ent(0, n_labels - 1);
  std::uniform_int_distribution<int> rel(0, n_rel - 1);
  std::vector<Triple> out;
  for (int t = 0; t < count; ++t) {
    out.push_back({"e" + std::to_string(ent(gen)), "r" + std::to_string(rel(gen)),
                   "e" + std::to_string(ent(gen))});
  }
  return out;
}

}  // namespace

TEST_CASE("from_triples: empty input") {
  const auto data = from_triples({});
  CHECK(data.tensor.n_entities() == 0);
  CHECK(data.tensor.n_relations() == 0);
  CHECK(data.tensor.nnz() == 0);
}

TEST_CASE("from_triples: duplicates collapse") {
  const std::vector<Triple> in = {{"a", "r", "b"}, {"a", "r", "b"}};
  const auto data = from_triples(in);
  CHECK(data.tensor.n_entities() == 2);
  CHECK(data.tensor.n_relations() == 1);
  CHECK(coords(data.tensor, 0) == std::vector<Coord>{{0, 1}});
}

TEST_CASE("from_triples: first-appearance order and canonical slices") {
  const std::vector<Triple> in = {{"a", "r", "b"}, {"b", "s", "a"}, {"a", "s", "a"}};
  const auto data = from_triples(in);
  CHECK(data.tensor.n_entities() == 2);
  CHECK(data.tensor.n_relations() == 2);
  CHECK(data.entities.find("a") == 0);
  CHECK(data.entities.find("b") == 1);
  CHECK(data.relations.find("r") == 0);
  CHECK(data.relations.find("s") == 1);
  CHECK(coords(data.tensor, 0) == std::vector<Coord>{{0, 1}});
  CHECK(coords(data.tensor, 1) == std::vector<Coord>{{0, 0}, {1, 0}});
}

TEST_CASE("from_triples: empty label names the record") {
  const std::vector<Triple> in = {{"a", "r", "b"}, {"a", "  ", "b"}};
  CHECK_THROWS_WITH_AS(from_triples(in), doctest::Contains("triple #1"), ParseError);
}

TEST_CASE("dense_slice") {
  const SparseAdjacencyTensor t(2, 3, {{}, {{0, 1}}, {{0, 0}, {1, 0}}});
  CHECK(dense_slice(t, 0) == Eigen::MatrixXd::Zero(2, 2));
  Eigen::MatrixXd expect(2, 2);
  expect << 0, 1, 0, 0;
  CHECK(dense_slice(t, 1) == expect);
  expect << 1, 0, 1, 0;
  CHECK(dense_slice(t, 2) == expect);
  CHECK_THROWS_AS(dense_slice(t, 3), IndexError);
}

TEST_CASE("dense_slice: cap exceeded names N and cap") {
  const SparseAdjacencyTensor t(7, 1, {{{0, 1}}});
  CHECK_THROWS_WITH_AS(dense_slice(t, 0, 5), doctest::Contains("N = 7"), ResourceLimitError);
  CHECK_THROWS_WITH_AS(dense_slice(t, 0, 5), doctest::Contains("cap 5"), ResourceLimitError);
}

TEST_CASE("mask_cells") {
  const SparseAdjacencyTensor t(2, 1, {{{0, 1}, {1, 0}}});
  CHECK(mask_cells(t, {}) == t);

  const SparseAdjacencyTensor single(2, 1, {{{0, 1}}});
  const std::vector<Cell> full = {{0, 1, 0}};
  CHECK(mask_cells(single, full).nnz(0) == 0);

  const std::vector<Cell> cells = {{0, 1, 0}, {1, 1, 0}};
  const auto masked = mask_cells(t, cells);
  CHECK(coords(masked, 0) == std::vector<Coord>{{1, 0}});
  CHECK(t.nnz(0) == 2);

  const std::vector<Cell> bad = {{2, 0, 0}};
  CHECK_THROWS_AS(mask_cells(t, bad), IndexError);
}

TEST_CASE("constructor rejects out-of-range coordinates") {
  CHECK_THROWS_AS(SparseAdjacencyTensor(2, 1, {{{0, 2}}}), IndexError);
  CHECK_THROWS_AS(SparseAdjacencyTensor(2, 2, {{{0, 1}}}), IndexError);
}

TEST_CASE("property: round trip, dense nnz, canonical order, mask composition") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    auto triples = random_triples(gen, 6, 3, 1 + trial % 25);
    const auto data = from_triples(triples);

    // Round trip reproduces the distinct triple set.
    auto back = to_triples(data);
    auto key = [](const Triple& t) { return t.subject + "\x1f" + t.relation + "\x1f" + t.object; };
    std::set<std::string> expect_set, got_set;
    for (const auto& t : triples) expect_set.insert(key(t));
    for (const auto& t : back) got_set.insert(key(t));
    CHECK(expect_set == got_set);
    CHECK(back.size() == got_set.size());

    for (Index k = 0; k < data.tensor.n_relations(); ++k)
      CHECK(dense_slice(data.tensor, k).sum() == doctest::Approx(data.tensor.nnz(k)));

    // Same multiset in another order, with labels pre-registered in the same
    // order, compares equal.
    auto shuffled = triples;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    std::vector<std::vector<Coord>> slices(static_cast<std::size_t>(data.relations.size()));
    for (const auto& t : shuffled) {
      slices[static_cast<std::size_t>(data.relations.find(t.relation))].push_back(
          {data.entities.find(t.subject), data.entities.find(t.object)});
    }
    CHECK(SparseAdjacencyTensor(data.entities.size(), data.relations.size(), slices) ==
          data.tensor);

    // mask(C1 u C2) == mask(mask(C1), C2), including overlap.
    const Index n = data.tensor.n_entities();
    std::uniform_int_distribution<Index> ent(0, n - 1);
    std::uniform_int_distribution<Index> rel(0, data.tensor.n_relations() - 1);
    std::vector<Cell> c1, c2;
    for (int c = 0; c < 6; ++c) c1.push_back({ent(gen), ent(gen), rel(gen)});
    for (int c = 0; c < 6; ++c) c2.push_back({ent(gen), ent(gen), rel(gen)});
    c2.push_back(c1.front());
    auto both = c1;
    both.insert(both.end(), c2.begin(), c2.end());
    CHECK(mask_cells(data.tensor, both) == mask_cells(mask_cells(data.tensor, c1), c2));
  }
}

TEST_CASE("triple file parsing") {
  std::istringstream in("# comment\n\na\tr\tb\r\n  \nb\ts\ta\n");
  const auto triples = read_triples(in);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0] == Triple{"a", "r", "b"});
  CHECK(triples[1] == Triple{"b", "s", "a"});

  std::istringstream two_fields("a\tr\n");
  CHECK_THROWS_WITH_AS(read_triples(two_fields, "f.tsv"), doctest::Contains("f.tsv:1"),
                       ParseError);
  std::istringstream empty_label("a\t\tb\n");
  CHECK_THROWS_AS(read_triples(empty_label), ParseError);
  CHECK_THROWS_AS(read_triple_file("/nonexistent/triples.tsv"), ParseError);
}

TEST_CASE("dictionary export round trip") {
  const std::vector<Triple> in = {{"x", "r", "y"}, {"z", "r", "x"}};
  const auto data = from_triples(in);
  std::ostringstream out;
  write_dictionary(out, data.entities);
  CHECK(out.str() == "0\tx\n1\ty\n2\tz\n");
  std::istringstream back(out.str());
  CHECK(read_dictionary<EntityTag>(back) == data.entities);

  std::istringstream gap("0\tx\n2\ty\n");
  CHECK_THROWS_AS(read_dictionary<EntityTag>(gap), ParseError);
}

TEST_CASE("dataset checksum is order independent within the canonical form") {
  const std::vector<Triple> a = {{"x", "r", "y"}, {"x", "r", "x"}};
  const std::vector<Triple> b = {{"x", "r", "y"}, {"x", "r", "x"}, {"x", "r", "y"}};
  CHECK(dataset_checksum(from_triples(a)) == dataset_checksum(from_triples(b)));
  const std::vector<Triple> c = {{"x", "r", "y"}};
  CHECK(dataset_checksum(from_triples(a)) != dataset_checksum(from_triples(c)));
}
