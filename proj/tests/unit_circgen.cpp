#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <set>

#include "axdse/circgen.hpp"
#include "test_util.hpp"

using namespace axdse;

TEST_CASE("exact generators are error free") {
  for (const OpClass& cls : OpClass::all()) {
    AxCircuit c = gen_exact(cls);
    std::mt19937_64 rng(fnv1a(cls.name()));
    for (int i = 0; i < 500; ++i) {
      std::uint64_t a = rng() & ((1ull << cls.wa) - 1);
      std::uint64_t b = rng() & ((1ull << cls.wb) - 1);
      REQUIRE(evaluate(c.netlist, {a, b})[0] == cls.exact(a, b));
    }
  }
}

TEST_CASE("truncated adder with cut zero is the exact adder") {
  AxCircuit c = gen_truncated_adder(8, 0);
  CHECK(c.family == "exact");
  Characterization chr = characterize(c);
  CHECK(chr.med == 0.0);
  CHECK(chr.wce == 0.0);
}

TEST_CASE("two-bit truncated adder statistics") {
  AxCircuit c = gen_truncated_adder(2, 1, TruncPolicy::Zero);
  Characterization chr = characterize(c);
  // All 16 pairs: the 8 odd sums err by exactly 1.
  CHECK(chr.med == 0.5);
  CHECK(chr.wce == 1.0);
  auto oracle = testutil::brute_force_stats(c);
  CHECK(chr.med == oracle.med);
  CHECK(chr.wce == oracle.wce);
  CHECK(std::abs(chr.err_variance - oracle.variance) <= 1e-12);
}

TEST_CASE("segmented adder errs exactly when a carry crosses the boundary") {
  AxCircuit c = gen_segmented_adder(8, {4});
  for (std::uint64_t a = 0; a < 256; ++a)
    for (std::uint64_t b = 0; b < 256; ++b) {
      std::uint64_t got = testutil::scalar_eval(c.netlist, a, b);
      bool crossing = (((a & 15) + (b & 15)) >> 4) != 0;
      if (crossing) {
        REQUIRE(got != a + b);
      } else {
        REQUIRE(got == a + b);
      }
    }
}

TEST_CASE("segmented adder with no boundary is exact") {
  AxCircuit c = gen_segmented_adder(8, {});
  CHECK(c.family == "exact");
}

TEST_CASE("broken array multiplier at zero breaks is exact") {
  AxCircuit c = gen_broken_array_multiplier(8, 0, 0);
  CHECK(evaluate(c.netlist, {200, 250})[0] == 50000);
  Characterization chr = characterize(c);
  CHECK(chr.med == 0.0);
}

TEST_CASE("broken array multiplier error statistics match brute force") {
  AxCircuit c = gen_broken_array_multiplier(4, 2, 0);
  Characterization chr = characterize(c);
  auto oracle = testutil::brute_force_stats(c);
  CHECK(chr.med == oracle.med);
  CHECK(chr.wce == oracle.wce);
  CHECK(std::abs(chr.err_variance - oracle.variance) <= 1e-12);
  CHECK(chr.med > 0.0);
}

TEST_CASE("multiplier area is non-increasing in the break levels") {
  double prev = -1;
  for (int h = 0; h <= 16; ++h) {
    AxCircuit c = gen_broken_array_multiplier(8, h, 0);
    double a = area(c.netlist);
    if (prev >= 0) CHECK(a <= prev);
    prev = a;
  }
}

TEST_CASE("generator parameter validation") {
  CHECK_THROWS_AS(gen_truncated_adder(8, 8), UserError);
  CHECK_THROWS_AS(gen_truncated_adder(8, -1), UserError);
  CHECK_THROWS_AS(gen_segmented_adder(8, {0}), UserError);
  CHECK_THROWS_AS(gen_segmented_adder(8, {3, 3}), UserError);
  CHECK_THROWS_AS(gen_segmented_adder(8, {8}), UserError);
  CHECK_THROWS_AS(gen_broken_array_multiplier(8, 17, 0), UserError);
  CHECK_THROWS_AS(gen_broken_array_multiplier(8, 0, -1), UserError);
}

TEST_CASE("characterization against brute force across a circuit sample") {
  LibrarySpec spec;
  auto circuits = generate_class_circuits(OpClass::add(8), spec);
  for (std::size_t i = 0; i < circuits.size(); i += 23) {
    Characterization chr = characterize(circuits[i]);
    auto oracle = testutil::brute_force_stats(circuits[i]);
    REQUIRE(chr.med == oracle.med);
    REQUIRE(chr.wce == oracle.wce);
    REQUIRE(std::abs(chr.err_variance - oracle.variance) <= 1e-12);
  }
}

TEST_CASE("characterize with a point-mass PMF reports that error") {
  AxCircuit c = gen_truncated_adder(8, 3, TruncPolicy::Zero);
  Pmf pmf = Pmf::point_mass("add8", 13, 6);
  Characterization chr = characterize(c, &pmf, "app");
  std::uint64_t got = testutil::scalar_eval(c.netlist, 13, 6);
  double expect = std::abs(static_cast<double>(got) - 19.0);
  CHECK(chr.wmed.at("app") == expect);
  CHECK(chr.err_variance == 0.0);  // degenerate distribution
}

TEST_CASE("characterize validates the PMF") {
  AxCircuit c = gen_truncated_adder(8, 1);
  Pmf wrong_class = Pmf::point_mass("mul8", 1, 1);
  CHECK_THROWS_AS(characterize(c, &wrong_class, "x"), UserError);
  Pmf bad_sum;
  bad_sum.op_class = "add8";
  bad_sum.entries = {{Pmf::key(1, 1), 0.4}, {Pmf::key(1, 2), 0.4}};
  CHECK_THROWS_AS(characterize(c, &bad_sum, "x"), UserError);
}

TEST_CASE("default grids are deterministic with unique ids and an exact member") {
  LibrarySpec spec;
  for (const OpClass& cls : {OpClass::add(8), OpClass::mul(8)}) {
    auto a = generate_class_circuits(cls, spec);
    auto b = generate_class_circuits(cls, spec);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() >= 200);
    std::set<std::string> ids;
    int exact_count = 0;
    for (const auto& c : a) {
      CHECK(ids.insert(c.id).second);
      if (c.family == "exact") ++exact_count;
      c.netlist.validate();
    }
    CHECK(exact_count == 1);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i].id == b[i].id);
  }
}

TEST_CASE("wmed never exceeds the worst-case error") {
  std::mt19937_64 rng(99);
  AxCircuit c = gen_qa_adder(OpClass::add(8), QaParams{2, TruncPolicy::CopyA, {5}});
  Characterization base = characterize(c);
  for (int trial = 0; trial < 5; ++trial) {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    for (int i = 0; i < 40; ++i)
      counts[Pmf::key(rng() & 255, rng() & 255)] += 1 + (rng() & 7);
    Pmf pmf = Pmf::from_counts("add8", counts);
    Characterization chr = characterize(c, &pmf, "t");
    CHECK(chr.wmed.at("t") <= base.wce + 1e-12);
    CHECK(chr.wmed.at("t") == Catch::Approx(testutil::brute_force_wmed(c, pmf)).margin(1e-12));
  }
}

TEST_CASE("sampled characterization is deterministic and sane") {
  AxCircuit c = gen_qa_adder(OpClass::add(16), QaParams{4, TruncPolicy::Zero, {8}});
  CharacterizeOptions opt;
  opt.sample_count = 1 << 14;
  Characterization x = characterize(c, nullptr, "", opt);
  Characterization y = characterize(c, nullptr, "", opt);
  CHECK(x.med == y.med);
  CHECK(x.wce == y.wce);
  CHECK_FALSE(x.exhaustive);
  CHECK(x.eval_points == (1u << 14));
  CHECK(x.med > 0.0);

  AxCircuit exact16 = gen_exact(OpClass::add(16));
  Characterization e = characterize(exact16, nullptr, "", opt);
  CHECK(e.med == 0.0);
  CHECK(e.wce == 0.0);
}

TEST_CASE("catalog save and load round trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "axdse_catalog_test";
  fs::remove_all(dir);
  LibrarySpec spec;
  spec.classes = {OpClass::add(8)};
  std::vector<AxCircuit> lib;
  lib.push_back(gen_exact(OpClass::add(8)));
  lib.push_back(gen_truncated_adder(8, 2));
  lib.push_back(gen_segmented_adder(8, {3, 6}));
  for (auto& c : lib) c.chr = characterize(c);
  save_catalog(dir, lib);
  auto loaded = load_catalog(dir);
  REQUIRE(loaded.size() == lib.size());
  std::sort(lib.begin(), lib.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < lib.size(); ++i) {
    CHECK(loaded[i].id == lib[i].id);
    CHECK(loaded[i].chr.area == lib[i].chr.area);
    CHECK(loaded[i].chr.med == lib[i].chr.med);
    CHECK(loaded[i].chr.err_variance == lib[i].chr.err_variance);
    for (std::uint64_t v = 0; v < 50; ++v) {
      std::uint64_t a = (v * 37) & 255, b = (v * 101) & 255;
      REQUIRE(testutil::scalar_eval(loaded[i].netlist, a, b) ==
              testutil::scalar_eval(lib[i].netlist, a, b));
    }
  }
  fs::remove_all(dir);
}
