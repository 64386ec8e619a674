#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "axdse/accel.hpp"
#include "test_util.hpp"

using namespace axdse;

namespace {

// Independent scalar Sobel (vertical edges): |right column - left column|
// with the middle row doubled, clamped to 8 bits, replicated border.
Image sobel_oracle(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int l = img.at_clamped(x - 1, y - 1) + 2 * img.at_clamped(x - 1, y) +
              img.at_clamped(x - 1, y + 1);
      int r = img.at_clamped(x + 1, y - 1) + 2 * img.at_clamped(x + 1, y) +
              img.at_clamped(x + 1, y + 1);
      out.at(x, y) = std::uint8_t(std::min(std::abs(r - l), 255));
    }
  return out;
}

// Independent integer convolution with a quantized kernel summing to 256.
Image conv_oracle(const Image& img, const std::array<int, 9>& kernel) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int sum = 0;
      for (int wy = 0; wy < 3; ++wy)
        for (int wx = 0; wx < 3; ++wx)
          sum += kernel[wy * 3 + wx] * img.at_clamped(x + wx - 1, y + wy - 1);
      out.at(x, y) = std::uint8_t(sum >> 8);
    }
  return out;
}

// Scalar oracle for a configured graph: every op node evaluated through the
// independent netlist interpreter.
std::uint32_t configured_window_oracle(const AccelGraph& g,
                                       const std::vector<const AxCircuit*>& circuits,
                                       const std::array<std::uint8_t, 9>& window,
                                       const std::vector<std::uint32_t>& params) {
  std::vector<std::uint32_t> values(g.nodes.size(), 0);
  std::size_t op_index = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    switch (n.kind) {
      case NodeKind::PixelIn: values[i] = window[n.value]; break;
      case NodeKind::ParamIn: values[i] = params.at(n.value); break;
      case NodeKind::Const: values[i] = n.value; break;
      case NodeKind::Op:
        values[i] = std::uint32_t(
            testutil::scalar_eval(circuits[op_index++]->netlist, values[n.a], values[n.b]));
        break;
      case NodeKind::ShiftLeft: values[i] = values[n.a] << n.amount; break;
      case NodeKind::ShiftRight: values[i] = values[n.a] >> n.amount; break;
      case NodeKind::Output: values[i] = std::min<std::uint32_t>(values[n.a], 255); break;
    }
  }
  return values[g.output_node];
}

Catalog small_catalog() {
  std::vector<AxCircuit> circuits;
  for (const OpClass& cls : OpClass::all()) circuits.push_back(gen_exact(cls));
  circuits.push_back(gen_qa_adder(OpClass::add(9), QaParams{8, TruncPolicy::Zero, {}}));
  circuits.push_back(gen_qa_adder(OpClass::add(8), QaParams{4, TruncPolicy::CopyA, {6}}));
  circuits.push_back(gen_qa_subtractor(OpClass::sub(10), QaParams{9, TruncPolicy::Zero, {}}));
  circuits.push_back(gen_qa_subtractor(OpClass::sub(16), QaParams{6, TruncPolicy::Zero, {10}}));
  circuits.push_back(gen_broken_array_multiplier(8, 6, 3));
  circuits.push_back(gen_qa_adder(OpClass::add(16), QaParams{5, TruncPolicy::Zero, {}}));
  for (auto& c : circuits) c.chr.area = area(c.netlist);
  return Catalog(std::move(circuits));
}

}  // namespace

TEST_CASE("sobel graph structure follows the benchmark op table") {
  AccelGraph g = build_sobel();
  auto classes = g.op_node_classes();
  REQUIRE(classes.size() == 5);
  std::map<std::string, int> count;
  for (auto& [id, cls] : classes) count[cls.name()]++;
  CHECK(count["add8"] == 2);
  CHECK(count["add9"] == 2);
  CHECK(count["sub10"] == 1);
}

TEST_CASE("generic gaussian filter has seventeen op nodes") {
  AccelGraph g = build_generic_gf();
  auto classes = g.op_node_classes();
  REQUIRE(classes.size() == 17);
  std::map<std::string, int> count;
  for (auto& [id, cls] : classes) count[cls.name()]++;
  CHECK(count["mul8"] == 9);
  CHECK(count["add16"] == 8);
  CHECK(g.param_count == 9);
}

TEST_CASE("fixed gaussian filter covers the four shift-add classes") {
  AccelGraph g = build_fixed_gf();
  std::map<std::string, int> count;
  for (auto& [id, cls] : g.op_node_classes()) count[cls.name()]++;
  CHECK(count["add8"] == 4);
  CHECK(count["add9"] == 2);
  CHECK(count["add16"] == 5);
  CHECK(count["sub16"] == 2);
  CHECK(g.op_nodes.size() == 13);
}

TEST_CASE("quantized sigma-2 kernel") {
  auto kernel = quantize_kernel_256(gaussian_kernel3(2.0));
  std::array<int, 9> expected = {26, 30, 26, 30, 33, 30, 26, 29, 26};
  CHECK(kernel == expected);
  int sum = 0;
  for (int v : kernel) sum += v;
  CHECK(sum == 256);
}

TEST_CASE("protocol kernels are quantized within range") {
  for (double sigma : {0.3, 0.45, 0.62, 0.8}) {
    auto kernel = quantize_kernel_256(gaussian_kernel3(sigma));
    int sum = 0;
    for (int v : kernel) {
      CHECK(v >= 0);
      CHECK(v <= 255);
      sum += v;
    }
    CHECK(sum == 256);
  }
}

TEST_CASE("exact sobel equals the convolution oracle") {
  AccelGraph g = build_sobel();
  Catalog catalog = small_catalog();
  Configuration exact = exact_configuration(g);
  for (int i = 0; i < 5; ++i) {
    Image img = make_synthetic_image(i, 33, 21, 999 + i);
    Image got = simulate(g, exact, catalog, img);
    Image want = sobel_oracle(img);
    REQUIRE(got == want);
  }
}

TEST_CASE("exact sobel on a constant image is all zero") {
  AccelGraph g = build_sobel();
  Catalog catalog = small_catalog();
  Image img(17, 9, 77);
  Image got = simulate(g, exact_configuration(g), catalog, img);
  for (auto p : got.pixels) REQUIRE(p == 0);
}

TEST_CASE("fixed gf preserves constant images and matches its oracle") {
  AccelGraph g = build_fixed_gf();
  Catalog catalog = small_catalog();
  Configuration exact = exact_configuration(g);
  Image flat(12, 8, 201);
  CHECK(simulate(g, exact, catalog, flat) == flat);

  auto kernel = quantize_kernel_256(gaussian_kernel3(2.0));
  for (int i = 0; i < 4; ++i) {
    Image img = make_synthetic_image(i + 1, 25, 18, 31 + i);
    REQUIRE(simulate(g, exact, catalog, img) == conv_oracle(img, kernel));
  }
}

TEST_CASE("generic gf matches the oracle and preserves dc") {
  AccelGraph g = build_generic_gf();
  Catalog catalog = small_catalog();
  Configuration exact = exact_configuration(g);
  auto kernel = quantize_kernel_256(gaussian_kernel3(0.5));
  std::vector<std::uint32_t> params(kernel.begin(), kernel.end());
  std::array<int, 9> k9;
  std::copy(kernel.begin(), kernel.end(), k9.begin());

  Image flat(10, 10, 140);
  CHECK(simulate(g, exact, catalog, flat, params) == flat);
  for (int i = 0; i < 3; ++i) {
    Image img = make_synthetic_image(i + 2, 19, 23, 7 + i);
    REQUIRE(simulate(g, exact, catalog, img, params) == conv_oracle(img, k9));
  }
}

TEST_CASE("reference model and lane simulator agree for exact configurations") {
  Catalog catalog = small_catalog();
  for (const char* name : {"sobel", "fixed_gf", "generic_gf"}) {
    AccelGraph g = build_benchmark(name);
    std::vector<std::uint32_t> params;
    if (g.param_count) {
      auto kernel = quantize_kernel_256(gaussian_kernel3(0.7));
      params.assign(kernel.begin(), kernel.end());
    }
    Image img = make_synthetic_image(3, 29, 15, 1);
    REQUIRE(simulate(g, exact_configuration(g), catalog, img, params) ==
            simulate_reference(g, img, params));
  }
}

TEST_CASE("configured simulation matches the independent scalar oracle") {
  Catalog catalog = small_catalog();
  std::mt19937_64 rng(123);

  AccelGraph sobel = build_sobel();
  Configuration approx;
  approx.circuit_ids = {"add8_qa_c4a_b6", "add9_qa_c8z", "add8_exact", "add9_exact",
                        "sub10_qa_c9z"};
  auto circuits = resolve_configuration(sobel, approx, catalog);
  ConfiguredSim sim(sobel, approx, catalog);
  Image img = make_synthetic_image(5, 31, 17, 5);
  Image got = sim.run(img);
  for (int i = 0; i < 300; ++i) {
    int x = int(rng() % img.width), y = int(rng() % img.height);
    std::uint32_t want = configured_window_oracle(sobel, circuits, gather_window(img, x, y), {});
    REQUIRE(std::uint32_t(got.at(x, y)) == want);
  }

  AccelGraph gf = build_generic_gf();
  Configuration gf_cfg = exact_configuration(gf);
  gf_cfg.circuit_ids[2] = "mul8_bam_h6_v3";
  gf_cfg.circuit_ids[10] = "add16_qa_c5z";
  auto gf_circuits = resolve_configuration(gf, gf_cfg, catalog);
  ConfiguredSim gf_sim(gf, gf_cfg, catalog);
  auto kernel = quantize_kernel_256(gaussian_kernel3(0.4));
  std::vector<std::uint32_t> params(kernel.begin(), kernel.end());
  Image img2 = make_synthetic_image(0, 23, 11, 9);
  Image got2 = gf_sim.run(img2, params);
  for (int i = 0; i < 200; ++i) {
    int x = int(rng() % img2.width), y = int(rng() % img2.height);
    std::uint32_t want =
        configured_window_oracle(gf, gf_circuits, gather_window(img2, x, y), params);
    REQUIRE(std::uint32_t(got2.at(x, y)) == want);
  }
}

TEST_CASE("simulation is deterministic") {
  Catalog catalog = small_catalog();
  AccelGraph g = build_sobel();
  Configuration cfg = exact_configuration(g);
  cfg.circuit_ids[4] = "sub10_qa_c9z";
  Image img = make_synthetic_image(4, 40, 30, 11);
  CHECK(simulate(g, cfg, catalog, img) == simulate(g, cfg, catalog, img));
}

TEST_CASE("a heavily truncated subtractor changes the output") {
  Catalog catalog = small_catalog();
  AccelGraph g = build_sobel();
  Configuration cfg = exact_configuration(g);
  cfg.circuit_ids[4] = "sub10_qa_c9z";
  Image img = make_synthetic_image(0, 32, 32, 3);  // horizontal gradient
  Image exact = simulate(g, exact_configuration(g), catalog, img);
  Image approx = simulate(g, cfg, catalog, img);
  CHECK_FALSE(exact == approx);
}

TEST_CASE("simulate rejects class-inconsistent configurations") {
  Catalog catalog = small_catalog();
  AccelGraph g = build_sobel();
  Configuration cfg = exact_configuration(g);
  cfg.circuit_ids[0] = "mul8_exact";
  CHECK_THROWS_AS(simulate(g, cfg, catalog, Image(8, 8, 0)), UserError);
  Configuration missing = exact_configuration(g);
  missing.circuit_ids[1] = "no_such_circuit";
  CHECK_THROWS_AS(simulate(g, missing, catalog, Image(8, 8, 0)), UserError);
  Configuration short_cfg;
  short_cfg.circuit_ids = {"add8_exact"};
  CHECK_THROWS_AS(simulate(g, short_cfg, catalog, Image(8, 8, 0)), UserError);
}

TEST_CASE("profiling a constant image gives point-mass pmfs") {
  AccelGraph g = build_sobel();
  std::vector<Image> images = {Image(9, 7, 55)};
  auto pmfs = profile_pmfs(g, images);
  REQUIRE(pmfs.size() == 5);
  const Pmf& add1 = pmfs.at("add1");
  REQUIRE(add1.entries.size() == 1);
  CHECK(add1.entries[0].first == Pmf::key(55, 55));
  CHECK(add1.entries[0].second == 1.0);
  for (auto& [node, pmf] : pmfs) {
    double sum = 0;
    for (auto& [k, p] : pmf.entries) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("shifted operands leave stripes in the pmf support") {
  AccelGraph g = build_sobel();
  std::vector<Image> images = {make_synthetic_image(0, 48, 16, 2)};
  auto pmfs = profile_pmfs(g, images);
  const Pmf& add2 = pmfs.at("add2");
  CHECK(add2.entries.size() > 1);
  for (auto& [k, p] : add2.entries) CHECK(Pmf::key_b(k) % 2 == 0);
}

TEST_CASE("profiling rejects an empty image set") {
  AccelGraph g = build_sobel();
  CHECK_THROWS_AS(profile_pmfs(g, {}), UserError);
}

TEST_CASE("pmf csv round trip") {
  AccelGraph g = build_sobel();
  std::vector<Image> images = {make_synthetic_image(2, 20, 12, 8)};
  auto pmfs = profile_pmfs(g, images);
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "axdse_pmfs_test.csv";
  save_pmfs(path, pmfs);
  auto back = load_pmfs(path);
  REQUIRE(back.size() == pmfs.size());
  for (auto& [node, pmf] : pmfs) {
    const Pmf& b = back.at(node);
    REQUIRE(b.entries.size() == pmf.entries.size());
    CHECK(b.op_class == pmf.op_class);
    for (std::size_t i = 0; i < pmf.entries.size(); ++i) {
      CHECK(b.entries[i].first == pmf.entries[i].first);
      CHECK(b.entries[i].second == pmf.entries[i].second);
    }
  }
  fs::remove(path);
}

TEST_CASE("pgm round trip and synthetic generator determinism") {
  Image img = make_synthetic_image(3, 21, 14, 77);
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "axdse_img_test.pgm";
  save_pgm(path, img);
  Image back = load_pgm(path);
  CHECK(back == img);
  fs::remove(path);
  CHECK(make_synthetic_image(3, 21, 14, 77) == img);
  CHECK_FALSE(make_synthetic_image(3, 21, 14, 78) == img);
}
