#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "qland/deceptiveness.hpp"
#include "qland/io.hpp"
#include "qland/landscape.hpp"

#ifndef QLAND_FIXTURE_DIR
#error "QLAND_FIXTURE_DIR must point at tests/fixtures"
#endif

using namespace qland;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = QLAND_FIXTURE_DIR;

}  // namespace

TEST_CASE("fixtures: grids and masks regenerate byte for byte") {
  for (int b : {1, 6, 11}) {
    const std::string stem = "q2_b" + std::to_string(b) + "_r16";
    const auto grid = sample_grid(build_default_circuit(2, b), 16);
    const auto grid_bytes = encode_grid(grid);
    CHECK_MESSAGE(read_file(kDir / (stem + ".qlgrid")) == grid_bytes, stem);

    auto mask = deceptiveness_mask(grid);
    CHECK(mask.source_grid_digest == sha256_hex(grid_bytes));
    CHECK_MESSAGE(read_file(kDir / (stem + "_tol0.01.qlmask")) == encode_mask(mask), stem);
    CHECK(read_file(kDir / "sweep/grids" / (stem + ".qlgrid")) == grid_bytes);
  }
}

TEST_CASE("fixtures: records and summary are readable and consistent") {
  const auto summary = nlohmann::json::parse(read_file(kDir / "sweep/summary.json"));
  REQUIRE(summary.at("cells").size() == 3);
  for (const auto& cell : summary.at("cells")) {
    CHECK(cell.at("ground_truth").at("resolution") == 32);
    const auto& opt = cell.at("optimizers");
    CHECK(opt.contains("ground_truth_min"));
    CHECK(opt.contains("deceptiveness_ratio"));
    CHECK(opt.at("cells").size() == 4);
    const auto csv = read_file(kDir / "sweep" / opt.at("records_file").get<std::string>());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 3 * 11);
  }
  const auto stats = nlohmann::json::parse(read_file(kDir / "q2_b6_r32.stats.json"));
  CHECK(stats.at("quantiles").size() == 3);
  CHECK(stats.at("resolution") == 32);
}
