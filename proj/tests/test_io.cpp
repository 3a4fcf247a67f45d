#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "spintomo/io.hpp"
#include "spintomo/source.hpp"

using namespace spintomo;

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("density matrix JSON round trip") {
    const DensityMatrix rho = noisy_state(input_state(0.1), 0.93);
    const std::string text = density_matrix_to_json(rho);
    const DensityMatrix back = density_matrix_from_json(text);
    CHECK(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-9);

    CHECK_THROWS_AS(density_matrix_from_json("not json"), ValidationError);
    CHECK_THROWS_AS(density_matrix_from_json("{\"re\": [[1]]}"), ValidationError);

    // a file matrix violating the trace invariant is rejected
    CHECK_THROWS_AS(density_matrix_from_json(
                        R"({"re": [[0.5,0,0],[0,0.5,0],[0,0,0.5]],
                            "im": [[0,0,0],[0,0,0],[0,0,0]]})"),
                    ValidationError);
    // hermiticity violations are rejected too
    CHECK_THROWS_AS(density_matrix_from_json(
                        R"({"re": [[1,0.1,0],[0,0,0],[0,0,0]],
                            "im": [[0,0,0],[0,0,0],[0,0,0]]})"),
                    ValidationError);
}

TEST_CASE("reference matrices load as plain Hermitian values") {
    const Mat3 raw = hermitian3_from_json(
        read_text_file(std::filesystem::path(SPINTOMO_DATA_DIR) / "rho_raw.json"));
    CHECK(raw(0, 0).real() == doctest::Approx(0.575));
    CHECK(raw.trace().real() == doctest::Approx(0.999)); // printed rounding
    CHECK(max_abs_diff(raw, raw.adjoint()) <= 1e-12);
}

TEST_CASE("circuit JSON round trip") {
    const std::vector<CircuitElement> circuit = {
        PhaseShifter{0.25, Mode::c},
        BeamSplitter{kPi / 4.0},
        MziElement{1.1},
        PhaseShifter{5.9, Mode::d},
    };
    const auto back = circuit_from_json(circuit_to_json(circuit));
    REQUIRE(back.size() == circuit.size());
    CHECK(max_abs_diff(compose(back, Rep::spin1).matrix(),
                       compose(circuit, Rep::spin1).matrix()) <= 1e-12);

    CHECK_THROWS_AS(circuit_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(circuit_from_json(R"([{"kind": "prism", "param": 1.0}])"), ValidationError);
    CHECK_THROWS_AS(circuit_from_json(R"([{"kind": "phase", "param": 1.0, "mode": "x"}])"),
                    ValidationError);
}

TEST_CASE("source params JSON") {
    const SourceParams p(0.024, 0.98);
    const SourceParams back = source_params_from_json(source_params_to_json(p));
    CHECK(back.contamination == doctest::Approx(0.024));
    CHECK(back.visibility == doctest::Approx(0.98));
    CHECK_THROWS_AS(source_params_from_json("{\"R\": 0.5}"), ValidationError);
    CHECK_THROWS_AS(source_params_from_json("{\"R\": 1.5, \"V\": 0.5}"), ValidationError);
}

TEST_CASE("directions parse from names and arrays") {
    CHECK((direction_from_json("\"L3\"").axis()
           - Eigen::Vector3d(1, 1, 0).normalized()).norm() <= 1e-12);
    CHECK((direction_from_json("[0.0, 0.0, 1.0]").axis() - Eigen::Vector3d(0, 0, 1)).norm()
          <= 1e-12);
    CHECK_THROWS_AS(direction_from_json("\"L9\""), ValidationError);
    CHECK_THROWS_AS(direction_from_json("[1.0, 1.0, 1.0]"), ValidationError); // not unit
}

TEST_CASE("tomography input variants") {
    SUBCASE("probabilities with lz mean") {
        const auto input = tomography_input_from_json(read_text_file(
            std::filesystem::path(SPINTOMO_DATA_DIR) / "tomography_table.json"));
        REQUIRE(input.table);
        CHECK_FALSE(input.counts);
        REQUIRE(input.lz_first_moment());
        CHECK(*input.lz_first_moment() == doctest::Approx(0.054));
        // rows arrive renormalized
        for (const auto& row : input.table->rows()) {
            CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("counts") {
        const char* text = R"({
            "directions": [
                {"name": "L1", "counts": [10, 20, 70]},
                {"name": "L2", "counts": [5, 90, 5]},
                {"name": "L3", "counts": [30, 30, 40]},
                {"name": "L4", "counts": [25, 50, 25]},
                {"name": "L5", "counts": [40, 10, 50]}
            ],
            "lz": {"counts": [53, 40, 7]}
        })";
        const auto input = tomography_input_from_json(text);
        REQUIRE(input.counts);
        CHECK(input.counts->total() == 500);
        REQUIRE(input.lz_first_moment());
        CHECK(*input.lz_first_moment() == doctest::Approx(0.46));
        CHECK(input.effective_table().rows()[0][2] == doctest::Approx(0.7));
    }

    SUBCASE("explicit axis entries") {
        const char* text = R"({
            "directions": [
                {"n": [0.0, 0.0, 1.0], "probs": [0.5, 0.0, 0.5]}
            ]
        })";
        const auto input = tomography_input_from_json(text);
        REQUIRE(input.table);
        CHECK((input.table->directions()[0].axis() - Eigen::Vector3d(0, 0, 1)).norm() <= 1e-12);
    }

    SUBCASE("malformed inputs") {
        CHECK_THROWS_AS(tomography_input_from_json("{}"), ValidationError);
        CHECK_THROWS_AS(tomography_input_from_json("[1,2,3]"), ValidationError);
        CHECK_THROWS_AS(tomography_input_from_json(
                            R"({"directions": [{"name": "L1"}]})"),
                        ValidationError);
        CHECK_THROWS_AS(tomography_input_from_json(
                            R"({"directions": [{"name": "L1", "counts": [1.5, 2, 3]}]})"),
                        ValidationError);
        // mixing probs and counts rows is rejected
        CHECK_THROWS_AS(tomography_input_from_json(
                            R"({"directions": [
                                {"name": "L1", "probs": [0.3, 0.3, 0.4]},
                                {"name": "L2", "counts": [1, 2, 3]}
                            ]})"),
                        ValidationError);
    }
}

TEST_CASE("fringe CSV round trips and formatting") {
    FringeCounts counts;
    counts.theta = kPi / 2.0;
    counts.phi = {0.0, 0.123456789, 1.0, 2.5, 4.0};
    counts.counts = {{1, 2, 3}, {10, 20, 30}, {100, 200, 300}, {0, 0, 1}, {7, 8, 9}};
    const std::string csv = fringe_counts_to_csv(counts);
    CHECK(csv.rfind("phi,count20,count11,count02\n", 0) == 0);
    CHECK(csv.find("0.123456789,10,20,30\n") != std::string::npos);

    const FringeCounts back = fringe_counts_from_csv(csv, counts.theta);
    CHECK(back.counts == counts.counts);
    for (std::size_t i = 0; i < counts.phi.size(); ++i) {
        CHECK(back.phi[i] == doctest::Approx(counts.phi[i]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(fringe_counts_from_csv("phi,a,b,c\n0,1,2,3\n", 1.0), ValidationError);
    CHECK_THROWS_AS(fringe_counts_from_csv("phi,count20,count11,count02\n0,1.5,2,3\n", 1.0),
                    ValidationError);
    CHECK_THROWS_AS(fringe_counts_from_csv("phi,count20,count11,count02\n0,1,2\n", 1.0),
                    ValidationError);

    const FringeProbabilities probs =
        simulate_fringe(SourceParams(0.0, 1.0), kPi / 2.0, {0.0, 0.5, 1.0, 1.5});
    const FringeProbabilities probs_back =
        fringe_probabilities_from_csv(fringe_probabilities_to_csv(probs), probs.theta);
    for (std::size_t i = 0; i < probs.phi.size(); ++i) {
        for (int m = 0; m < 3; ++m) {
            CHECK(probs_back.probs[i][static_cast<std::size_t>(m)]
                  == doctest::Approx(probs.probs[i][static_cast<std::size_t>(m)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("atomic file writes land complete") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "spintomo_io_test";
    fs::create_directories(dir);
    const fs::path target = dir / "out.json";

    write_text_file_atomic(target, "hello\n");
    CHECK(read_text_file(target) == "hello\n");
    write_text_file_atomic(target, "replaced\n");
    CHECK(read_text_file(target) == "replaced\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));

    CHECK_THROWS_AS(read_text_file(dir / "missing.json"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("tomography result serialization carries the populated fields") {
    const auto input = tomography_input_from_json(read_text_file(
        std::filesystem::path(SPINTOMO_DATA_DIR) / "tomography_table.json"));
    const TomographyResult result =
        run_tomography(*input.table, ReconstructionMethod::both);
    const std::string text = tomography_result_to_json(result);
    CHECK(text.find("rho_raw") != std::string::npos);
    CHECK(text.find("rho_ml") != std::string::npos);
    CHECK(text.find("trace_norm_distance") != std::string::npos);
    CHECK(text.find("eigenvalues_raw") != std::string::npos);

    // the serialized raw matrix parses back to the same values
    const auto j = nlohmann::json::parse(text);
    const Mat3 raw_back = hermitian3_from_json(j.at("rho_raw").dump());
    CHECK(max_abs_diff(raw_back, result.rho_raw->matrix()) <= 1e-9);
}
