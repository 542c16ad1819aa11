#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "alphasens/csv.hpp"
#include "alphasens/rng.hpp"

using namespace alphasens;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("alphasens_csv_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("rfc-4180 quoting: commas, doubled quotes, embedded newlines") {
    const std::string text =
        "name,\"va,lue\"\r\n"
        "\"a\"\"b\",1.5\n"
        "\"line\nbreak\",2e-3\n";
    const CsvTable t = parse_csv(text);
    REQUIRE(t.header.size() == 2);
    CHECK(t.header[1] == "va,lue");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "a\"b");
    CHECK(t.rows[1][0] == "line\nbreak");
    CHECK(t.rows[1][1] == "2e-3");
}

TEST_CASE("ragged rows and unterminated quotes are schema errors") {
    CHECK_THROWS_AS((void)parse_csv("a,b\n1\n"), SchemaError);
    CHECK_THROWS_AS((void)parse_csv("a,b\n\"1,2\n"), SchemaError);
    CHECK_THROWS_AS((void)parse_csv(""), SchemaError);
}

TEST_CASE("dataset csv round trip preserves doubles exactly") {
    TempDir tmp;
    Rng rng(4);
    Matrix m(50, 3);
    for (double& v : m.data) v = rng.normal() * 1e-7;
    std::vector<double> target(50);
    for (double& v : target) v = rng.normal();
    const Dataset d(m, {"X1", "X2", "swe,ird"}, target);

    const std::string path = tmp.file("d.csv");
    save_dataset_csv(d, path, "Y");
    const Dataset back = load_dataset_csv(path, "Y");

    REQUIRE(back.n_samples() == d.n_samples());
    REQUIRE(back.n_features() == d.n_features());
    CHECK(back.feature_names()[2] == "swe,ird");
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            CHECK(back.feature(i, j) == d.feature(i, j));  // bit-exact
        }
        CHECK(back.target()[i] == target[i]);
    }
}

TEST_CASE("target column can sit anywhere and is selected by name") {
    TempDir tmp;
    const std::string path = tmp.file("t.csv");
    std::ofstream(path) << "a,Y,b\n1,10,2\n3,20,4\n";
    const Dataset d = load_dataset_csv(path, "Y");
    CHECK(d.n_features() == 2);
    CHECK(d.feature_names()[0] == "a");
    CHECK(d.feature_names()[1] == "b");
    CHECK(d.target()[1] == 20.0);
    CHECK_THROWS_AS((void)load_dataset_csv(path, "missing"), MissingTargetError);
}

TEST_CASE("scientific notation and whitespace parse") {
    const std::string text = "a\n 1.5e-3 \n-2E+4\n";
    TempDir tmp;
    const std::string path = tmp.file("s.csv");
    std::ofstream(path) << text;
    const Dataset d = load_dataset_csv(path);
    CHECK(d.feature(0, 0) == 1.5e-3);
    CHECK(d.feature(1, 0) == -2e4);
}

TEST_CASE("jacobian csv round trip (m = 1)") {
    TempDir tmp;
    Rng rng(9);
    Matrix m(20, 4);
    for (double& v : m.data) v = rng.normal();
    const JacobianTensor jac = JacobianTensor::from_matrix(m);
    const std::string path = tmp.file("jac.csv");
    save_jacobian_csv(jac, {"X1", "X2", "X3", "X4"}, path);

    const auto [back, names] = load_jacobian_file(path);
    CHECK(names == std::vector<std::string>{"X1", "X2", "X3", "X4"});
    REQUIRE(back.n_samples() == 20);
    REQUIRE(back.n_outputs() == 1);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(back.at(i, 0, j) == jac.at(i, 0, j));
        }
    }
}

TEST_CASE("jacobian json round trip (m = 2)") {
    TempDir tmp;
    Rng rng(10);
    std::vector<double> flat(6 * 2 * 3);
    for (double& v : flat) v = rng.normal();
    const JacobianTensor jac(6, 2, 3, flat);
    const std::string path = tmp.file("jac.json");
    save_jacobian_json(jac, {"u", "v", "w"}, path);

    const auto [back, names] = load_jacobian_file(path);
    REQUIRE(back.n_outputs() == 2);
    CHECK(names[2] == "w");
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(back.at(i, k, j) == jac.at(i, k, j));
            }
        }
    }
}

TEST_CASE("parser survives random input: parses or throws, never crashes") {
    const std::string alphabet = "a1,\"\n\r .e-+\t;";
    Rng rng(2718);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const std::size_t len = rng.bounded(120);
        for (std::size_t i = 0; i < len; ++i) {
            text += alphabet[rng.bounded(alphabet.size())];
        }
        try {
            const CsvTable t = parse_csv(text);
            CHECK(!t.header.empty());
            for (const auto& row : t.rows) CHECK(row.size() == t.header.size());
        } catch (const SchemaError&) {
            // malformed input is a reported error, not a crash
        }
    }
}

TEST_CASE("malformed jacobian json reports the field path") {
    TempDir tmp;
    const std::string path = tmp.file("bad.json");
    std::ofstream(path) << R"({"n_samples":2,"n_outputs":1,"n_features":1,"values":[[[1]]]})";
    try {
        (void)load_jacobian_file(path);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.path == "values");
    }
}
