#pragma once

#include <string>
#include <utility>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

// RFC-4180 table: quoted fields, doubled quotes, CRLF or LF record ends.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

// First row is the header; an optional target column is selected by name.
// All remaining columns become features in file order.
Dataset load_dataset_csv(const std::string& path, const std::string& target_name = "");

// Writes features plus the target column (when present) under target_name.
void save_dataset_csv(const Dataset& dataset, const std::string& path,
                      const std::string& target_name = "Y");

// m = 1 tensors travel as CSV (header = feature names); m > 1 as JSON
// {"n_samples":N,"n_outputs":m,"n_features":n,"values":[[[...]]]} with
// row-major [i][k][j] nesting. Loading dispatches on the leading byte.
std::pair<JacobianTensor, std::vector<std::string>> load_jacobian_file(
    const std::string& path);

void save_jacobian_csv(const JacobianTensor& jac, const std::vector<std::string>& names,
                       const std::string& path);
void save_jacobian_json(const JacobianTensor& jac, const std::vector<std::string>& names,
                        const std::string& path);

// Shortest round-trip decimal form of a double (locale-independent).
std::string format_double(double value);

}  // namespace alphasens
