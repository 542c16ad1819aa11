#include "alphasens/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alphasens/errors.hpp"

namespace alphasens {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw SchemaError("row " + std::to_string(row) + ", column " + std::to_string(col),
                          "not a number: '" + field + "'");
    }
    return value;
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool record_has_data = false;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        record_has_data = true;
    };
    auto end_record = [&]() {
        if (!record_has_data && record.empty()) return;  // blank line
        end_field();
        if (table.header.empty()) {
            table.header = std::move(record);
        } else {
            table.rows.push_back(std::move(record));
        }
        record.clear();
        record_has_data = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; record_has_data = true; break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n': end_record(); break;
            default: field += c; record_has_data = true; break;
        }
    }
    if (in_quotes) throw SchemaError("(csv)", "unterminated quoted field");
    if (record_has_data || !record.empty()) end_record();

    if (table.header.empty()) throw SchemaError("(csv)", "missing header row");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size()) {
            throw SchemaError("row " + std::to_string(r + 2),
                              "expected " + std::to_string(table.header.size()) +
                                  " fields, got " + std::to_string(table.rows[r].size()));
        }
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) { return parse_csv(read_file(path)); }

Dataset load_dataset_csv(const std::string& path, const std::string& target_name) {
    const CsvTable table = read_csv_file(path);
    if (table.rows.empty()) throw SchemaError("(csv)", "no data rows in '" + path + "'");

    std::ptrdiff_t target_col = -1;
    if (!target_name.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (table.header[c] == target_name) {
                target_col = static_cast<std::ptrdiff_t>(c);
                break;
            }
        }
        if (target_col < 0) throw MissingTargetError();
    }

    std::vector<std::string> names;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<std::ptrdiff_t>(c) == target_col) continue;
        names.push_back(table.header[c]);
        feature_cols.push_back(c);
    }
    if (names.empty()) throw SchemaError("(csv)", "no feature columns");

    Matrix features(table.rows.size(), names.size());
    std::vector<double> target;
    if (target_col >= 0) target.resize(table.rows.size());

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < feature_cols.size(); ++c) {
            features(r, c) = parse_number(table.rows[r][feature_cols[c]], r + 2, c + 1);
        }
        if (target_col >= 0) {
            target[r] = parse_number(table.rows[r][static_cast<std::size_t>(target_col)],
                                     r + 2, static_cast<std::size_t>(target_col) + 1);
        }
    }
    return Dataset(std::move(features), std::move(names), std::move(target));
}

void save_dataset_csv(const Dataset& dataset, const std::string& path,
                      const std::string& target_name) {
    std::string out;
    for (std::size_t c = 0; c < dataset.n_features(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(dataset.feature_names()[c]);
    }
    if (dataset.has_target()) {
        out += ',';
        out += quote_if_needed(target_name);
    }
    out += '\n';
    for (std::size_t r = 0; r < dataset.n_samples(); ++r) {
        for (std::size_t c = 0; c < dataset.n_features(); ++c) {
            if (c) out += ',';
            out += format_double(dataset.feature(r, c));
        }
        if (dataset.has_target()) {
            out += ',';
            out += format_double(dataset.target()[r]);
        }
        out += '\n';
    }
    write_file(path, out);
}

std::pair<JacobianTensor, std::vector<std::string>> load_jacobian_file(
    const std::string& path) {
    const std::string text = read_file(path);
    std::size_t first = 0;
    while (first < text.size() &&
           (text[first] == ' ' || text[first] == '\n' || text[first] == '\r' ||
            text[first] == '\t')) {
        ++first;
    }
    if (first < text.size() && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("(root)", e.what());
        }
        for (const char* key : {"n_samples", "n_outputs", "n_features", "values"}) {
            if (!doc.contains(key)) throw SchemaError(key, "missing field");
        }
        const auto n = doc["n_samples"].get<std::size_t>();
        const auto m = doc["n_outputs"].get<std::size_t>();
        const auto nf = doc["n_features"].get<std::size_t>();
        const auto& values = doc["values"];
        if (!values.is_array() || values.size() != n) {
            throw SchemaError("values", "expected " + std::to_string(n) + " sample slices");
        }
        std::vector<double> flat;
        flat.reserve(n * m * nf);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& slice = values[i];
            if (!slice.is_array() || slice.size() != m) {
                throw SchemaError("values[" + std::to_string(i) + "]",
                                  "expected " + std::to_string(m) + " output rows");
            }
            for (std::size_t k = 0; k < m; ++k) {
                const auto& row = slice[k];
                if (!row.is_array() || row.size() != nf) {
                    throw SchemaError(
                        "values[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                        "expected " + std::to_string(nf) + " entries");
                }
                for (std::size_t j = 0; j < nf; ++j) {
                    if (!row[j].is_number()) {
                        throw SchemaError("values[" + std::to_string(i) + "][" +
                                              std::to_string(k) + "][" + std::to_string(j) +
                                              "]",
                                          "expected a number");
                    }
                    flat.push_back(row[j].get<double>());
                }
            }
        }
        std::vector<std::string> names;
        if (doc.contains("feature_names")) {
            names = doc["feature_names"].get<std::vector<std::string>>();
        } else {
            for (std::size_t j = 0; j < nf; ++j) names.push_back("X" + std::to_string(j + 1));
        }
        return {JacobianTensor(n, m, nf, std::move(flat)), std::move(names)};
    }

    const CsvTable table = parse_csv(text);
    if (table.rows.empty()) throw SchemaError("(csv)", "no data rows in '" + path + "'");
    Matrix derivatives(table.rows.size(), table.header.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            derivatives(r, c) = parse_number(table.rows[r][c], r + 2, c + 1);
        }
    }
    return {JacobianTensor::from_matrix(derivatives), table.header};
}

void save_jacobian_csv(const JacobianTensor& jac, const std::vector<std::string>& names,
                       const std::string& path) {
    if (jac.n_outputs() != 1) {
        throw DimensionMismatchError("CSV jacobian format requires a scalar output");
    }
    if (names.size() != jac.n_features()) {
        throw DimensionMismatchError("names vs jacobian width");
    }
    std::string out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(names[c]);
    }
    out += '\n';
    for (std::size_t i = 0; i < jac.n_samples(); ++i) {
        for (std::size_t j = 0; j < jac.n_features(); ++j) {
            if (j) out += ',';
            out += format_double(jac.at(i, 0, j));
        }
        out += '\n';
    }
    write_file(path, out);
}

void save_jacobian_json(const JacobianTensor& jac, const std::vector<std::string>& names,
                        const std::string& path) {
    json doc;
    doc["n_samples"] = jac.n_samples();
    doc["n_outputs"] = jac.n_outputs();
    doc["n_features"] = jac.n_features();
    doc["feature_names"] = names;
    json values = json::array();
    for (std::size_t i = 0; i < jac.n_samples(); ++i) {
        json slice = json::array();
        for (std::size_t k = 0; k < jac.n_outputs(); ++k) {
            json row = json::array();
            for (std::size_t j = 0; j < jac.n_features(); ++j) row.push_back(jac.at(i, k, j));
            slice.push_back(std::move(row));
        }
        values.push_back(std::move(slice));
    }
    doc["values"] = std::move(values);
    write_file(path, doc.dump() + "\n");
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error("failed to format double");
    return std::string(buf, ptr);
}

}  // namespace alphasens
