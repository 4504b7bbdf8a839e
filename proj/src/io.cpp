#include "micsel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "micsel/errors.hpp"

namespace micsel {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view strip_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
    cell = strip_quotes(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("line " + std::to_string(line) + ": column '" + std::string(column) +
                            "' is not a finite number: '" + std::string(cell) + "'",
                        line);
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvSchema& schema, std::string_view source) {
    const std::size_t expected = schema.kind == DataKind::regression ? 2 : schema.kind == DataKind::timeseries ? 1 : 0;
    if (schema.columns.empty()) throw DataError("no columns selected");
    if (expected && schema.columns.size() != expected) {
        throw DataError(std::string(to_string(schema.kind)) + " data need exactly " + std::to_string(expected) +
                        " column(s)");
    }

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    // Skip a UTF-8 byte-order mark.
    if (!lines.empty() && lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);
    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw DataError(std::string(source) + " is empty");

    const std::vector<std::string_view> header = split_fields(lines[header_line]);
    std::vector<std::size_t> index;
    for (const std::string& col : schema.columns) {
        const auto it = std::find_if(header.begin(), header.end(),
                                     [&](std::string_view h) { return strip_quotes(h) == col; });
        if (it == header.end()) throw DataError(std::string(source) + ": missing column '" + col + "'");
        index.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    std::vector<double> flat;
    std::size_t rows = 0;
    for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::vector<std::string_view> fields = split_fields(lines[li]);
        const std::size_t line_no = li + 1;
        for (std::size_t c = 0; c < index.size(); ++c) {
            if (index[c] >= fields.size()) {
                throw DataError("line " + std::to_string(line_no) + ": missing value for column '" + schema.columns[c] +
                                    "'",
                                line_no);
            }
            flat.push_back(parse_number(fields[index[c]], line_no, schema.columns[c]));
        }
        ++rows;
    }
    if (rows == 0) throw DataError(std::string(source) + " has a header but no data rows");

    switch (schema.kind) {
        case DataKind::timeseries: return Dataset::timeseries(std::move(flat));
        case DataKind::regression: {
            std::vector<double> x(rows), y(rows);
            for (std::size_t r = 0; r < rows; ++r) {
                x[r] = flat[2 * r];
                y[r] = flat[2 * r + 1];
            }
            return Dataset::regression(x, y);
        }
        case DataKind::unconditional: return Dataset::unconditional(index.size(), std::move(flat));
    }
    throw DataError("unknown data kind");
}

Dataset ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    return parse_csv(text, schema, path);
}

std::string format_csv(const Dataset& data, const std::vector<std::string>& column_names) {
    if (column_names.size() != data.width()) throw ContractError("one column name per dataset column is required");
    std::string out;
    for (std::size_t j = 0; j < column_names.size(); ++j) {
        if (j) out += ',';
        out += column_names[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_double(row[j]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& column_names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << format_csv(data, column_names);
    if (!out) throw DataError("write to '" + path + "' failed");
}

TransformSpec parse_transform(std::string_view text) {
    text = trim(text);
    TransformSpec spec;
    if (text == "log") {
        spec.op = TransformOp::log;
    } else if (text == "log_return") {
        spec.op = TransformOp::log_return;
    } else if (text == "standardize") {
        spec.op = TransformOp::standardize;
    } else if (text.starts_with("bins_to_radians")) {
        spec.op = TransformOp::bins_to_radians;
        std::string_view rest = text.substr(std::string_view("bins_to_radians").size());
        if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') {
            throw DataError("bins_to_radians needs a bin count, e.g. bins_to_radians(16)");
        }
        rest = rest.substr(1, rest.size() - 2);
        std::size_t bins = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), bins);
        if (ec != std::errc() || ptr != rest.data() + rest.size() || bins == 0) {
            throw DataError("invalid bin count '" + std::string(rest) + "'");
        }
        spec.bins = bins;
    } else {
        throw DataError("unknown transform '" + std::string(text) + "'");
    }
    return spec;
}

Dataset transform(const Dataset& data, const TransformSpec& spec) {
    const std::size_t w = data.width();
    if (spec.column && *spec.column >= w) throw DataError("transform column out of range");
    auto applies = [&](std::size_t j) { return !spec.column || *spec.column == j; };
    std::vector<double> v(data.values().begin(), data.values().end());
    const std::size_t n = data.size();

    auto rebuild = [&](std::vector<double> values) {
        switch (data.kind()) {
            case DataKind::timeseries: return Dataset::timeseries(std::move(values));
            case DataKind::regression: {
                std::vector<double> x, y;
                for (std::size_t i = 0; i < values.size(); i += 2) {
                    x.push_back(values[i]);
                    y.push_back(values[i + 1]);
                }
                return Dataset::regression(x, y);
            }
            case DataKind::unconditional: return Dataset::unconditional(w, std::move(values));
        }
        throw DataError("unknown data kind");
    };

    switch (spec.op) {
        case TransformOp::log: {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < w; ++j) {
                    if (!applies(j)) continue;
                    double& x = v[i * w + j];
                    if (!(x > 0.0)) throw DataError("log of non-positive value at row " + std::to_string(i + 1), i + 1);
                    x = std::log(x);
                }
            }
            return rebuild(std::move(v));
        }
        case TransformOp::log_return: {
            if (w != 1 || data.kind() == DataKind::regression) {
                throw DataError("log_return applies to a single ordered column");
            }
            if (n < 2) throw DataError("log_return needs at least two values");
            std::vector<double> out;
            out.reserve(n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (!(v[i] > 0.0)) throw DataError("log of non-positive value at row " + std::to_string(i + 1), i + 1);
                if (i) out.push_back(std::log(v[i]) - std::log(v[i - 1]));
            }
            return rebuild(std::move(out));
        }
        case TransformOp::standardize: {
            if (n < 2) throw DataError("standardize needs at least two values");
            for (std::size_t j = 0; j < w; ++j) {
                if (!applies(j)) continue;
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i) mean += v[i * w + j];
                mean /= static_cast<double>(n);
                double ss = 0.0;
                for (std::size_t i = 0; i < n; ++i) ss += (v[i * w + j] - mean) * (v[i * w + j] - mean);
                const double sd = std::sqrt(ss / static_cast<double>(n - 1));
                if (!(sd > 0.0)) throw DataError("cannot standardize a constant column");
                for (std::size_t i = 0; i < n; ++i) v[i * w + j] = (v[i * w + j] - mean) / sd;
            }
            return rebuild(std::move(v));
        }
        case TransformOp::bins_to_radians: {
            const double width = 2.0 * std::numbers::pi / static_cast<double>(spec.bins);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < w; ++j) {
                    if (applies(j)) v[i * w + j] *= width;
                }
            }
            return rebuild(std::move(v));
        }
    }
    throw DataError("unknown transform");
}

}  // namespace micsel
