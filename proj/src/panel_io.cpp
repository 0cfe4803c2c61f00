#include "mfts/panel_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "mfts/linalg.hpp"

namespace mfts {

Transform parse_transform(const std::string& name) {
    if (name == "none") return Transform::None;
    if (name == "log") return Transform::Log;
    if (name == "logdiff") return Transform::LogDiff;
    throw Error(ErrorCode::ParseError, "unknown transform '" + name + "'");
}

std::string transform_name(Transform t) {
    switch (t) {
        case Transform::None: return "none";
        case Transform::Log: return "log";
        case Transform::LogDiff: return "logdiff";
    }
    return "?";
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_value(const std::string& field, int line_no) {
    errno = 0;
    char* end = nullptr;
    const std::string t = trim(field);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": cannot parse value '" + field + "'");
    return v;
}

bool parse_integer(const std::string& s, long long* out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    *out = v;
    return true;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    return in;
}

} // namespace

std::pair<MatrixTimeSeries, PanelSchema> load_panel(const std::string& path, Transform transform) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::ParseError, "'" + path + "' is empty");
    {
        auto header = split_line(line);
        for (auto& h : header) h = trim(h);
        if (header != std::vector<std::string>{"t", "row", "col", "value"})
            throw Error(ErrorCode::ParseError,
                        "line 1: expected header 't,row,col,value' in '" + path + "'");
    }

    struct Cell {
        std::string t, row, col;
        double value;
    };
    std::vector<Cell> cells;
    std::vector<std::string> time_seen, row_ids, col_ids;
    std::map<std::string, int> time_index, row_index, col_index;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != 4)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                                   ": expected 4 fields, got " +
                                                   std::to_string(fields.size()));
        Cell c{trim(fields[0]), trim(fields[1]), trim(fields[2]), parse_value(fields[3], line_no)};
        if (time_index.emplace(c.t, 0).second) time_seen.push_back(c.t);
        if (row_index.emplace(c.row, static_cast<int>(row_ids.size())).second)
            row_ids.push_back(c.row);
        if (col_index.emplace(c.col, static_cast<int>(col_ids.size())).second)
            col_ids.push_back(c.col);
        cells.push_back(std::move(c));
    }
    if (cells.empty()) throw Error(ErrorCode::ParseError, "'" + path + "' has no data rows");

    // numeric time ids sort numerically, otherwise lexicographically
    std::vector<std::string> time_ids = time_seen;
    {
        bool all_int = true;
        std::vector<std::pair<long long, std::string>> keyed;
        for (const auto& t : time_ids) {
            long long v = 0;
            if (!parse_integer(t, &v)) {
                all_int = false;
                break;
            }
            keyed.emplace_back(v, t);
        }
        if (all_int) {
            std::sort(keyed.begin(), keyed.end());
            for (size_t i = 0; i < keyed.size(); ++i) time_ids[i] = keyed[i].second;
        } else {
            std::sort(time_ids.begin(), time_ids.end());
        }
        for (size_t i = 0; i < time_ids.size(); ++i)
            time_index[time_ids[i]] = static_cast<int>(i);
    }

    const int t_len = static_cast<int>(time_ids.size());
    const int p1 = static_cast<int>(row_ids.size());
    const int p2 = static_cast<int>(col_ids.size());
    std::vector<Matrix> data(static_cast<size_t>(t_len), Matrix(p1, p2));
    std::vector<std::vector<char>> seen(static_cast<size_t>(t_len),
                                        std::vector<char>(static_cast<size_t>(p1) * p2, 0));
    for (const auto& c : cells) {
        const int ti = time_index[c.t];
        const int ri = row_index[c.row];
        const int ci = col_index[c.col];
        char& flag = seen[static_cast<size_t>(ti)][static_cast<size_t>(ri) * p2 + ci];
        if (flag)
            throw Error(ErrorCode::DuplicateCell,
                        "duplicate triple (" + c.t + "," + c.row + "," + c.col + ")");
        flag = 1;
        data[static_cast<size_t>(ti)](ri, ci) = c.value;
    }
    for (int ti = 0; ti < t_len; ++ti)
        for (int ri = 0; ri < p1; ++ri)
            for (int ci = 0; ci < p2; ++ci)
                if (!seen[static_cast<size_t>(ti)][static_cast<size_t>(ri) * p2 + ci])
                    throw Error(ErrorCode::MissingCell,
                                "missing triple (" + time_ids[static_cast<size_t>(ti)] + "," +
                                    row_ids[static_cast<size_t>(ri)] + "," +
                                    col_ids[static_cast<size_t>(ci)] + ")");

    PanelSchema schema{time_ids, row_ids, col_ids, transform};
    MatrixTimeSeries series{std::move(data)};
    if (transform == Transform::Log || transform == Transform::LogDiff) {
        std::vector<Matrix> logged;
        logged.reserve(static_cast<size_t>(series.length()));
        for (int t = 0; t < series.length(); ++t) {
            Matrix m = series[t];
            for (int i = 0; i < p1; ++i)
                for (int j = 0; j < p2; ++j) {
                    if (m(i, j) <= 0.0)
                        throw Error(ErrorCode::NonPositiveForLog,
                                    "value at (" + time_ids[static_cast<size_t>(t)] + "," +
                                        row_ids[static_cast<size_t>(i)] + "," +
                                        col_ids[static_cast<size_t>(j)] +
                                        ") must be positive for the log transform");
                    m(i, j) = std::log(m(i, j));
                }
            logged.push_back(std::move(m));
        }
        series = MatrixTimeSeries(std::move(logged));
        if (transform == Transform::LogDiff) {
            series = difference(series);
            schema.time_ids.erase(schema.time_ids.begin());
        }
    }
    return {std::move(series), std::move(schema)};
}

void write_long_csv(const std::string& path, const MatrixTimeSeries& x,
                    const PanelSchema& schema) {
    if (static_cast<int>(schema.time_ids.size()) != x.length() ||
        static_cast<int>(schema.row_ids.size()) != x.rows() ||
        static_cast<int>(schema.col_ids.size()) != x.cols())
        throw Error(ErrorCode::ShapeMismatch, "write_long_csv: schema/series mismatch");
    std::ofstream out = open_out(path);
    out << "t,row,col,value\n";
    for (int t = 0; t < x.length(); ++t)
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                out << schema.time_ids[static_cast<size_t>(t)] << ','
                    << schema.row_ids[static_cast<size_t>(i)] << ','
                    << schema.col_ids[static_cast<size_t>(j)] << ',' << fmt17(x[t](i, j)) << "\n";
}

void write_eigvals_csv(const std::string& path, const std::vector<double>& eigvals) {
    std::ofstream out = open_out(path);
    out << "k,eigenvalue\n";
    for (size_t k = 0; k < eigvals.size(); ++k)
        out << (k + 1) << ',' << fmt17(eigvals[k]) << "\n";
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& labels, const std::string& label_header,
                      const std::string& col_prefix) {
    if (static_cast<int>(labels.size()) != m.rows())
        throw Error(ErrorCode::ShapeMismatch, "write_matrix_csv: label count mismatch");
    std::ofstream out = open_out(path);
    out << label_header;
    for (int j = 0; j < m.cols(); ++j) out << ',' << col_prefix << '_' << (j + 1);
    out << "\n";
    for (int i = 0; i < m.rows(); ++i) {
        out << labels[static_cast<size_t>(i)];
        for (int j = 0; j < m.cols(); ++j) out << ',' << fmt17(m(i, j));
        out << "\n";
    }
}

void write_factors_csv(const std::string& path, const MatrixTimeSeries& f,
                       const std::vector<std::string>& time_ids) {
    if (static_cast<int>(time_ids.size()) != f.length())
        throw Error(ErrorCode::ShapeMismatch, "write_factors_csv: time id count mismatch");
    std::ofstream out = open_out(path);
    out << "t";
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) out << ",f_" << (i + 1) << '_' << (j + 1);
    out << "\n";
    for (int t = 0; t < f.length(); ++t) {
        out << time_ids[static_cast<size_t>(t)];
        for (int i = 0; i < f.rows(); ++i)
            for (int j = 0; j < f.cols(); ++j) out << ',' << fmt17(f[t](i, j));
        out << "\n";
    }
}

void write_heatmap_csv(const std::string& path, const Matrix& m,
                       const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids) {
    if (static_cast<int>(row_ids.size()) != m.rows() ||
        static_cast<int>(col_ids.size()) != m.cols())
        throw Error(ErrorCode::ShapeMismatch, "write_heatmap_csv: label count mismatch");
    std::ofstream out = open_out(path);
    out << "row,col,value\n";
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out << row_ids[static_cast<size_t>(i)] << ',' << col_ids[static_cast<size_t>(j)] << ','
                << fmt17(m(i, j)) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line));
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, "'" + path + "' is empty");
    return rows;
}

std::vector<double> read_eigvals_csv(const std::string& path) {
    auto rows = read_csv_rows(path);
    std::vector<double> out;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2)
            throw Error(ErrorCode::ParseError, "eigvals row " + std::to_string(i + 1));
        out.push_back(parse_value(rows[i][1], static_cast<int>(i + 1)));
    }
    return out;
}

Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* labels) {
    auto rows = read_csv_rows(path);
    if (rows.size() < 2) throw Error(ErrorCode::ParseError, "'" + path + "' has no data rows");
    const int cols = static_cast<int>(rows[0].size()) - 1;
    if (cols < 1) throw Error(ErrorCode::ParseError, "'" + path + "': no value columns");
    Matrix m(static_cast<int>(rows.size()) - 1, cols);
    if (labels) labels->clear();
    for (size_t i = 1; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != cols + 1)
            throw Error(ErrorCode::ParseError, "'" + path + "' row " + std::to_string(i + 1) +
                                                   ": ragged field count");
        if (labels) labels->push_back(trim(rows[i][0]));
        for (int j = 0; j < cols; ++j)
            m(static_cast<int>(i) - 1, j) =
                parse_value(rows[i][static_cast<size_t>(j) + 1], static_cast<int>(i + 1));
    }
    return m;
}

MatrixTimeSeries read_factors_csv(const std::string& path, std::vector<std::string>* time_ids) {
    std::vector<std::string> labels;
    const Matrix flat = read_matrix_csv(path, &labels);
    auto rows = read_csv_rows(path);
    // header f_i_j columns carry the factor shape
    int r1 = 0, r2 = 0;
    for (size_t j = 1; j < rows[0].size(); ++j) {
        int i = 0, k = 0;
        if (std::sscanf(trim(rows[0][j]).c_str(), "f_%d_%d", &i, &k) != 2)
            throw Error(ErrorCode::ParseError, "'" + path + "': bad factor column header");
        r1 = std::max(r1, i);
        r2 = std::max(r2, k);
    }
    if (r1 * r2 != flat.cols())
        throw Error(ErrorCode::ParseError, "'" + path + "': header shape mismatch");
    std::vector<Matrix> out;
    for (int t = 0; t < flat.rows(); ++t) {
        Matrix f(r1, r2);
        int k = 0;
        for (int i = 0; i < r1; ++i)
            for (int j = 0; j < r2; ++j) f(i, j) = flat(t, k++);
        out.push_back(std::move(f));
    }
    if (time_ids) *time_ids = labels;
    return MatrixTimeSeries(std::move(out));
}

Matrix read_heatmap_csv(const std::string& path) {
    auto rows = read_csv_rows(path);
    std::vector<std::string> row_ids, col_ids;
    std::map<std::string, int> row_index, col_index;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3)
            throw Error(ErrorCode::ParseError, "heatmap row " + std::to_string(i + 1));
        const std::string r = trim(rows[i][0]), c = trim(rows[i][1]);
        if (row_index.emplace(r, static_cast<int>(row_ids.size())).second) row_ids.push_back(r);
        if (col_index.emplace(c, static_cast<int>(col_ids.size())).second) col_ids.push_back(c);
    }
    Matrix m(static_cast<int>(row_ids.size()), static_cast<int>(col_ids.size()));
    for (size_t i = 1; i < rows.size(); ++i)
        m(row_index[trim(rows[i][0])], col_index[trim(rows[i][1])]) =
            parse_value(rows[i][2], static_cast<int>(i + 1));
    return m;
}

std::vector<std::string> default_labels(int n) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
    return out;
}

} // namespace mfts
