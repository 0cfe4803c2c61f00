#ifndef MFTS_PANEL_IO_HPP
#define MFTS_PANEL_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "mfts/matrix.hpp"

namespace mfts {

enum class Transform { None, Log, LogDiff };

Transform parse_transform(const std::string& name);
std::string transform_name(Transform t);

// Axis bookkeeping for a long-format panel. Row/column ids keep their order
// of first appearance in the file; time ids sort numerically when every id
// parses as an integer, lexicographically otherwise (ISO dates sort right).
struct PanelSchema {
    std::vector<std::string> time_ids;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    Transform transform = Transform::None;
};

// Reads a long-format CSV with header t,row,col,value. The (t,row,col) grid
// must be complete: a duplicate triple raises DuplicateCell and a missing one
// MissingCell (first offender in time-major, then row, then column order).
std::pair<MatrixTimeSeries, PanelSchema> load_panel(const std::string& path,
                                                    Transform transform = Transform::None);

// 17-significant-digit decimal rendering; round-trips doubles exactly
std::string fmt17(double v);

// writers (LF line endings)
void write_long_csv(const std::string& path, const MatrixTimeSeries& x, const PanelSchema& schema);
void write_eigvals_csv(const std::string& path, const std::vector<double>& eigvals);
// matrix with a leading label column; header label,<col_prefix>_1..
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& labels, const std::string& label_header,
                      const std::string& col_prefix);
// factor series: header t,f_1_1,..,f_r1_r2 (cells in row-major order)
void write_factors_csv(const std::string& path, const MatrixTimeSeries& f,
                       const std::vector<std::string>& time_ids);
// long row,col,value triple list
void write_heatmap_csv(const std::string& path, const Matrix& m,
                       const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids);
void write_text_file(const std::string& path, const std::string& content);

// readers (round-trip closure for every writer above)
std::vector<double> read_eigvals_csv(const std::string& path);
Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* labels = nullptr);
MatrixTimeSeries read_factors_csv(const std::string& path,
                                  std::vector<std::string>* time_ids = nullptr);
Matrix read_heatmap_csv(const std::string& path);
// generic: header + rows of comma-separated fields
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);

// default integer axis labels "1".."n"
std::vector<std::string> default_labels(int n);

} // namespace mfts

#endif
