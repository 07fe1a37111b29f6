#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "pathpca/data_model.hpp"
#include "pathpca/graph.hpp"
#include "pathpca/projection.hpp"

namespace pathpca::io {

// Graph text format, one directive per line, `#` starts a comment:
//   p=<vertices> source=<id> terminal=<id> [vars=<variables>]
//   edge <from> <to>
//   bind <vertex> <variable>
// Without bind lines every vertex v is bound to variable v. `vars` defaults
// to one past the largest bound variable.
GraphDescription parse_graph(std::istream& in, const std::string& source_name = "<graph>");
GraphDescription read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Dag& dag);
void write_graph_file(const std::string& path, const Dag& dag);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// One value per line; blank lines and `#` comments are skipped.
Eigen::VectorXd parse_vector(std::istream& in, const std::string& source_name = "<vector>");
Eigen::VectorXd read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const Eigen::VectorXd& v);
void write_vector_file(const std::string& path, const Eigen::VectorXd& v);

// Vector file preceded by `# path:` and `# support:` comment lines.
void write_estimate_file(const std::string& path, const ProjectedVector& estimate);

// Comma-separated matrix, one row per variable and one column per
// observation. `header` skips the first line.
Eigen::MatrixXd parse_csv_matrix(std::istream& in, bool header,
                                 const std::string& source_name = "<csv>");
Eigen::MatrixXd read_csv_matrix(const std::string& path, bool header);
void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_csv_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

// {"dimension": p, "matrix": [[...], ...]}; a bare array of rows is also read.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& source_name = "<json>");
CovarianceEstimate read_covariance_file(const std::string& path);
void write_covariance_file(const std::string& path, const CovarianceEstimate& sigma);

// `key = value` lines with `#` comments. Values keep their line number for
// diagnostics.
struct KeyValueConfig {
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::string source_name;
    std::map<std::string, Entry> entries;

    bool has(const std::string& key) const { return entries.count(key) != 0; }
};

KeyValueConfig parse_key_value(std::istream& in, const std::string& source_name = "<config>");
KeyValueConfig read_key_value_file(const std::string& path);

// Whole-file helpers that raise ParseError naming the path when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pathpca::io
