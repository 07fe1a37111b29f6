#include "pathpca/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "pathpca/errors.hpp"

namespace pathpca::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view s) {
    const auto hash = s.find('#');
    return trim(hash == std::string_view::npos ? s : s.substr(0, hash));
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::size_t parse_index(std::string_view token, const std::string& name, std::size_t line) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(name, line, "expected a nonnegative integer, got '" + std::string(token) + "'");
    return value;
}

double parse_real(std::string_view token, const std::string& name, std::size_t line) {
    token = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
        throw ParseError(name, line, "expected a number, got '" + std::string(token) + "'");
    if (!std::isfinite(value)) throw ParseError(name, line, "non-finite value");
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, 0, "cannot open file for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw ParseError(path, 0, "write failed");
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc()) throw InvariantError("number formatting failed");
    return std::string(buffer, ptr);
}

GraphDescription parse_graph(std::istream& in, const std::string& name) {
    GraphDescription g;
    bool have_header = false;
    std::optional<std::size_t> vars;
    std::vector<std::pair<std::size_t, std::size_t>> binds;
    std::vector<std::size_t> bind_lines;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = strip_comment(raw);
        if (text.empty()) continue;
        const auto tokens = split_ws(text);
        if (!have_header) {
            bool has_p = false, has_s = false, has_t = false;
            for (auto token : tokens) {
                const auto eq = token.find('=');
                if (eq == std::string_view::npos)
                    throw ParseError(name, line, "header expects key=value pairs, got '" +
                                                     std::string(token) + "'");
                const auto key = token.substr(0, eq);
                const std::size_t value = parse_index(token.substr(eq + 1), name, line);
                if (key == "p") {
                    g.vertex_count = value;
                    has_p = true;
                } else if (key == "source") {
                    g.source = value;
                    has_s = true;
                } else if (key == "terminal") {
                    g.terminal = value;
                    has_t = true;
                } else if (key == "vars") {
                    vars = value;
                } else {
                    throw ParseError(name, line, "unknown header key '" + std::string(key) + "'");
                }
            }
            if (!has_p || !has_s || !has_t)
                throw ParseError(name, line, "header must define p, source and terminal");
            have_header = true;
            continue;
        }
        if (tokens[0] == "edge" || tokens[0] == "bind") {
            if (tokens.size() != 3)
                throw ParseError(name, line, "'" + std::string(tokens[0]) + "' takes two integers");
            const std::size_t a = parse_index(tokens[1], name, line);
            const std::size_t b = parse_index(tokens[2], name, line);
            if (a >= g.vertex_count || (tokens[0] == "edge" && b >= g.vertex_count))
                throw ParseError(name, line, "vertex id out of range [0, " +
                                                 std::to_string(g.vertex_count) + ")");
            if (tokens[0] == "edge") {
                g.edges.push_back({a, b});
            } else {
                binds.emplace_back(a, b);
                bind_lines.push_back(line);
            }
        } else {
            throw ParseError(name, line, "unknown directive '" + std::string(tokens[0]) + "'");
        }
    }
    if (!have_header) throw ParseError(name, line, "missing header line");

    if (binds.empty()) {
        g.binding = identity_binding(g.vertex_count);
        g.dimension = vars.value_or(g.vertex_count);
    } else {
        g.binding.assign(g.vertex_count, std::nullopt);
        std::size_t largest = 0;
        for (std::size_t i = 0; i < binds.size(); ++i) {
            auto [vertex, variable] = binds[i];
            if (g.binding[vertex])
                throw ParseError(name, bind_lines[i], "vertex " + std::to_string(vertex) + " bound twice");
            g.binding[vertex] = variable;
            largest = std::max(largest, variable);
        }
        g.dimension = vars.value_or(largest + 1);
    }
    return g;
}

GraphDescription read_graph_file(const std::string& path) {
    auto in = open_input(path);
    return parse_graph(in, path);
}

void write_graph(std::ostream& out, const Dag& dag) {
    out << "p=" << dag.vertex_count() << " source=" << dag.source() << " terminal=" << dag.terminal()
        << " vars=" << dag.dimension() << '\n';
    for (VertexId v = 0; v < dag.vertex_count(); ++v)
        for (VertexId u : dag.successors(v)) out << "edge " << v << ' ' << u << '\n';
    for (VertexId v = 0; v < dag.vertex_count(); ++v)
        if (auto b = dag.binding(v)) out << "bind " << v << ' ' << *b << '\n';
}

void write_graph_file(const std::string& path, const Dag& dag) {
    auto out = open_output(path);
    write_graph(out, dag);
    finish_output(out, path);
}

Eigen::VectorXd parse_vector(std::istream& in, const std::string& name) {
    std::vector<double> values;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = strip_comment(raw);
        if (text.empty()) continue;
        values.push_back(parse_real(text, name, line));
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd read_vector_file(const std::string& path) {
    auto in = open_input(path);
    return parse_vector(in, path);
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void write_vector_file(const std::string& path, const Eigen::VectorXd& v) {
    auto out = open_output(path);
    write_vector(out, v);
    finish_output(out, path);
}

void write_estimate_file(const std::string& path, const ProjectedVector& estimate) {
    auto out = open_output(path);
    out << "# path:";
    for (VertexId v : estimate.path.vertices) out << ' ' << v;
    out << "\n# support:";
    for (std::size_t i : estimate.path.support) out << ' ' << i;
    out << "\n# degenerate: " << (estimate.degenerate ? 1 : 0) << '\n';
    write_vector(out, estimate.x);
    finish_output(out, path);
}

Eigen::MatrixXd parse_csv_matrix(std::istream& in, bool header, const std::string& name) {
    std::vector<double> values;
    std::size_t rows = 0, cols = 0;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (header && line == 1) continue;
        const auto text = trim(raw);
        if (text.empty()) continue;
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            values.push_back(parse_real(text.substr(start, comma - start), name, line));
            ++count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) cols = count;
        else if (count != cols)
            throw ParseError(name, line, "row has " + std::to_string(count) + " columns, expected " +
                                             std::to_string(cols));
        ++rows;
    }
    if (rows == 0) throw ParseError(name, line, "no data rows");
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
    return m;
}

Eigen::MatrixXd read_csv_matrix(const std::string& path, bool header) {
    auto in = open_input(path);
    return parse_csv_matrix(in, header, path);
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

void write_csv_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
    auto out = open_output(path);
    write_csv_matrix(out, m);
    finish_output(out, path);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return {{"dimension", m.rows()}, {"matrix", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name) {
    const nlohmann::json& rows = j.is_object() ? j.at("matrix") : j;
    if (!rows.is_array() || rows.empty()) throw ParseError(name, 0, "matrix must be a nonempty array of rows");
    const std::size_t n = rows.size();
    const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
    Eigen::MatrixXd m(n, cols);
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].is_array() || rows[r].size() != cols)
            throw ParseError(name, 0, "row " + std::to_string(r) + " has the wrong length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!rows[r][c].is_number())
                throw ParseError(name, 0, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                              ") is not a number");
            m(r, c) = rows[r][c].get<double>();
        }
    }
    if (j.is_object() && j.contains("dimension") && j["dimension"].get<std::size_t>() != n)
        throw ParseError(name, 0, "dimension field disagrees with matrix size");
    return m;
}

CovarianceEstimate read_covariance_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path, 0, e.what());
    }
    return CovarianceEstimate::from_matrix(matrix_from_json(j, path));
}

void write_covariance_file(const std::string& path, const CovarianceEstimate& sigma) {
    write_text_file(path, matrix_to_json(sigma.matrix()).dump() + "\n");
}

KeyValueConfig parse_key_value(std::istream& in, const std::string& name) {
    KeyValueConfig cfg;
    cfg.source_name = name;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = strip_comment(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(name, line, "expected key = value, got '" + std::string(text) + "'");
        const std::string key(trim(text.substr(0, eq)));
        const std::string value(trim(text.substr(eq + 1)));
        if (key.empty()) throw ParseError(name, line, "empty key");
        if (!cfg.entries.emplace(key, KeyValueConfig::Entry{value, line}).second)
            throw ParseError(name, line, "duplicate key '" + key + "'");
    }
    return cfg;
}

KeyValueConfig read_key_value_file(const std::string& path) {
    auto in = open_input(path);
    return parse_key_value(in, path);
}

std::string read_text_file(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    finish_output(out, path);
}

}  // namespace pathpca::io
