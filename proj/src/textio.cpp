#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "amprestore/linops.hpp"

namespace amprestore {

namespace {

std::vector<double> parse_reals(const std::string& line, const std::string& source, std::size_t lineno) {
    std::vector<double> values;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
            throw ParseError(source, lineno, "not a finite real: '" + tok + "'");
        values.push_back(v);
    }
    return values;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::shared_ptr<const DenseMatrix> read_dense_matrix(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line) && blank(line)) ++lineno;
    ++lineno;
    if (!in && line.empty()) throw ParseError(source, lineno, "missing 'rows cols' header");
    std::istringstream header(line);
    long long rows = 0, cols = 0;
    std::string extra;
    if (!(header >> rows >> cols) || (header >> extra) || rows <= 0 || cols <= 0)
        throw ParseError(source, lineno, "header must be two positive integers 'rows cols'");

    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(rows * cols));
    long long read_rows = 0;
    while (read_rows < rows && std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto values = parse_reals(line, source, lineno);
        if (static_cast<long long>(values.size()) != cols)
            throw ParseError(source, lineno,
                             "expected " + std::to_string(cols) + " values, got " + std::to_string(values.size()));
        data.insert(data.end(), values.begin(), values.end());
        ++read_rows;
    }
    if (read_rows != rows)
        throw ParseError(source, lineno,
                         "expected " + std::to_string(rows) + " rows, got " + std::to_string(read_rows));
    return std::make_shared<DenseMatrix>(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                                         std::move(data));
}

std::shared_ptr<const DenseMatrix> load_dense_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return read_dense_matrix(in, path);
}

void write_dense_matrix(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m.at(r, c);
        out << '\n';
    }
}

Signal read_vector(std::istream& in, const std::string& source) {
    Signal v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto values = parse_reals(line, source, lineno);
        v.insert(v.end(), values.begin(), values.end());
    }
    if (v.empty()) throw ParseError(source, lineno, "vector is empty");
    return v;
}

Signal load_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return read_vector(in, path);
}

void write_vector(std::ostream& out, std::span<const double> v) {
    out << std::setprecision(17);
    for (double x : v) out << x << '\n';
}

}  // namespace amprestore
