#include "spiky/matrix.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spiky/util.hpp"

namespace spiky {

std::string field_name(Field f) { return f == Field::Real ? "real" : "gf2"; }

Field field_from_name(const std::string& name) {
    if (name == "real") return Field::Real;
    if (name == "gf2") return Field::GF2;
    throw std::invalid_argument("unknown field: " + name);
}

Matrix::Matrix(int nrows, int ncols, Field field)
    : nrows_(nrows), ncols_(ncols), field_(field),
      data_(std::size_t(nrows) * std::size_t(ncols), 0.0) {
    if (nrows < 0 || ncols < 0) throw std::invalid_argument("negative matrix dimension");
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows, Field field) {
    int nr = int(rows.size());
    int nc = nr == 0 ? 0 : int(rows[0].size());
    Matrix m(nr, nc, field);
    for (int i = 0; i < nr; ++i) {
        if (int(rows[i].size()) != nc) throw std::invalid_argument("ragged rows");
        for (int j = 0; j < nc; ++j) m.at(i, j) = rows[i][j];
    }
    m.validate();
    return m;
}

bool Matrix::is_zero() const {
    for (double x : data_)
        if (x != 0.0) return false;
    return true;
}

bool Matrix::is_boolean() const {
    for (double x : data_)
        if (x != 0.0 && x != 1.0) return false;
    return true;
}

void Matrix::validate() const {
    for (double x : data_) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite matrix entry");
        if (field_ == Field::GF2 && x != 0.0 && x != 1.0)
            throw std::invalid_argument("GF2 entry outside {0,1}");
    }
}

Matrix to_gf2(const Matrix& m) {
    if (!m.is_boolean()) throw std::invalid_argument("to_gf2: matrix is not 0/1");
    Matrix out(m.nrows(), m.ncols(), Field::GF2);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j) out.at(i, j) = m(i, j);
    return out;
}

Matrix to_real(const Matrix& m) {
    Matrix out(m.nrows(), m.ncols(), Field::Real);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j) out.at(i, j) = m(i, j);
    return out;
}

namespace {

std::string format_entry(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace

std::string format_matrix(const Matrix& m) {
    std::string out = "matrix " + std::to_string(m.nrows()) + " " +
                      std::to_string(m.ncols()) + " " + field_name(m.field()) + "\n";
    for (int i = 0; i < m.nrows(); ++i) {
        for (int j = 0; j < m.ncols(); ++j) {
            if (j) out += ' ';
            out += format_entry(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Matrix parse_matrix(std::istream& in) {
    std::string tag;
    in >> tag;
    if (tag != "matrix") throw std::invalid_argument("expected 'matrix' header");
    int nr, nc;
    std::string fname;
    if (!(in >> nr >> nc >> fname)) throw std::invalid_argument("bad matrix header");
    if (nr < 0 || nc < 0) throw std::invalid_argument("bad matrix dimensions");
    Matrix m(nr, nc, field_from_name(fname));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) {
            std::string tok;
            if (!(in >> tok)) throw std::invalid_argument("matrix body truncated");
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw std::invalid_argument("bad matrix entry: " + tok);
            m.at(i, j) = v;
        }
    m.validate();
    return m;
}

Matrix parse_matrix(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix(in);
}

void save_matrix(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << format_matrix(m);
}

Matrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return parse_matrix(in);
}

std::string matrix_hash(const Matrix& m) {
    std::uint64_t h = fnv1a64(format_matrix(m));
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace spiky
