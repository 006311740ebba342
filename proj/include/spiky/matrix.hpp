#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spiky {

enum class Field { Real, GF2 };

std::string field_name(Field f);
Field field_from_name(const std::string& name);

/// Dense field-tagged matrix. Real entries are exact doubles; GF2 entries
/// are stored as 0.0/1.0 and all GF2 arithmetic is exact.
class Matrix {
public:
    Matrix() = default;
    Matrix(int nrows, int ncols, Field field = Field::Real);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows,
                            Field field = Field::Real);

    int nrows() const { return nrows_; }
    int ncols() const { return ncols_; }
    Field field() const { return field_; }

    double operator()(int i, int j) const { return data_[std::size_t(i) * ncols_ + j]; }
    double& at(int i, int j) { return data_[std::size_t(i) * ncols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    bool is_zero() const;
    /// True when every entry is 0 or 1, regardless of field tag.
    bool is_boolean() const;

    /// Checks the field invariants (finite entries; 0/1 for GF2). Throws
    /// std::invalid_argument on violation.
    void validate() const;

    bool operator==(const Matrix& o) const = default;

private:
    int nrows_ = 0;
    int ncols_ = 0;
    Field field_ = Field::Real;
    std::vector<double> data_;
};

/// Reinterprets a 0/1 matrix over the other field. Throws if entries are
/// not Boolean.
Matrix to_gf2(const Matrix& m);
Matrix to_real(const Matrix& m);

/// Text format: header `matrix <nrows> <ncols> <real|gf2>` followed by one
/// whitespace-separated row per line, reals in shortest round-trip decimal.
std::string format_matrix(const Matrix& m);
Matrix parse_matrix(std::istream& in);
Matrix parse_matrix(const std::string& text);

void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

/// Content hash of the canonical text form, as fixed-width hex.
std::string matrix_hash(const Matrix& m);

} // namespace spiky
