#include "spiky/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spiky {

namespace {

int rank_real(const Matrix& m, double tol) {
    int nr = m.nrows(), nc = m.ncols();
    std::vector<double> a(m.data());
    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int piv = -1;
        double best = tol;
        for (int i = r; i < nr; ++i) {
            double v = std::fabs(a[std::size_t(i) * nc + c]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv < 0) continue;
        for (int j = 0; j < nc; ++j)
            std::swap(a[std::size_t(r) * nc + j], a[std::size_t(piv) * nc + j]);
        double p = a[std::size_t(r) * nc + c];
        for (int i = 0; i < nr; ++i) {
            if (i == r) continue;
            double f = a[std::size_t(i) * nc + c] / p;
            if (f == 0.0) continue;
            for (int j = c; j < nc; ++j)
                a[std::size_t(i) * nc + j] -= f * a[std::size_t(r) * nc + j];
        }
        ++r;
    }
    return r;
}

int rank_gf2_bits(const Matrix& m) {
    int nr = m.nrows(), nc = m.ncols();
    int words = (nc + 63) / 64;
    std::vector<std::uint64_t> rows(std::size_t(nr) * words, 0);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            if (m(i, j) != 0.0) rows[std::size_t(i) * words + j / 64] |= 1ULL << (j % 64);

    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int w = c / 64;
        std::uint64_t bit = 1ULL << (c % 64);
        int piv = -1;
        for (int i = r; i < nr; ++i)
            if (rows[std::size_t(i) * words + w] & bit) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        for (int k = 0; k < words; ++k)
            std::swap(rows[std::size_t(r) * words + k], rows[std::size_t(piv) * words + k]);
        for (int i = 0; i < nr; ++i) {
            if (i == r) continue;
            if (rows[std::size_t(i) * words + w] & bit)
                for (int k = 0; k < words; ++k)
                    rows[std::size_t(i) * words + k] ^= rows[std::size_t(r) * words + k];
        }
        ++r;
    }
    return r;
}

} // namespace

int rank(const Matrix& m, double tol) {
    m.validate();
    if (m.field() == Field::GF2) return rank_gf2_bits(m);
    if (tol <= 0) throw std::invalid_argument("rank: tol must be positive");
    return rank_real(m, tol);
}

int sparsity(const Matrix& m) {
    int count = 0;
    for (double x : m.data())
        if (x != 0.0) ++count;
    return count;
}

std::optional<BlockyPattern> is_blocky(const Matrix& m) {
    std::vector<std::uint8_t> sup(std::size_t(m.nrows()) * m.ncols(), 0);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j) {
            double v = m(i, j);
            if (v == 0.0) continue;
            if (v != 1.0) return std::nullopt;
            sup[std::size_t(i) * m.ncols() + j] = 1;
        }
    return pattern_from_support(sup, m.nrows(), m.ncols());
}

std::optional<SpikyTerm> is_spiky(const Matrix& m) {
    std::vector<std::uint8_t> sup(std::size_t(m.nrows()) * m.ncols(), 0);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j)
            if (m(i, j) != 0.0) sup[std::size_t(i) * m.ncols() + j] = 1;
    auto pat = pattern_from_support(sup, m.nrows(), m.ncols());
    if (!pat) return std::nullopt;

    SpikyTerm term;
    term.pattern = *pat;
    term.u.assign(m.nrows(), 0.0);
    term.v.assign(m.ncols(), 0.0);
    for (const auto& b : pat->blocks) {
        int i0 = b.rows[0], j0 = b.cols[0];
        double anchor = m(i0, j0);
        // rank-1 check: all 2x2 minors against the anchor row/col vanish
        for (int i : b.rows)
            for (int j : b.cols) {
                double lhs = m(i, j) * anchor;
                double rhs = m(i, j0) * m(i0, j);
                double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
                if (std::fabs(lhs - rhs) > 1e-9 * scale) return std::nullopt;
            }
        for (int j : b.cols) term.v[j] = m(i0, j);
        for (int i : b.rows) term.u[i] = m(i, j0) / anchor;
    }
    return term;
}

namespace {

void check_term_shapes(const Decomposition& d) {
    for (const auto& t : d.blocky_terms)
        if (t.pattern.nrows != d.nrows || t.pattern.ncols != d.ncols)
            throw std::invalid_argument("term dimension mismatch");
    for (const auto& t : d.spiky_terms) {
        if (t.pattern.nrows != d.nrows || t.pattern.ncols != d.ncols)
            throw std::invalid_argument("term dimension mismatch");
        if (int(t.u.size()) != d.nrows || int(t.v.size()) != d.ncols)
            throw std::invalid_argument("spiky factor length mismatch");
    }
}

} // namespace

Matrix eval_decomposition(const Decomposition& d) {
    check_term_shapes(d);
    Matrix out(d.nrows, d.ncols, d.field);

    if (d.kind == DecompKind::BlockyCover) {
        for (const auto& t : d.blocky_terms)
            for (const auto& b : t.pattern.blocks)
                for (int i : b.rows)
                    for (int j : b.cols) out.at(i, j) = 1.0;
        return out;
    }

    bool gf2 = d.field == Field::GF2;
    for (const auto& t : d.blocky_terms)
        for (const auto& b : t.pattern.blocks)
            for (int i : b.rows)
                for (int j : b.cols) {
                    if (gf2)
                        out.at(i, j) = out.at(i, j) == 1.0 ? 0.0 : 1.0;
                    else
                        out.at(i, j) += t.coeff;
                }
    for (const auto& t : d.spiky_terms)
        for (const auto& b : t.pattern.blocks)
            for (int i : b.rows)
                for (int j : b.cols) {
                    if (gf2) {
                        double val = t.u[i] * t.v[j];
                        if (val != 0.0) out.at(i, j) = out.at(i, j) == 1.0 ? 0.0 : 1.0;
                    } else {
                        out.at(i, j) += t.u[i] * t.v[j];
                    }
                }
    return out;
}

VerificationReport verify_decomposition(const Decomposition& d, const Matrix& target,
                                        double tol) {
    VerificationReport rep;
    rep.term_count = d.term_count();

    if (d.nrows != target.nrows() || d.ncols != target.ncols())
        rep.structural_errors.push_back("decomposition/target dimension mismatch");
    if (d.field != target.field())
        rep.structural_errors.push_back("decomposition/target field mismatch");
    if (d.kind == DecompKind::SpikySum) {
        if (!d.blocky_terms.empty())
            rep.structural_errors.push_back("SpikySum carries blocky terms");
    } else if (!d.spiky_terms.empty()) {
        rep.structural_errors.push_back("non-spiky kind carries spiky terms");
    }
    if (d.term_count() == 0 && !target.is_zero())
        rep.structural_errors.push_back("empty decomposition of a nonzero target");

    for (const auto& t : d.blocky_terms) {
        try {
            t.pattern.validate();
            if (t.pattern.nrows != d.nrows || t.pattern.ncols != d.ncols)
                throw std::invalid_argument("term dimension mismatch");
            if (d.field == Field::Real && t.coeff == 0.0)
                throw std::invalid_argument("zero coefficient");
            if (d.field == Field::GF2 && t.coeff != 1.0)
                throw std::invalid_argument("GF2 coefficient must be 1");
            if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite coefficient");
        } catch (const std::exception& e) {
            rep.structural_errors.push_back(e.what());
        }
    }
    for (const auto& t : d.spiky_terms) {
        try {
            t.pattern.validate();
            if (t.pattern.nrows != d.nrows || t.pattern.ncols != d.ncols)
                throw std::invalid_argument("term dimension mismatch");
            if (int(t.u.size()) != d.nrows || int(t.v.size()) != d.ncols)
                throw std::invalid_argument("spiky factor length mismatch");
            for (double x : t.u)
                if (!std::isfinite(x)) throw std::invalid_argument("non-finite u entry");
            for (double x : t.v)
                if (!std::isfinite(x)) throw std::invalid_argument("non-finite v entry");
            if (d.field == Field::GF2) {
                for (double x : t.u)
                    if (x != 0.0 && x != 1.0)
                        throw std::invalid_argument("GF2 spiky factor outside {0,1}");
                for (double x : t.v)
                    if (x != 0.0 && x != 1.0)
                        throw std::invalid_argument("GF2 spiky factor outside {0,1}");
            }
        } catch (const std::exception& e) {
            rep.structural_errors.push_back(e.what());
        }
    }

    if (!rep.structural_errors.empty()) {
        rep.ok = false;
        return rep;
    }

    Matrix got = eval_decomposition(d);
    double bound = tol;
    if (d.field == Field::GF2) bound = 0.0;
    if (d.kind == DecompKind::ApproxSum) bound = d.epsilon;

    if (d.kind == DecompKind::SignSum) {
        for (int i = 0; i < d.nrows; ++i)
            for (int j = 0; j < d.ncols; ++j) {
                double want = target(i, j);
                double val = got(i, j);
                bool pass;
                if (val == 0.0)
                    pass = false; // sign representations must avoid 0
                else if (want == 1.0)
                    pass = val > 0.0;
                else if (want == 0.0)
                    pass = val < 0.0;
                else
                    pass = false; // sign check needs a Boolean target
                if (!pass) {
                    rep.failures.push_back({i, j, want, val});
                    rep.max_residual = std::max(rep.max_residual, std::fabs(val));
                }
            }
    } else if (d.kind == DecompKind::BlockyCover) {
        for (int i = 0; i < d.nrows; ++i)
            for (int j = 0; j < d.ncols; ++j) {
                double want = target(i, j);
                double val = got(i, j);
                if (val != want) rep.failures.push_back({i, j, want, val});
                rep.max_residual = std::max(rep.max_residual, std::fabs(val - want));
            }
    } else {
        for (int i = 0; i < d.nrows; ++i)
            for (int j = 0; j < d.ncols; ++j) {
                double want = target(i, j);
                double val = got(i, j);
                double resid = std::fabs(val - want);
                rep.max_residual = std::max(rep.max_residual, resid);
                if (resid > bound) rep.failures.push_back({i, j, want, val});
            }
    }

    rep.ok = rep.failures.empty();
    return rep;
}

Matrix restrict(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    for (int i : rows)
        if (i < 0 || i >= m.nrows()) throw std::out_of_range("restrict: row index out of range");
    for (int j : cols)
        if (j < 0 || j >= m.ncols()) throw std::out_of_range("restrict: col index out of range");
    Matrix out(int(rows.size()), int(cols.size()), m.field());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) out.at(int(a), int(b)) = m(rows[a], cols[b]);
    return out;
}

Decomposition restrict_decomposition(const Decomposition& d, const std::vector<int>& rows,
                                     const std::vector<int>& cols) {
    Decomposition out;
    out.kind = d.kind;
    out.nrows = int(rows.size());
    out.ncols = int(cols.size());
    out.field = d.field;
    out.epsilon = d.epsilon;
    for (const auto& t : d.blocky_terms) {
        BlockyTerm nt{restrict_pattern(t.pattern, rows, cols), t.coeff};
        if (!nt.pattern.empty()) out.blocky_terms.push_back(std::move(nt));
    }
    for (const auto& t : d.spiky_terms) {
        SpikyTerm nt;
        nt.pattern = restrict_pattern(t.pattern, rows, cols);
        if (nt.pattern.empty()) continue;
        nt.u.reserve(rows.size());
        nt.v.reserve(cols.size());
        for (int i : rows) nt.u.push_back(t.u[i]);
        for (int j : cols) nt.v.push_back(t.v[j]);
        out.spiky_terms.push_back(std::move(nt));
    }
    return out;
}

Decomposition concat_decompositions(const Decomposition& a, const Decomposition& b) {
    if (a.kind != b.kind || a.nrows != b.nrows || a.ncols != b.ncols || a.field != b.field)
        throw std::invalid_argument("concat_decompositions: incompatible decompositions");
    Decomposition out = a;
    out.blocky_terms.insert(out.blocky_terms.end(), b.blocky_terms.begin(), b.blocky_terms.end());
    out.spiky_terms.insert(out.spiky_terms.end(), b.spiky_terms.begin(), b.spiky_terms.end());
    return out;
}

Decomposition scale_decomposition(const Decomposition& d, double c) {
    Decomposition out = d;
    for (auto& t : out.blocky_terms) t.coeff *= c;
    for (auto& t : out.spiky_terms)
        for (auto& x : t.u) x *= c;
    return out;
}

} // namespace spiky
