#ifndef ISOPOWER_ZMAT_HPP
#define ISOPOWER_ZMAT_HPP

#include <gmpxx.h>

#include <vector>

namespace isopower::zmat {

using Z = mpz_class;

// Dense integer matrix, row major. Rows usually play the role of lattice
// generators.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<Z> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    Z& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Z& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n);
    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

Mat mul(const Mat& x, const Mat& y);
Mat transpose(const Mat& m);
Mat vstack(const Mat& top, const Mat& bottom);

// Row Hermite normal form of the lattice spanned by the rows. Zero rows are
// dropped; pivots are positive; entries above a pivot are reduced into
// [0, pivot).
Mat hnf(Mat m);

// As hnf(), additionally returning T with T * input = result restricted to
// the kept rows. T has unimodular extension; only exactness matters here.
Mat hnf_with_transform(const Mat& m, Mat& T);

// Smith normal form; returns the diagonal matrix S, and optionally U, V
// (unimodular) with U * M * V = S. Diagonal entries are nonnegative and each
// divides the next.
Mat snf(Mat m, Mat* U = nullptr, Mat* V = nullptr);

// Nonzero diagonal entries of the SNF, ascending divisibility order.
std::vector<Z> invariant_factors(const Mat& m);

int rank(const Mat& m);

// Determinant (Bareiss fraction-free elimination); matrix must be square.
Z det(Mat m);

// Basis (rows) of {y in Z^k : C*y ≡ 0 (mod D)} for C of size m x k.
// The result always contains D*Z^k, so it has full rank k.
Mat preimage_lattice(const Mat& C, const Z& D);

// Solve X * B = A exactly over Z for full-row-rank B whose row span
// contains every row of A. Returns false if no integral solution.
bool express_in_basis(const Mat& A, const Mat& B, Mat& X);

// Structure of the finite quotient (Z^k / rowspan(S)) for full-rank S:
// invariant factors including trivial ones are returned without the 1s.
std::vector<Z> quotient_structure(const Mat& S);

// Basis rows of {z in Z^cols : M z = 0}.
Mat right_kernel(const Mat& m);

// HNF basis of the saturation of rowspan(m): (Q-span of rows) intersect Z^cols.
Mat row_saturation(const Mat& m);

// Inverse of a unimodular matrix (integer entries); fails otherwise.
Mat inverse_unimodular(const Mat& m);

// Adjugate: adj * m = m * adj = det(m) * I; det returned through det_out.
Mat adjugate(const Mat& m, Z& det_out);

} // namespace isopower::zmat

#endif
