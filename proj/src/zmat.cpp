#include "isopower/zmat.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace isopower::zmat {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; i++) m.at(i, i) = 1;
    return m;
}

Mat mul(const Mat& x, const Mat& y) {
    assert(x.cols == y.rows);
    Mat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; i++)
        for (int k = 0; k < x.cols; k++) {
            if (x.at(i, k) == 0) continue;
            for (int j = 0; j < y.cols; j++)
                r.at(i, j) += x.at(i, k) * y.at(k, j);
        }
    return r;
}

Mat transpose(const Mat& m) {
    Mat r(m.cols, m.rows);
    for (int i = 0; i < m.rows; i++)
        for (int j = 0; j < m.cols; j++) r.at(j, i) = m.at(i, j);
    return r;
}

Mat vstack(const Mat& top, const Mat& bottom) {
    if (top.rows == 0) return bottom;
    if (bottom.rows == 0) return top;
    assert(top.cols == bottom.cols);
    Mat r(top.rows + bottom.rows, top.cols);
    std::copy(top.a.begin(), top.a.end(), r.a.begin());
    std::copy(bottom.a.begin(), bottom.a.end(), r.a.begin() + top.a.size());
    return r;
}

namespace {

void swap_rows(Mat& m, int i, int j) {
    if (i == j) return;
    for (int c = 0; c < m.cols; c++) std::swap(m.at(i, c), m.at(j, c));
}

// row_i -= q * row_j
void submul_row(Mat& m, int i, int j, const Z& q) {
    if (q == 0) return;
    for (int c = 0; c < m.cols; c++) m.at(i, c) -= q * m.at(j, c);
}

void negate_row(Mat& m, int i) {
    for (int c = 0; c < m.cols; c++) m.at(i, c) = -m.at(i, c);
}

// Shared row-HNF worker; T, when non-null, accumulates the same row
// operations starting from the identity.
Mat hnf_impl(Mat m, Mat* T) {
    if (T) *T = Mat::identity(m.rows);
    int pivot_row = 0;
    for (int col = 0; col < m.cols && pivot_row < m.rows; col++) {
        // Euclidean elimination within the column below pivot_row.
        while (true) {
            int best = -1;
            for (int r = pivot_row; r < m.rows; r++) {
                if (m.at(r, col) == 0) continue;
                if (best < 0 || mpz_cmpabs(m.at(r, col).get_mpz_t(), m.at(best, col).get_mpz_t()) < 0)
                    best = r;
            }
            if (best < 0) break; // column is zero below pivot_row
            swap_rows(m, pivot_row, best);
            if (T) swap_rows(*T, pivot_row, best);
            bool cleared = true;
            for (int r = pivot_row + 1; r < m.rows; r++) {
                if (m.at(r, col) == 0) continue;
                Z q;
                mpz_fdiv_q(q.get_mpz_t(), m.at(r, col).get_mpz_t(),
                           m.at(pivot_row, col).get_mpz_t());
                submul_row(m, r, pivot_row, q);
                if (T) submul_row(*T, r, pivot_row, q);
                if (m.at(r, col) != 0) cleared = false;
            }
            if (cleared) break;
        }
        if (m.at(pivot_row, col) == 0) continue;
        if (m.at(pivot_row, col) < 0) {
            negate_row(m, pivot_row);
            if (T) negate_row(*T, pivot_row);
        }
        // Reduce entries above the pivot into [0, pivot).
        for (int r = 0; r < pivot_row; r++) {
            Z q;
            mpz_fdiv_q(q.get_mpz_t(), m.at(r, col).get_mpz_t(),
                       m.at(pivot_row, col).get_mpz_t());
            submul_row(m, r, pivot_row, q);
            if (T) submul_row(*T, r, pivot_row, q);
        }
        pivot_row++;
    }
    // Drop the all-zero tail rows.
    Mat out(pivot_row, m.cols);
    std::copy(m.a.begin(), m.a.begin() + static_cast<size_t>(pivot_row) * m.cols, out.a.begin());
    if (T) {
        Mat Tk(pivot_row, T->cols);
        std::copy(T->a.begin(), T->a.begin() + static_cast<size_t>(pivot_row) * T->cols,
                  Tk.a.begin());
        *T = Tk;
    }
    return out;
}

} // namespace

Mat hnf(Mat m) { return hnf_impl(std::move(m), nullptr); }

Mat hnf_with_transform(const Mat& m, Mat& T) { return hnf_impl(m, &T); }

Mat snf(Mat m, Mat* U, Mat* V) {
    if (U) *U = Mat::identity(m.rows);
    if (V) *V = Mat::identity(m.cols);
    int n = std::min(m.rows, m.cols);
    for (int k = 0; k < n; k++) {
        while (true) {
            // Find a nonzero entry of minimal absolute value in the trailing block.
            int pi = -1, pj = -1;
            for (int i = k; i < m.rows; i++)
                for (int j = k; j < m.cols; j++) {
                    if (m.at(i, j) == 0) continue;
                    if (pi < 0 || mpz_cmpabs(m.at(i, j).get_mpz_t(), m.at(pi, pj).get_mpz_t()) < 0) {
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0) { pi = pj = k; break; }
            swap_rows(m, k, pi);
            if (U) swap_rows(*U, k, pi);
            { // column swap
                if (pj != k) {
                    for (int i = 0; i < m.rows; i++) std::swap(m.at(i, k), m.at(i, pj));
                    if (V)
                        for (int i = 0; i < V->rows; i++) std::swap(V->at(i, k), V->at(i, pj));
                }
            }
            bool dirty = false;
            for (int i = k + 1; i < m.rows; i++) {
                if (m.at(i, k) == 0) continue;
                Z q;
                mpz_fdiv_q(q.get_mpz_t(), m.at(i, k).get_mpz_t(), m.at(k, k).get_mpz_t());
                submul_row(m, i, k, q);
                if (U) submul_row(*U, i, k, q);
                if (m.at(i, k) != 0) dirty = true;
            }
            for (int j = k + 1; j < m.cols; j++) {
                if (m.at(k, j) == 0) continue;
                Z q;
                mpz_fdiv_q(q.get_mpz_t(), m.at(k, j).get_mpz_t(), m.at(k, k).get_mpz_t());
                for (int i = 0; i < m.rows; i++) m.at(i, j) -= q * m.at(i, k);
                if (V)
                    for (int i = 0; i < V->rows; i++) V->at(i, j) -= q * V->at(i, k);
                if (m.at(k, j) != 0) dirty = true;
            }
            if (dirty) continue;
            // Divisibility fix-up: pivot must divide the rest of the block.
            bool fixed = true;
            for (int i = k + 1; i < m.rows && fixed; i++)
                for (int j = k + 1; j < m.cols && fixed; j++) {
                    if (m.at(i, j) % m.at(k, k) != 0) {
                        // add row i to row k, restart elimination
                        for (int c = 0; c < m.cols; c++) m.at(k, c) += m.at(i, c);
                        if (U)
                            for (int c = 0; c < U->cols; c++) U->at(k, c) += U->at(i, c);
                        fixed = false;
                    }
                }
            if (fixed) break;
        }
        if (m.at(k, k) < 0) {
            negate_row(m, k);
            if (U) negate_row(*U, k);
        }
    }
    return m;
}

std::vector<Z> invariant_factors(const Mat& m) {
    Mat s = snf(m);
    std::vector<Z> out;
    int n = std::min(s.rows, s.cols);
    for (int i = 0; i < n; i++)
        if (s.at(i, i) != 0) out.push_back(s.at(i, i));
    return out;
}

int rank(const Mat& m) { return hnf(m).rows; }

Z det(Mat m) {
    assert(m.rows == m.cols);
    int n = m.rows;
    if (n == 0) return 1;
    Z prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; k++) {
        if (m.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; i++)
                if (m.at(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            swap_rows(m, k, piv);
            sign = -sign;
        }
        for (int i = k + 1; i < n; i++)
            for (int j = k + 1; j < n; j++) {
                Z t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : Z(-m.at(n - 1, n - 1));
}

Mat preimage_lattice(const Mat& C, const Z& D) {
    assert(D > 0);
    Mat U, V;
    Mat S = snf(C, &U, &V);
    int k = C.cols;
    int r = std::min(C.rows, C.cols);
    Mat scale(k, k);
    for (int i = 0; i < k; i++) {
        Z s = (i < r) ? S.at(i, i) : Z(0);
        if (s == 0)
            scale.at(i, i) = 1;
        else {
            Z g;
            mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), D.get_mpz_t());
            scale.at(i, i) = D / g;
        }
    }
    // y = V z with z in the scaled lattice; basis rows are (V * scale)^T rows.
    Mat basis = transpose(mul(V, scale));
    return hnf(std::move(basis));
}

bool express_in_basis(const Mat& A, const Mat& B, Mat& X) {
    Mat T;
    Mat H = hnf_with_transform(B, T); // T * B = H
    if (H.rows < B.rows) return false; // B not full row rank
    X = Mat(A.rows, B.rows);
    // pivot columns of H
    std::vector<int> piv(H.rows);
    for (int i = 0, c = 0; i < H.rows; i++) {
        while (c < H.cols && H.at(i, c) == 0) c++;
        assert(c < H.cols);
        piv[i] = c;
    }
    for (int i = 0; i < A.rows; i++) {
        std::vector<Z> row(A.cols);
        for (int j = 0; j < A.cols; j++) row[j] = A.at(i, j);
        std::vector<Z> coeff(H.rows);
        for (int r = 0; r < H.rows; r++) {
            Z q, rem;
            mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), row[piv[r]].get_mpz_t(),
                        H.at(r, piv[r]).get_mpz_t());
            if (rem != 0) return false;
            coeff[r] = q;
            if (q != 0)
                for (int j = 0; j < A.cols; j++) row[j] -= q * H.at(r, j);
        }
        for (int j = 0; j < A.cols; j++)
            if (row[j] != 0) return false;
        // X-row = coeff * T
        for (int r = 0; r < H.rows; r++)
            if (coeff[r] != 0)
                for (int c = 0; c < T.cols; c++) X.at(i, c) += coeff[r] * T.at(r, c);
    }
    return true;
}

std::vector<Z> quotient_structure(const Mat& S) {
    std::vector<Z> inv = invariant_factors(S);
    std::vector<Z> out;
    for (const Z& d : inv)
        if (d != 1) out.push_back(d);
    return out;
}

Mat right_kernel(const Mat& m) {
    Mat U, V;
    Mat S = snf(m, &U, &V);
    int r = 0;
    int n = std::min(S.rows, S.cols);
    for (int i = 0; i < n; i++)
        if (S.at(i, i) != 0) r++;
    Mat K(m.cols - r, m.cols);
    for (int j = r; j < m.cols; j++)
        for (int i = 0; i < m.cols; i++) K.at(j - r, i) = V.at(i, j);
    return K;
}

Mat row_saturation(const Mat& m) {
    Mat K = right_kernel(m); // rows span the orthogonal complement directions
    if (K.rows == 0) return Mat::identity(m.cols); // full column rank: all of Z^cols
    // saturation = {x : x K^t = 0} = right kernel of K (as rows act on x)
    Mat sat = right_kernel(K);
    return hnf(std::move(sat));
}

Mat inverse_unimodular(const Mat& m) {
    Mat X;
    Mat I = Mat::identity(m.rows);
    if (m.rows != m.cols || !express_in_basis(I, m, X))
        throw std::invalid_argument("matrix is not unimodular");
    return X;
}

Mat adjugate(const Mat& m, Z& det_out) {
    assert(m.rows == m.cols);
    det_out = det(m);
    if (det_out == 0) throw std::invalid_argument("adjugate of singular matrix");
    Mat scaled = Mat::identity(m.rows);
    for (int i = 0; i < m.rows; i++) scaled.at(i, i) = det_out;
    Mat X;
    bool ok = express_in_basis(scaled, m, X);
    assert(ok);
    (void)ok;
    return X;
}

} // namespace isopower::zmat
