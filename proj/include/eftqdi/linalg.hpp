// Small dense linear-algebra kit: row-major Matrix, symmetric eigenvalues via
// cyclic Jacobi rotations, spectral norm, Gaussian elimination. Everything here
// targets the tiny matrices this library works with (graphs on a handful of
// nodes, 2x2 certificates), not general numerical workloads.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eftqdi {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
double norm(std::span<const double> a);

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vec operator*(const Matrix& a, const Vec& x);
Matrix transpose(const Matrix& a);

double frobenius_norm(const Matrix& a);

// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi sweeps until the
// off-diagonal Frobenius norm drops below 1e-12 (input is symmetrized first).
std::vector<double> symmetric_eigenvalues(Matrix a);

// ||A||_2 = sqrt(lambda_max(A^T A)), computed with the symmetric solver above.
double spectral_norm(const Matrix& a);

// Solve A x = b by Gaussian elimination with partial pivoting.
// Throws SingularSystem when a pivot vanishes.
Vec solve_linear(Matrix a, Vec b);

// Numeric rank by row echelon with partial pivoting; a pivot counts when its
// magnitude exceeds tol * max(1, max|a_ij|).
std::size_t numeric_rank(Matrix a, double tol);

}  // namespace eftqdi
