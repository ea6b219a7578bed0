#ifndef SPHTRANS_SPARSE_HPP
#define SPHTRANS_SPARSE_HPP

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace sphtrans {

/// Compressed-row storage. Always kept compressed with sorted column indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Duplicates are summed. Throws DomainError on out-of-range indices.
SparseMatrix csr_from_triplets(int n_rows, int n_cols, const std::vector<Triplet>& entries);

Eigen::VectorXd spmv(const SparseMatrix& a, const Eigen::VectorXd& x);

/// Zero-fill incomplete LU. L (unit diagonal, implicit) and U share the
/// sparsity pattern of the factored matrix.
class Ilu0 {
public:
    /// Throws FactorizationError on a missing diagonal or a pivot with
    /// |u_ii| < 1e-14 * max_j |a_ij|.
    explicit Ilu0(const SparseMatrix& a);

    /// Solves L U z = r.
    Eigen::VectorXd apply(const Eigen::VectorXd& r) const;
    void apply_in_place(Eigen::VectorXd& z) const;

    /// Combined L\U factors on the pattern of the input.
    const SparseMatrix& factors() const { return lu_; }

private:
    SparseMatrix lu_;
    std::vector<int> diag_;
};

inline Ilu0 ilu0_factorize(const SparseMatrix& a) { return Ilu0(a); }
inline Eigen::VectorXd ilu0_apply(const Ilu0& f, const Eigen::VectorXd& r) { return f.apply(r); }

struct SolveReport {
    int iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
    int restarts = 0;
};

struct BicgstabOptions {
    double rel_tol = 1e-10;
    int max_iter = 1000;
};

struct SolveResult {
    Eigen::VectorXd x;
    SolveReport report;
};

/// Right-preconditioned BiCGSTAB. Convergence is judged on the true residual
/// ||b - A x|| / ||b||, recomputed every iteration. A breakdown restarts once from
/// the current iterate; a second breakdown ends the solve unconverged.
/// `preconditioner` may be null (identity).
SolveResult bicgstab(const SparseMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                     const Ilu0* preconditioner, const BicgstabOptions& options = {});

/// `%%MatrixMarket matrix coordinate real general`, 1-based indices.
void write_matrix_market(const SparseMatrix& a, const std::string& path);
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace sphtrans

#endif  // SPHTRANS_SPARSE_HPP
