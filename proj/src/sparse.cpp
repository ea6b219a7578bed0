#include "sphtrans/sparse.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sphtrans/errors.hpp"

namespace sphtrans {

SparseMatrix csr_from_triplets(int n_rows, int n_cols, const std::vector<Triplet>& entries) {
    if (n_rows < 0 || n_cols < 0) throw DomainError("negative matrix dimension");
    for (const auto& t : entries) {
        if (t.row() < 0 || t.row() >= n_rows || t.col() < 0 || t.col() >= n_cols) {
            throw DomainError("triplet (" + std::to_string(t.row()) + ", " +
                              std::to_string(t.col()) + ") outside " + std::to_string(n_rows) +
                              "x" + std::to_string(n_cols));
        }
        if (!std::isfinite(t.value())) throw DomainError("non-finite triplet value");
    }
    SparseMatrix a(n_rows, n_cols);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    return a;
}

Eigen::VectorXd spmv(const SparseMatrix& a, const Eigen::VectorXd& x) {
    if (a.cols() != x.size()) {
        throw DomainError("spmv: matrix has " + std::to_string(a.cols()) + " columns, vector " +
                          std::to_string(x.size()));
    }
    return a * x;
}

Ilu0::Ilu0(const SparseMatrix& a) : lu_(a) {
    if (a.rows() != a.cols()) throw DomainError("ILU(0) needs a square matrix");
    lu_.makeCompressed();
    const int n = static_cast<int>(lu_.rows());
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    double* val = lu_.valuePtr();

    diag_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int p = outer[i]; p < outer[i + 1]; ++p) {
            if (inner[p] == i) diag_[i] = p;
        }
        if (diag_[i] < 0) throw FactorizationError("ILU(0): structurally missing diagonal", i);
    }

    // IKJ variant; `where[j]` maps column j to its slot in the current row.
    std::vector<int> where(n, -1);
    for (int i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (int p = outer[i]; p < outer[i + 1]; ++p) {
            where[inner[p]] = p;
            row_max = std::max(row_max, std::abs(val[p]));
        }
        for (int p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) {
            const int k = inner[p];
            val[p] /= val[diag_[k]];
            const double lik = val[p];
            for (int q = diag_[k] + 1; q < outer[k + 1]; ++q) {
                const int slot = where[inner[q]];
                if (slot >= 0) val[slot] -= lik * val[q];
            }
        }
        const double pivot = val[diag_[i]];
        for (int p = outer[i]; p < outer[i + 1]; ++p) where[inner[p]] = -1;
        if (!(std::abs(pivot) >= 1e-14 * row_max) || row_max == 0.0) {
            throw FactorizationError("ILU(0): zero or near-zero pivot", i);
        }
    }
}

void Ilu0::apply_in_place(Eigen::VectorXd& z) const {
    const int n = static_cast<int>(lu_.rows());
    if (z.size() != n) throw DomainError("ILU(0) apply: dimension mismatch");
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    const double* val = lu_.valuePtr();
    for (int i = 0; i < n; ++i) {
        double sum = z(i);
        for (int p = outer[i]; p < diag_[i]; ++p) sum -= val[p] * z(inner[p]);
        z(i) = sum;
    }
    for (int i = n - 1; i >= 0; --i) {
        double sum = z(i);
        for (int p = diag_[i] + 1; p < outer[i + 1]; ++p) sum -= val[p] * z(inner[p]);
        z(i) = sum / val[diag_[i]];
    }
}

Eigen::VectorXd Ilu0::apply(const Eigen::VectorXd& r) const {
    Eigen::VectorXd z = r;
    apply_in_place(z);
    return z;
}

SolveResult bicgstab(const SparseMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                     const Ilu0* preconditioner, const BicgstabOptions& options) {
    if (a.rows() != a.cols()) throw DomainError("bicgstab: matrix is not square");
    if (b.size() != a.rows() || x0.size() != a.rows()) {
        throw DomainError("bicgstab: dimension mismatch");
    }
    if (!(options.rel_tol > 0.0)) throw DomainError("bicgstab: rel_tol must be positive");

    SolveResult out;
    SolveReport& rep = out.report;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.x = Eigen::VectorXd::Zero(b.size());
        rep.converged = true;
        return out;
    }

    auto precondition = [&](const Eigen::VectorXd& v) {
        return preconditioner ? preconditioner->apply(v) : v;
    };

    Eigen::VectorXd& x = out.x;
    x = x0;
    Eigen::VectorXd r = b - a * x;
    rep.final_relative_residual = r.norm() / bnorm;
    if (rep.final_relative_residual <= options.rel_tol) {
        rep.converged = true;
        return out;
    }

    const double tiny = 1e-300;
    Eigen::VectorXd r_hat = r;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    auto restart = [&]() {
        if (rep.restarts >= 1) return false;
        ++rep.restarts;
        r = b - a * x;
        r_hat = r;
        p.setZero();
        v.setZero();
        rho = alpha = omega = 1.0;
        return true;
    };

    while (rep.iterations < options.max_iter) {
        const double rho_new = r_hat.dot(r);
        if (std::abs(rho_new) < tiny || std::abs(omega) < tiny) {
            if (!restart()) break;
            continue;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = r + beta * (p - omega * v);
        const Eigen::VectorXd p_hat = precondition(p);
        v = a * p_hat;
        const double rv = r_hat.dot(v);
        if (std::abs(rv) < tiny) {
            if (!restart()) break;
            continue;
        }
        alpha = rho / rv;
        const Eigen::VectorXd s = r - alpha * v;
        ++rep.iterations;

        const Eigen::VectorXd s_hat = precondition(s);
        const Eigen::VectorXd t = a * s_hat;
        const double tt = t.squaredNorm();
        if (tt < tiny) {
            // s vanished: the half step already solves the system.
            x += alpha * p_hat;
            r = s;
        } else {
            omega = t.dot(s) / tt;
            x += alpha * p_hat + omega * s_hat;
            r = s - omega * t;
        }

        rep.final_relative_residual = (b - a * x).norm() / bnorm;
        if (rep.final_relative_residual <= options.rel_tol) {
            rep.converged = true;
            return out;
        }
        if (tt < tiny && !restart()) break;
    }
    return out;
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write matrix file " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    out << std::setprecision(17);
    for (int i = 0; i < a.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
    if (!out) throw Error("write failed for matrix file " + path);
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open matrix file " + path);
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
        throw FormatError(path + ": missing MatrixMarket coordinate real general header", lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream head(line);
    long rows = 0, cols = 0, nnz = 0;
    if (!(head >> rows >> cols >> nnz)) throw FormatError(path + ": bad size line", lineno);
    std::vector<Triplet> entries;
    entries.reserve(nnz);
    for (long k = 0; k < nnz; ++k) {
        ++lineno;
        long i = 0, j = 0;
        double v = 0.0;
        if (!std::getline(in, line)) throw FormatError(path + ": truncated entry list", lineno);
        std::istringstream row(line);
        if (!(row >> i >> j >> v)) throw FormatError(path + ": bad entry", lineno);
        entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    }
    return csr_from_triplets(static_cast<int>(rows), static_cast<int>(cols), entries);
}

}  // namespace sphtrans
