#include "sncf/embed/eigensolver.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/core/rng.hpp"

namespace sncf {

const char* to_string(EigenMethod m) noexcept {
    switch (m) {
        case EigenMethod::Auto: return "auto";
        case EigenMethod::Dense: return "dense";
        case EigenMethod::Krylov: return "krylov";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> residual_norms(const CsrMatrix& l, const MatrixXd& v, const std::vector<double>& lambda) {
    std::vector<double> out(lambda.size());
    VectorXd y(l.n);
    for (std::size_t c = 0; c < lambda.size(); ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        l.multiply(v.col(col).data(), y.data());
        out[c] = (y - lambda[c] * v.col(col)).norm();
    }
    return out;
}

EigenResult dense_solve(const CsrMatrix& l, std::size_t nev) {
    const auto n = static_cast<Eigen::Index>(l.n);
    MatrixXd a = MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < l.n; ++i) {
        for (std::size_t k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l.cols[k])) = l.values[k];
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");

    EigenResult r;
    r.method_used = EigenMethod::Dense;
    const auto k = static_cast<Eigen::Index>(nev);
    r.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + nev);
    r.vectors = es.eigenvectors().leftCols(k);
    r.residuals = residual_norms(l, r.vectors, r.values);
    return r;
}

// Shifted operator 2I - L: the wanted (smallest) end of L becomes the dominant end.
class ShiftedOperator {
public:
    explicit ShiftedOperator(const CsrMatrix& l) : l_(l) {}

    void apply(const MatrixXd& x, MatrixXd& y) {
        y.resize(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            l_.multiply(x.col(c).data(), y.col(c).data());
            y.col(c) = 2.0 * x.col(c) - y.col(c);
        }
        count_ += static_cast<std::size_t>(x.cols());
    }

    [[nodiscard]] std::size_t count() const noexcept { return count_; }

private:
    const CsrMatrix& l_;
    std::size_t count_ = 0;
};

void fill_random(Eigen::Ref<VectorXd> v, Rng& rng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
}

// Orthonormalizes the columns of w against basis (assumed orthonormal) and each
// other. Columns that collapse are replaced by random directions.
void orthonormalize(const Eigen::Ref<const MatrixXd>& basis, MatrixXd& w, Rng& rng) {
    if (basis.cols() > 0) {
        for (int pass = 0; pass < 2; ++pass) w.noalias() -= basis * (basis.transpose() * w);
    }
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double original = w.col(c).norm();
        for (int pass = 0; pass < 2; ++pass) {
            if (c > 0) w.col(c) -= w.leftCols(c) * (w.leftCols(c).transpose() * w.col(c));
        }
        double nrm = w.col(c).norm();
        int attempts = 0;
        while (!(nrm > 1e-10 * std::max(original, 1e-300))) {
            if (++attempts > 8) throw NumericalError("could not extend Krylov basis");
            fill_random(w.col(c), rng);
            const double fresh = w.col(c).norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (basis.cols() > 0) w.col(c) -= basis * (basis.transpose() * w.col(c));
                if (c > 0) w.col(c) -= w.leftCols(c) * (w.leftCols(c).transpose() * w.col(c));
            }
            nrm = w.col(c).norm();
            if (nrm > 1e-6 * fresh) break;
        }
        w.col(c) /= nrm;
    }
}

// Thick-restart block Krylov on A = 2I - L. The basis holds the p best Ritz
// vectors from the previous cycle followed by a block Krylov sequence grown
// from their residual directions, so each cycle adds a deep polynomial while
// keeping what has converged. A and Q columns are stored side by side, and
// Rayleigh-Ritz runs on the full basis.
EigenResult krylov_solve(const CsrMatrix& l, std::size_t nev, const EigenOptions& opts) {
    const std::size_t n = l.n;
    const std::size_t keep = nev + std::max<std::size_t>(8, nev / 2);
    const std::size_t bs = std::min<std::size_t>(8, keep);
    if (keep + 2 * bs > n) return dense_solve(l, nev);
    const std::size_t m = std::min(n, keep + 16 * bs);
    const auto nn = static_cast<Eigen::Index>(n);
    const auto nk = static_cast<Eigen::Index>(keep);
    const auto nbs = static_cast<Eigen::Index>(bs);
    const auto mm = static_cast<Eigen::Index>(m);

    Rng rng(Rng(opts.seed).split(0x4b72796c6f76ULL));
    ShiftedOperator op(l);
    MatrixXd q(nn, mm);
    MatrixXd aq(nn, mm);
    MatrixXd w(nn, nk);
    for (Eigen::Index c = 0; c < nk; ++c) fill_random(w.col(c), rng);
    orthonormalize(MatrixXd(nn, 0), w, rng);
    q.leftCols(nk) = w;
    {
        MatrixXd y;
        op.apply(w, y);
        aq.leftCols(nk) = y;
    }
    Eigen::Index cols = nk;

    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t restart = 0;; ++restart) {
        // Residual directions of the retained block seed the expansion.
        MatrixXd seed = aq.leftCols(cols);
        for (int pass = 0; pass < 2; ++pass) seed.noalias() -= q.leftCols(cols) * (q.leftCols(cols).transpose() * seed);
        MatrixXd block(nn, nbs);
        if (seed.cols() > nbs) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> gram(seed.transpose() * seed);
            block.noalias() = seed * gram.eigenvectors().rightCols(nbs);
        } else {
            block = seed.leftCols(nbs);
        }
        while (cols + nbs <= mm) {
            orthonormalize(q.leftCols(cols), block, rng);
            q.middleCols(cols, nbs) = block;
            MatrixXd y;
            op.apply(block, y);
            aq.middleCols(cols, nbs) = y;
            cols += nbs;
            block = y;
        }

        const MatrixXd h = q.leftCols(cols).transpose() * aq.leftCols(cols);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()));
        if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz eigensolve failed");
        MatrixXd y(cols, nk);
        std::vector<double> theta(keep);
        for (std::size_t t = 0; t < keep; ++t) {
            const Eigen::Index src = cols - 1 - static_cast<Eigen::Index>(t);
            y.col(static_cast<Eigen::Index>(t)) = es.eigenvectors().col(src);
            theta[t] = es.eigenvalues()[src];
        }
        MatrixXd x = q.leftCols(cols) * y;
        MatrixXd ax = aq.leftCols(cols) * y;

        double worst = 0.0;
        for (std::size_t t = 0; t < nev; ++t) {
            const auto c = static_cast<Eigen::Index>(t);
            worst = std::max(worst, (ax.col(c) - theta[t] * x.col(c)).norm());
        }
        best_residual = std::min(best_residual, worst);

        if (worst <= opts.tolerance) {
            EigenResult r;
            r.method_used = EigenMethod::Krylov;
            r.restarts = restart + 1;
            r.values.resize(nev);
            for (std::size_t t = 0; t < nev; ++t) r.values[t] = 2.0 - theta[t];
            r.vectors = x.leftCols(static_cast<Eigen::Index>(nev));
            r.residuals = residual_norms(l, r.vectors, r.values);
            r.matvecs = op.count() + nev;
            if (*std::max_element(r.residuals.begin(), r.residuals.end()) <= opts.tolerance) return r;
        }
        if (op.count() + (m - keep) > opts.max_matvecs) {
            std::ostringstream msg;
            msg << "iterative eigensolver did not converge within " << opts.max_matvecs
                << " mat-vecs (best max residual " << best_residual << ", tolerance " << opts.tolerance << ")";
            throw NumericalError(msg.str());
        }
        q.leftCols(nk) = x;
        aq.leftCols(nk) = ax;
        cols = nk;
    }
}

}  // namespace

EigenResult smallest_eigenpairs(const CsrMatrix& l, std::size_t nev, const EigenOptions& opts) {
    if (nev < 1 || nev > l.n) {
        throw ConfigError("requested " + std::to_string(nev) + " eigenpairs of a " + std::to_string(l.n) + "-node graph");
    }
    const bool dense = opts.method == EigenMethod::Dense ||
                       (opts.method == EigenMethod::Auto && l.n <= opts.dense_threshold);
    return dense ? dense_solve(l, nev) : krylov_solve(l, nev, opts);
}

}  // namespace sncf
