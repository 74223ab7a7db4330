#include "fracprop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include <fftw3.h>

#include "fracprop/error.hpp"

namespace fracprop {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPositivityTol = 1e-10;
constexpr double kUnitarityTol = 1e-10;

void require_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        std::ostringstream msg;
        msg << what << ": expected dimension " << expected << ", got " << actual;
        throw DimensionMismatch(msg.str());
    }
}

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n)
        : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (data_ == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(data_); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* get() noexcept { return data_; }

private:
    fftw_complex* data_;
};

}  // namespace

HermitianModel::HermitianModel(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        std::ostringstream msg;
        msg << "matrix is " << entries_.rows() << "x" << entries_.cols() << ", not square";
        throw NotHermitian(msg.str());
    }
    if (entries_.rows() == 0) {
        throw NotHermitian("matrix is empty");
    }
    const Eigen::Index n = entries_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::complex<double> a = entries_(i, j);
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
                std::ostringstream msg;
                msg << "entry (" << i << ", " << j << ") is not finite";
                throw NotHermitian(msg.str());
            }
            if (std::abs(a - std::conj(entries_(j, i))) > kHermitianTol) {
                std::ostringstream msg;
                msg << "entry (" << i << ", " << j << ") = " << a
                    << " is not the conjugate of entry (" << j << ", " << i
                    << ") = " << entries_(j, i);
                throw NotHermitian(msg.str());
            }
        }
    }
}

HermitianModel HermitianModel::diagonal(std::span<const double> values) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                          static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
    }
    return HermitianModel(std::move(m));
}

Decomposition::Decomposition(Eigen::VectorXd eigenvalues, ComplexMatrix basis)
    : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)) {
    const Eigen::Index n = eigenvalues_.size();
    if (n == 0 || basis_.rows() != n || basis_.cols() != n) {
        throw DimensionMismatch("decomposition basis must be square and match the eigenvalues");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(eigenvalues_[i] >= 0.0) || !std::isfinite(eigenvalues_[i])) {
            std::ostringstream msg;
            msg << "eigenvalue " << i << " = " << eigenvalues_[i] << " is not a finite value >= 0";
            throw NotPositive(msg.str());
        }
        if (i > 0 && eigenvalues_[i] < eigenvalues_[i - 1]) {
            throw InvalidArgument("eigenvalues must be ascending");
        }
    }
    const double defect =
        (basis_.adjoint() * basis_ - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > kUnitarityTol) {
        std::ostringstream msg;
        msg << "basis is not unitary (max |W*W - I| = " << defect << ")";
        throw InvalidArgument(msg.str());
    }
}

double Decomposition::operator_norm() const {
    return eigenvalues_.maxCoeff();
}

ComplexMatrix Decomposition::reconstruct() const {
    return basis_ * eigenvalues_.cast<std::complex<double>>().asDiagonal() * basis_.adjoint();
}

Decomposition decompose(const HermitianModel& model) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(model.entries());
    if (solver.info() != Eigen::Success) {
        throw NotHermitian("Hermitian eigensolver did not converge");
    }
    Eigen::VectorXd values = solver.eigenvalues();
    ComplexMatrix basis = solver.eigenvectors();

    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < -kPositivityTol) {
            std::ostringstream msg;
            msg << "generator is not positive: eigenvalue " << i << " = " << values[i];
            throw NotPositive(msg.str());
        }
        values[i] = std::max(values[i], 0.0);
    }

    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < basis.rows(); ++i) {
            double mag = std::abs(basis(i, j));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        const std::complex<double> c = basis(pivot, j);
        basis.col(j) *= std::conj(c) / std::abs(c);
        basis(pivot, j) = std::abs(basis(pivot, j));
    }
    return Decomposition(std::move(values), std::move(basis));
}

State apply_diagonal(const Decomposition& decomp, std::span<const std::complex<double>> m,
                     const State& x) {
    require_dim(decomp.dim(), x.size(), "apply_multiplier state");
    require_dim(decomp.dim(), m.size(), "apply_multiplier values");
    ComplexVector coeffs = decomp.basis().adjoint() * x.values();
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        coeffs[j] *= m[static_cast<std::size_t>(j)];
    }
    return State(decomp.basis() * coeffs);
}

State apply_multiplier(const Decomposition& decomp, const SpectralFunction& f, const State& x) {
    require_dim(decomp.dim(), x.size(), "apply_multiplier state");
    std::vector<std::complex<double>> m(decomp.dim());
    for (std::size_t j = 0; j < m.size(); ++j) {
        m[j] = f(decomp.eigenvalues()[static_cast<Eigen::Index>(j)]);
    }
    return apply_diagonal(decomp, m, x);
}

PeriodicGrid::PeriodicGrid(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 2 || (n & (n - 1)) != 0) {
        std::ostringstream msg;
        msg << "periodic grid size must be a power of two >= 2, got " << n;
        throw InvalidArgument(msg.str());
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidArgument("periodic grid length must be positive and finite");
    }
}

double PeriodicGrid::position(std::size_t j) const noexcept {
    return -0.5 * length_ + static_cast<double>(j) * spacing();
}

double PeriodicGrid::wavenumber(std::size_t m) const noexcept {
    const auto n = static_cast<long long>(n_);
    auto k = static_cast<long long>(m);
    if (k >= n / 2) {
        k -= n;
    }
    return 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
}

double PeriodicGrid::symbol(std::size_t m) const noexcept {
    const double xi = wavenumber(m);
    return xi * xi;
}

ComplexVector unitary_dft(const ComplexVector& x, bool forward) {
    const auto n = static_cast<std::size_t>(x.size());
    if (n == 0) {
        return x;
    }
    FftwBuffer in(n);
    FftwBuffer out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i][0] = x[static_cast<Eigen::Index>(i)].real();
        in.get()[i][1] = x[static_cast<Eigen::Index>(i)].imag();
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexVector y(x.size());
    for (std::size_t i = 0; i < n; ++i) {
        y[static_cast<Eigen::Index>(i)] = {out.get()[i][0] * scale, out.get()[i][1] * scale};
    }
    return y;
}

State apply_fourier_diagonal(const PeriodicGrid& grid, std::span<const std::complex<double>> m,
                             const State& x) {
    require_dim(grid.size(), x.size(), "fourier_multiplier state");
    require_dim(grid.size(), m.size(), "fourier_multiplier values");
    ComplexVector modes = unitary_dft(x.values(), true);
    for (Eigen::Index j = 0; j < modes.size(); ++j) {
        modes[j] *= m[static_cast<std::size_t>(j)];
    }
    return State(unitary_dft(modes, false));
}

State fourier_multiplier(const PeriodicGrid& grid, const SpectralFunction& f, const State& x) {
    require_dim(grid.size(), x.size(), "fourier_multiplier state");
    std::vector<std::complex<double>> m(grid.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        m[j] = f(grid.symbol(j));
    }
    return apply_fourier_diagonal(grid, m, x);
}

}  // namespace fracprop
