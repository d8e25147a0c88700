#pragma once

// Full-spectrum dense diagonalization through LAPACK, plus the numerical contracts that
// every solve is checked against (residuals, trace, orthonormality).

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>
// after lapacke.h: OpenBLAS' cblas.h would otherwise pick the C99 complex type
#include <cblas.h>
#include <dlfcn.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "darkstates/errors.hpp"
#include "darkstates/hamiltonian.hpp"

namespace darkstates {

/// Sets the BLAS/LAPACK thread count when the runtime is OpenBLAS; a no-op otherwise.
inline void set_solver_threads(int threads) {
  using SetThreads = void (*)(int);
  if (auto fn = reinterpret_cast<SetThreads>(dlsym(RTLD_DEFAULT, "openblas_set_num_threads")))
    fn(std::max(1, threads));
}

/// Eigenvalues ascending; eigenvectors as columns of a column-major dim x dim matrix. The
/// first n_molecules entries of a vector are molecular amplitudes a(r), the rest photonic
/// amplitudes b. When `basis` is non-empty the photonic entries are standing-wave
/// amplitudes and `basis` converts them to plane-wave modes.
template <class T>
struct EigenSystem {
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  std::vector<double> eigenvalues;
  std::vector<T> vectors;
  PhotonBasis basis;

  std::size_t dim() const { return n_molecules + n_modes; }
  std::span<const T> state(std::size_t j) const { return {vectors.data() + j * dim(), dim()}; }
  std::span<const T> molecular(std::size_t j) const { return state(j).first(n_molecules); }
  std::span<const T> photonic(std::size_t j) const { return state(j).subspan(n_molecules); }
};

namespace detail {

inline void check_info(lapack_int info, const char* routine, std::size_t n) {
  if (info < 0)
    throw SolverError(std::string(routine) + ": illegal value in argument " + std::to_string(-info));
  if (info > 0)
    throw SolverError(std::string(routine) + " failed to converge (info = " + std::to_string(info) +
                      ", dimension " + std::to_string(n) + ")");
}

}  // namespace detail

/// Hermitian divide-and-conquer solve of the plane-wave matrix.
inline EigenSystem<cplx> diagonalize(const HamiltonianMatrix& h) {
  const std::size_t n = h.dim();
  if (n == 0) throw DomainError("diagonalize: empty matrix");
  EigenSystem<cplx> out;
  out.n_molecules = h.n_molecules;
  out.n_modes = h.n_modes;
  out.vectors = h.data;
  out.eigenvalues.resize(n);
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', ln,
                     out.vectors.data(), ln,
                     out.eigenvalues.data());
  detail::check_info(info, "zheevd", n);
  return out;
}

enum class RealDriver { automatic, mrrr, divide_and_conquer };

/// MRRR slows down on large clusters of equal eigenvalues (zero energetic disorder);
/// divide and conquer does not.
inline RealDriver choose_driver(const StandingWaveHamiltonian& h) {
  std::vector<double> e(h.diagonal.begin(), h.diagonal.begin() + static_cast<std::ptrdiff_t>(h.n_molecules));
  std::sort(e.begin(), e.end());
  const auto distinct = static_cast<std::size_t>(std::unique(e.begin(), e.end()) - e.begin());
  return 2 * distinct <= h.n_molecules ? RealDriver::divide_and_conquer : RealDriver::mrrr;
}

/// Real symmetric solve of the standing-wave matrix.
inline EigenSystem<double> diagonalize(const StandingWaveHamiltonian& h,
                                       RealDriver driver = RealDriver::automatic) {
  const std::size_t n = h.dim();
  if (n == 0) throw DomainError("diagonalize: empty matrix");
  if (driver == RealDriver::automatic) driver = choose_driver(h);
  EigenSystem<double> out;
  out.n_molecules = h.n_molecules;
  out.n_modes = h.n_modes;
  out.basis = h.basis;
  out.eigenvalues.resize(n);
  const auto ln = static_cast<lapack_int>(n);
  if (driver == RealDriver::divide_and_conquer) {
    out.vectors = h.dense();
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', ln, out.vectors.data(), ln, out.eigenvalues.data());
    detail::check_info(info, "dsyevd", n);
    return out;
  }
  out.vectors.resize(n * n);
  {
    std::vector<double> a = h.dense();
    std::vector<lapack_int> support(2 * n);
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', ln, a.data(), ln, 0.0, 0.0, 0, 0, 0.0,
                       &found, out.eigenvalues.data(), out.vectors.data(), ln, support.data());
    detail::check_info(info, "dsyevr", n);
    if (static_cast<std::size_t>(found) != n)
      throw SolverError("dsyevr returned " + std::to_string(found) + " of " + std::to_string(n) +
                        " eigenpairs");
  }
  return out;
}

// --- contracts --------------------------------------------------------------------------

inline double trace(const HamiltonianMatrix& h) {
  double t = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i) t += h(i, i).real();
  return t;
}

inline double trace(const StandingWaveHamiltonian& h) { return h.trace(); }

inline double frobenius_norm(const HamiltonianMatrix& h) {
  double acc = 0.0;
  for (const auto& v : h.data) acc += std::norm(v);
  return std::sqrt(acc);
}

inline double frobenius_norm(const StandingWaveHamiltonian& h) { return h.frobenius_norm(); }

/// |sum(eigenvalues) - tr H| <= 1e-8 |tr H|.
inline bool trace_check(double matrix_trace, std::span<const double> eigenvalues,
                        double rel_tol = 1e-8) {
  const double sum = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  return std::abs(sum - matrix_trace) <= rel_tol * std::abs(matrix_trace);
}

template <class H, class T>
bool trace_check(const H& h, const EigenSystem<T>& eigen) {
  return trace_check(trace(h), eigen.eigenvalues);
}

/// max_j ||H v_j - lambda_j v_j||_2, evaluated in column blocks.
inline double max_residual(const HamiltonianMatrix& h, const EigenSystem<cplx>& eigen,
                           std::size_t block = 256) {
  const std::size_t n = h.dim();
  std::vector<cplx> work(n * block);
  const cplx one{1.0, 0.0};
  const cplx zero{0.0, 0.0};
  double worst = 0.0;
  for (std::size_t j0 = 0; j0 < n; j0 += block) {
    const std::size_t bs = std::min(block, n - j0);
    cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(bs), static_cast<int>(n), &one, h.data.data(), static_cast<int>(n),
                eigen.vectors.data() + j0 * n, static_cast<int>(n), &zero, work.data(),
                static_cast<int>(n));
    for (std::size_t c = 0; c < bs; ++c) {
      const double lambda = eigen.eigenvalues[j0 + c];
      const cplx* v = eigen.vectors.data() + (j0 + c) * n;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += std::norm(work[i + c * n] - lambda * v[i]);
      worst = std::max(worst, std::sqrt(acc));
    }
  }
  return worst;
}

/// Same contract using the block structure of the standing-wave matrix; never forms H.
inline double max_residual(const StandingWaveHamiltonian& h, const EigenSystem<double>& eigen,
                           std::size_t block = 256) {
  const std::size_t n = h.dim();
  const std::size_t nm = h.n_molecules;
  const std::size_t np = h.n_modes;
  std::vector<double> work(n * block);
  double worst = 0.0;
  for (std::size_t j0 = 0; j0 < n; j0 += block) {
    const std::size_t bs = std::min(block, n - j0);
    const double* z = eigen.vectors.data() + j0 * n;
    if (nm > 0 && np > 0) {
      // molecular rows: C * b
      cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(nm),
                  static_cast<int>(bs), static_cast<int>(np), 1.0, h.coupling.data(),
                  static_cast<int>(nm), z + nm, static_cast<int>(n), 0.0, work.data(),
                  static_cast<int>(n));
      // photonic rows: C^T * a
      cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, static_cast<int>(np),
                  static_cast<int>(bs), static_cast<int>(nm), 1.0, h.coupling.data(),
                  static_cast<int>(nm), z, static_cast<int>(n), 0.0, work.data() + nm,
                  static_cast<int>(n));
    } else {
      std::fill(work.begin(), work.end(), 0.0);
    }
    for (std::size_t c = 0; c < bs; ++c) {
      const double lambda = eigen.eigenvalues[j0 + c];
      const double* v = z + c * n;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = work[i + c * n] + (h.diagonal[i] - lambda) * v[i];
        acc += r * r;
      }
      worst = std::max(worst, std::sqrt(acc));
    }
  }
  return worst;
}

/// Largest deviation of V^H V from the identity.
template <class T>
double orthonormality_error(const EigenSystem<T>& eigen) {
  const std::size_t n = eigen.dim();
  std::vector<T> gram(n * n);
  if constexpr (std::is_same_v<T, double>) {
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, static_cast<int>(n), static_cast<int>(n),
                static_cast<int>(n), 1.0, eigen.vectors.data(), static_cast<int>(n),
                eigen.vectors.data(), static_cast<int>(n), 0.0, gram.data(), static_cast<int>(n));
  } else {
    const cplx one{1.0, 0.0};
    const cplx zero{0.0, 0.0};
    cblas_zgemm(CblasColMajor, CblasConjTrans, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(n), static_cast<int>(n), &one, eigen.vectors.data(),
                static_cast<int>(n), eigen.vectors.data(), static_cast<int>(n), &zero, gram.data(),
                static_cast<int>(n));
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(gram[i + j * n] - (i == j ? T{1} : T{0})));
  return worst;
}

}  // namespace darkstates
