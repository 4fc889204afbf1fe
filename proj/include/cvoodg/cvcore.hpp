#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

// Moments follow the hbar = 2 convention throughout: the coherent state
// |r e^{i phi}> has q = (2r cos phi, 2r sin phi) and V = I.

namespace cvoodg {

using cplx = std::complex<double>;

struct GaussianMoments {
    Eigen::Vector2d q = Eigen::Vector2d::Zero();
    Eigen::Matrix2d V = Eigen::Matrix2d::Identity();

    static GaussianMoments coherent(double r, double phi);
    // V + i Omega >= 0, checked through the eigenvalues of the Hermitian 2x2.
    bool physical(double tol = 1e-12) const;
};

class GaussianChannel {
public:
    // Throws std::invalid_argument unless N = N^T, N >= 0 and
    // det N >= (det M - 1)^2, all to 1e-12.
    GaussianChannel(Eigen::Vector2d d, Eigen::Matrix2d M, Eigen::Matrix2d N);

    static GaussianChannel identity();
    static GaussianChannel displacement(double dx, double dy);
    static GaussianChannel phase_rotation(double theta);
    // M = diag(e^{-r}, e^{r})
    static GaussianChannel squeezing(double r);
    static GaussianChannel loss(double eta);

    const Eigen::Vector2d& d() const { return d_; }
    const Eigen::Matrix2d& M() const { return M_; }
    const Eigen::Matrix2d& N() const { return N_; }

private:
    Eigen::Vector2d d_;
    Eigen::Matrix2d M_;
    Eigen::Matrix2d N_;
};

class FockMatrix {
public:
    FockMatrix() = default;
    // Validates Hermiticity (1e-12), trace in [0, 1+1e-12] and
    // eigenvalues >= -1e-10; throws std::invalid_argument otherwise.
    explicit FockMatrix(Eigen::MatrixXcd entries);

    static FockMatrix from_pure(const Eigen::VectorXcd& psi);
    static FockMatrix fock(int m, int dim);
    static FockMatrix coherent(cplx alpha, int dim);
    static FockMatrix squeezed_vacuum(double lambda, int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& entries() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace().real(); }
    double mean_photon_number() const;

private:
    struct Unchecked {};
    FockMatrix(Eigen::MatrixXcd entries, Unchecked) : m_(std::move(entries)) {}
    friend FockMatrix additive_noise_apply(const FockMatrix&, double, int, double*);
    friend std::pair<FockMatrix, double> truncate_energy(const FockMatrix&, int);

    Eigen::MatrixXcd m_;
};

// Symmetrised element (e^{i theta}|m><n| + e^{-i theta}|n><m|)/2; m == n is the
// projector |m><m| and theta is ignored.
struct OffDiagLabel {
    int m = 0;
    int n = 0;
    double theta = 0.0;
};

GaussianMoments apply_gaussian(const GaussianChannel& channel, const GaussianMoments& moments);

// Squared output fidelity of two channels acting on |r e^{i phi}>.
// Throws std::domain_error when V1 + V2 is singular.
double gaussian_output_fidelity_sq(const GaussianChannel& c1, const GaussianChannel& c2, double r, double phi);

int default_coherent_dim(cplx alpha);
Eigen::VectorXcd coherent_fock_vector(cplx alpha, int dim);

// Sum of absolute eigenvalues of the Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& h);
// Range [0, 2]. Throws std::invalid_argument on dimension mismatch.
double trace_distance(const FockMatrix& rho, const FockMatrix& sigma);

// Radial factor of P_s for the element above, without the angular cosine.
double p_rep_radial(int m, int n, double s, double r);
double p_rep_fock_element(const OffDiagLabel& label, double s, double r, double phi);

// gamma_s(l1, l2) = pi int P_s[l1] Q[l2] d^2 alpha, in closed form.
double gamma_overlap(const OffDiagLabel& l1, const OffDiagLabel& l2, double s);
double gamma_polynomial(int m1, int m2, int delta, double s);

// <j|C_s(|m><n|)|k>, by radial quadrature of P_s[|m><n|] against the
// coherent projector element <j|alpha><alpha|k>. Zero unless j - k = m - n.
double additive_noise_kernel(int m, int n, int j, int k, double s, double* achieved_error = nullptr);

// Matrix elements of C_s(rho) for indices below out_dim. Throws
// quad::QuadratureError if the radial quadrature fails to converge;
// achieved_error receives the largest error estimate otherwise.
FockMatrix additive_noise_apply(const FockMatrix& rho, double s, int out_dim, double* achieved_error = nullptr);

double delta_s_bound(double nbar, double s);

// Rows/columns with index >= M zeroed; second is eta_M, the retained trace.
std::pair<FockMatrix, double> truncate_energy(const FockMatrix& rho, int M);

}  // namespace cvoodg
