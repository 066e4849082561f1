#include "invsq/log_basis.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "invsq/error.hpp"

namespace invsq {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Eigen::VectorXd log_nodes(double L, int M) {
  if (M < 16 || !(L > 0.0)) throw Error(ErrorKind::InvalidParameter, "log basis needs M >= 16 and L > 0");
  const double h = 2.0 * L / (M + 1);
  Eigen::VectorXd r(M);
  for (int j = 0; j < M; ++j) r(j) = std::exp(-L + (j + 1) * h);
  return r;
}

Eigen::VectorXd log_weights(const CouplingParams& p, double L, int M) {
  const double h = 2.0 * L / (M + 1);
  // int f r^{d-1} dr = int f r^d drho, trapezoid on the interior nodes.
  return h * log_nodes(L, M).array().pow(p.d);
}

}  // namespace

struct LogRadialBasis::Fftw {
  fftw_plan dst = nullptr;  // RODFT00 of size M
  fftw_plan dct = nullptr;  // REDFT00 of size M+2
  Fftw(int M) {
    std::vector<double> a(M + 2), b(M + 2);
    std::lock_guard<std::mutex> lock(planner_mutex());
    dst = fftw_plan_r2r_1d(M, a.data(), b.data(), FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    dct = fftw_plan_r2r_1d(M + 2, a.data(), b.data(), FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~Fftw() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(dst);
    fftw_destroy_plan(dct);
  }
};

LogRadialBasis::LogRadialBasis(const CouplingParams& params, double L, int M)
    : RadialBasis(params, log_nodes(L, M), log_weights(params, L, M)),
      L_(L),
      h_(2.0 * L / (M + 1)),
      fftw_(std::make_unique<Fftw>(M)) {
  symbol_.resize(M);
  kappa_.resize(M);
  for (int k = 0; k < M; ++k) {
    kappa_(k) = (k + 1) * std::numbers::pi / (2.0 * L);
    symbol_(k) = kappa_(k) * kappa_(k) + params.nu * params.nu;
  }
  r_half_ = nodes().array().pow(params.half());
}

LogRadialBasis::~LogRadialBasis() = default;

Eigen::VectorXd LogRadialBasis::sine_coefficients(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out(w.size());
  fftw_execute_r2r(fftw_->dst, const_cast<double*>(w.data()), out.data());
  // FFTW's RODFT00 carries a factor 2; phi_k = L^{-1/2} sin(k pi (rho+L)/2L).
  return out * (0.5 * h_ / std::sqrt(L_));
}

Eigen::VectorXd LogRadialBasis::sine_synthesis(const Eigen::VectorXd& s) const {
  Eigen::VectorXd out(s.size());
  fftw_execute_r2r(fftw_->dst, const_cast<double*>(s.data()), out.data());
  return out * (0.5 / std::sqrt(L_));
}

Eigen::VectorXcd LogRadialBasis::apply_symbol(const Eigen::VectorXcd& w, const Eigen::VectorXd& m) const {
  const Eigen::VectorXd re = sine_synthesis(m.cwiseProduct(sine_coefficients(w.real())));
  const Eigen::VectorXd im = sine_synthesis(m.cwiseProduct(sine_coefficients(w.imag())));
  Eigen::VectorXcd out(w.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

Eigen::VectorXcd LogRadialBasis::apply_operator(const Eigen::VectorXcd& u) const {
  const Eigen::VectorXcd w = r_half_.cwiseProduct(u);
  const Eigen::VectorXd scale = nodes().array().pow(-0.5 * (params().d + 2));
  return scale.cwiseProduct(apply_symbol(w, symbol_));
}

Eigen::VectorXcd LogRadialBasis::solve_operator(const Eigen::VectorXcd& f) const {
  const Eigen::VectorXd up = nodes().array().pow(0.5 * (params().d + 2));
  const Eigen::VectorXcd g = up.cwiseProduct(f);
  return apply_symbol(g, symbol_.cwiseInverse()).cwiseQuotient(r_half_.cast<std::complex<double>>());
}

double LogRadialBasis::form(const Eigen::VectorXcd& u) const {
  const Eigen::VectorXcd w = r_half_.cwiseProduct(u);
  const Eigen::VectorXd sr = sine_coefficients(w.real());
  const Eigen::VectorXd si = sine_coefficients(w.imag());
  return params().omega() * (symbol_.dot(sr.cwiseAbs2()) + symbol_.dot(si.cwiseAbs2()));
}

Eigen::VectorXcd LogRadialBasis::derivative(const Eigen::VectorXcd& u) const {
  // du/dr = r^{-d/2} (w' - (d-2)/2 w); w' is a cosine series, evaluated with
  // a DCT-I whose end samples are zero.
  const int M = size();
  const Eigen::VectorXcd w = r_half_.cwiseProduct(u);
  auto wprime = [&](const Eigen::VectorXd& part) {
    const Eigen::VectorXd s = sine_coefficients(part);
    Eigen::VectorXd in = Eigen::VectorXd::Zero(M + 2), out(M + 2);
    in.segment(1, M) = s.cwiseProduct(kappa_);
    fftw_execute_r2r(fftw_->dct, in.data(), out.data());
    return Eigen::VectorXd(out.segment(1, M) * (0.5 / std::sqrt(L_)));
  };
  Eigen::VectorXcd dw(M);
  dw.real() = wprime(w.real());
  dw.imag() = wprime(w.imag());
  const Eigen::VectorXd scale = nodes().array().pow(-0.5 * params().d);
  return scale.cwiseProduct(dw - params().half() * w);
}

std::string LogRadialBasis::describe() const {
  std::ostringstream os;
  os << "log-sine(nu=" << params().nu << ", L=" << L_ << ", M=" << size() << ")";
  return os.str();
}

std::shared_ptr<const LogRadialBasis> make_log_basis(const CouplingParams& params, double h) {
  // w of a ground state decays like exp(-nu |rho|); at L = 36/nu the
  // Dirichlet ends sit below roundoff.
  const double L = std::max(36.0 / params.nu, 20.0);
  const int M = static_cast<int>(std::ceil(2.0 * L / h)) - 1;
  return std::make_shared<const LogRadialBasis>(params, L, M);
}

}  // namespace invsq
