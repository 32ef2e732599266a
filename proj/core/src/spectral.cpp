#include "spectradiag/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "spectradiag/error.hpp"

namespace spectradiag {

std::string_view to_string(Centering scheme) {
  switch (scheme) {
    case Centering::task: return "task";
    case Centering::model: return "model";
    case Centering::double_center: return "double";
    case Centering::none: return "none";
  }
  return "unknown";
}

Centering parse_centering(std::string_view name) {
  if (name == "task") return Centering::task;
  if (name == "model") return Centering::model;
  if (name == "double" || name == "double_center") return Centering::double_center;
  if (name == "none") return Centering::none;
  throw InputError("unknown centering scheme '" + std::string(name) + "'");
}

Eigen::MatrixXd center(const Eigen::MatrixXd& x, Centering scheme) {
  Eigen::MatrixXd out = x;
  switch (scheme) {
    case Centering::task:
      out.colwise() -= x.rowwise().mean();
      break;
    case Centering::model:
      out.rowwise() -= x.colwise().mean();
      break;
    case Centering::double_center: {
      out.colwise() -= x.rowwise().mean();
      const Eigen::RowVectorXd col_means = out.colwise().mean();
      out.rowwise() -= col_means;
      break;
    }
    case Centering::none:
      break;
  }
  return out;
}

Eigen::MatrixXd center(const ScoreMatrix& m, Centering scheme) {
  m.require_complete("center");
  return center(m.values(), scheme);
}

// ---------------------------------------------------------------------------

Spectrum::Spectrum(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {
  for (std::size_t i = 0; i < sigmas_.size(); ++i) {
    if (!std::isfinite(sigmas_[i]) || sigmas_[i] < 0.0) {
      throw InputError("spectrum values must be finite and nonnegative");
    }
    if (i > 0 && sigmas_[i] > sigmas_[i - 1]) throw InputError("spectrum must be nonincreasing");
  }
}

Spectrum Spectrum::from_unsorted(std::vector<double> sigmas) {
  std::sort(sigmas.begin(), sigmas.end(), std::greater<>());
  return Spectrum(std::move(sigmas));
}

std::size_t Spectrum::nonzero_count() const {
  return static_cast<std::size_t>(std::count_if(sigmas_.begin(), sigmas_.end(), [](double s) { return s > 0.0; }));
}

double Spectrum::total_variance() const {
  double total = 0.0;
  for (double s : sigmas_) total += s * s;
  return total;
}

std::vector<double> Spectrum::variance_fractions() const {
  std::vector<double> out(sigmas_.size(), 0.0);
  const double total = total_variance();
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < sigmas_.size(); ++i) out[i] = sigmas_[i] * sigmas_[i] / total;
  return out;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw AnalysisError("eigendecomposition failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Spectrum singular_spectrum(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw InputError("singular_spectrum: matrix has non-finite entries");
  const Eigen::Index len = std::min(x.rows(), x.cols());
  std::vector<double> sigmas;
  sigmas.reserve(static_cast<std::size_t>(len));
  if (len == 0) return Spectrum({});

  if (static_cast<double>(x.rows()) * static_cast<double>(x.cols()) > kGramRouteCells) {
    const Eigen::MatrixXd gram = x.rows() <= x.cols() ? Eigen::MatrixXd(x * x.transpose())
                                                      : Eigen::MatrixXd(x.transpose() * x);
    for (double ev : symmetric_eigenvalues(gram)) sigmas.push_back(std::sqrt(std::max(ev, 0.0)));
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    sigmas.assign(sv.data(), sv.data() + sv.size());
    std::sort(sigmas.begin(), sigmas.end(), std::greater<>());
  }

  const double cutoff = sigmas.empty() ? 0.0 : sigmas.front() * kRelativeZeroSigma;
  for (double& s : sigmas) {
    if (s <= cutoff) s = 0.0;
  }
  return Spectrum(std::move(sigmas));
}

namespace {

void require_nonzero(const Spectrum& s, const char* what) {
  if (s.total_variance() <= 0.0) {
    throw AnalysisError(std::string(what) + ": spectrum is all zeros (ED undefined)");
  }
}

}  // namespace

double effective_dimensionality(const Spectrum& s) {
  require_nonzero(s, "effective_dimensionality");
  // Scaled by the leading sigma so a flat spectrum sums exact ones.
  const double top = s.sigmas().front();
  double sum2 = 0.0;
  double sum4 = 0.0;
  for (double sigma : s.sigmas()) {
    const double r = sigma / top;
    const double l = r * r;
    sum2 += l;
    sum4 += l * l;
  }
  return sum2 * sum2 / sum4;
}

double renyi2_ed(const Spectrum& s) {
  require_nonzero(s, "renyi2_ed");
  double collision = 0.0;
  for (double l : s.variance_fractions()) collision += l * l;
  const double h2 = -std::log(collision);
  return std::exp(h2);
}

double shannon_effective_rank(const Spectrum& s) {
  require_nonzero(s, "shannon_effective_rank");
  double h1 = 0.0;
  for (double l : s.variance_fractions()) {
    if (l > 0.0) h1 -= l * std::log(l);
  }
  return std::exp(h1);
}

double pc1_fraction(const Spectrum& s) {
  require_nonzero(s, "pc1_fraction");
  return s.variance_fractions().front();
}

double participation_ratio(std::span<const double> eigenvalues) {
  double top = 0.0;
  for (double ev : eigenvalues) top = std::max(top, ev);
  if (!(top > 0.0)) throw AnalysisError("participation_ratio: no positive eigenvalues");
  double sum = 0.0;
  double sum2 = 0.0;
  for (double ev : eigenvalues) {
    const double l = std::max(ev, 0.0) / top;
    sum += l;
    sum2 += l * l;
  }
  if (sum2 <= 0.0) throw AnalysisError("participation_ratio: no positive eigenvalues");
  return sum * sum / sum2;
}

std::optional<double> try_matrix_ed(const Eigen::MatrixXd& centered) {
  const Spectrum s = singular_spectrum(centered);
  if (s.total_variance() <= 0.0) return std::nullopt;
  return effective_dimensionality(s);
}

double matrix_ed(const Eigen::MatrixXd& centered) { return effective_dimensionality(singular_spectrum(centered)); }

double matrix_ed(const ScoreMatrix& m, Centering scheme) { return matrix_ed(center(m, scheme)); }

PcDecomposition principal_components(const Eigen::MatrixXd& x, Eigen::Index k) {
  const Eigen::Index len = std::min(x.rows(), x.cols());
  if (k < 1 || k > len) {
    throw InputError("principal_components: k=" + std::to_string(k) + " outside [1, " + std::to_string(len) + "]");
  }
  if (!x.allFinite()) throw InputError("principal_components: matrix has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double total = sv.squaredNorm();

  PcDecomposition pc;
  pc.loadings.resize(x.rows(), k);
  pc.scores.resize(x.cols(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXd u = svd.matrixU().col(c);
    Eigen::VectorXd v = svd.matrixV().col(c);
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) {
      u = -u;
      v = -v;
    }
    pc.loadings.col(c) = u;
    pc.scores.col(c) = v * sv(c);
    pc.sigmas.push_back(sv(c));
    pc.variance_fraction.push_back(total > 0.0 ? sv(c) * sv(c) / total : 0.0);
  }
  return pc;
}

double ed_of_correlation(const CorrMatrix& c) {
  c.validate();
  if (c.has_undefined()) throw InputError("ed_of_correlation: matrix has undefined entries");
  return participation_ratio(symmetric_eigenvalues(c.values));
}

}  // namespace spectradiag
