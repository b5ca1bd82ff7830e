#include "phishpond/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "phishpond/error.hpp"

namespace phishpond {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) break;
  }
  return h;
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0)
    throw Error(Errc::InvalidData, "incomplete beta argument out of domain");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidData, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_tailed_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidData, "quantile probability must be in (0,1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(Errc::InsufficientData, "mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(Errc::InsufficientData, "variance needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

Descriptives describe(std::span<const double> xs) {
  Descriptives d;
  d.n = xs.size();
  d.mean = mean(xs);
  if (xs.size() > 1) {
    d.sd = sample_sd(xs);
    d.se = d.sd / std::sqrt(static_cast<double>(d.n));
  }
  return d;
}

TTestResult paired_t(const PairedSample& sample) {
  if (sample.pre.size() != sample.post.size())
    throw Error(Errc::LengthMismatch, "pre and post have different lengths");
  const auto n = sample.n();
  if (n < 2) throw Error(Errc::InsufficientData, "paired t-test needs at least 2 pairs");

  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) diffs[i] = sample.pre[i] - sample.post[i];

  TTestResult r;
  r.mean_pre = mean(sample.pre);
  r.sd_pre = sample_sd(sample.pre);
  r.mean_post = mean(sample.post);
  r.sd_post = sample_sd(sample.post);
  r.mean_diff = mean(diffs);
  r.sd_diff = sample_sd(diffs);
  if (r.sd_diff == 0.0) throw Error(Errc::DegenerateVariance, "all paired differences are equal");
  r.se_diff = r.sd_diff / std::sqrt(static_cast<double>(n));
  r.t = r.mean_diff / r.se_diff;
  r.df = static_cast<int>(n) - 1;
  const double crit = student_t_quantile(0.975, r.df);
  r.ci95 = {r.mean_diff - crit * r.se_diff, r.mean_diff + crit * r.se_diff};
  r.p_two_tailed = student_t_two_tailed_p(r.t, r.df);
  return r;
}

CorrelationReport pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "x and y have different lengths");
  const auto n = x.size();
  if (n < 3) throw Error(Errc::InsufficientData, "pearson needs at least 3 pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ConstantInput, "constant input vector");
  CorrelationReport out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - out.r * out.r;
  out.p_two_tailed = denom <= 0.0 ? 0.0
                                  : student_t_two_tailed_p(out.r * std::sqrt(df / denom), df);
  return out;
}

RegressionResult ols_regress(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& response) {
  const auto n = predictors.rows();
  const auto p = predictors.cols();
  if (response.size() != n) throw Error(Errc::RowMismatch, "X and y have different row counts");
  if (p < 1 || n <= p + 1)
    throw Error(Errc::Underdetermined, "need more rows than predictors + 1");

  const Eigen::MatrixXd centered = predictors.rowwise() - predictors.colwise().mean();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(centered);
  rank_check.setThreshold(1e-10);
  if (rank_check.rank() < p) throw Error(Errc::RankDeficient, "predictors are collinear");

  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = predictors;
  RegressionResult out;
  out.coefficients = design.colPivHouseholderQr().solve(response);
  out.residuals = response - design * out.coefficients;
  const double ss_res = out.residuals.squaredNorm();
  const double ss_tot = (response.array() - response.mean()).matrix().squaredNorm();
  out.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  out.residual_variance = ss_res / static_cast<double>(n - p - 1);
  return out;
}

Eigen::MatrixXd interaction_items(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw Error(Errc::RowMismatch, "blocks have different respondents");
  const Eigen::MatrixXd ca = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd cb = b.rowwise() - b.colwise().mean();
  Eigen::MatrixXd out(a.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      out.col(i * b.cols() + j) = ca.col(i).cwiseProduct(cb.col(j));
  return out;
}

Eigen::MatrixXd to_matrix(const LikertMatrix& matrix) {
  Eigen::MatrixXd out(matrix.respondents(), matrix.items());
  for (std::size_t r = 0; r < matrix.respondents(); ++r)
    for (std::size_t c = 0; c < matrix.items(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = matrix.at(r, c);
  return out;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data) {
  if (data.rows() < 3) throw Error(Errc::InsufficientData, "correlation needs at least 3 rows");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j)
    if (norms(j) == 0.0) throw Error(Errc::ConstantInput, "constant column " + std::to_string(j));
  const Eigen::MatrixXd scaled = centered * norms.cwiseInverse().asDiagonal();
  return scaled.transpose() * scaled;
}

double kmo_from_correlation(const Eigen::MatrixXd& correlation) {
  const auto k = correlation.rows();
  if (k < 3 || correlation.cols() != k)
    throw Error(Errc::InsufficientData, "KMO needs a square matrix of at least 3 variables");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(correlation);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw Error(Errc::SingularCorrelation, "correlation matrix is singular");
  const Eigen::MatrixXd inverse = lu.inverse();

  double r2 = 0.0;
  double q2 = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double partial = -inverse(i, j) / std::sqrt(inverse(i, i) * inverse(j, j));
      r2 += correlation(i, j) * correlation(i, j);
      q2 += partial * partial;
    }
  }
  return r2 / (r2 + q2);
}

double kmo(const Eigen::MatrixXd& data) {
  if (data.cols() < 3) throw Error(Errc::InsufficientData, "KMO needs at least 3 columns");
  Eigen::MatrixXd r;
  try {
    r = correlation_matrix(data);
  } catch (const Error& e) {
    if (e.code() != Errc::ConstantInput) throw;
    throw Error(Errc::SingularCorrelation, e.what());
  }
  return kmo_from_correlation(r);
}

double kmo(const LikertMatrix& matrix) { return kmo(to_matrix(matrix)); }

PairedReportRow make_report_row(std::string pre_label, std::string post_label,
                                const PairedSample& sample) {
  if (sample.pre.size() != sample.post.size())
    throw Error(Errc::LengthMismatch, "pre and post have different lengths");
  PairedReportRow row;
  row.pre_label = std::move(pre_label);
  row.post_label = std::move(post_label);
  row.pre = describe(sample.pre);
  row.post = describe(sample.post);
  try {
    row.test = paired_t(sample);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateVariance) throw;
  }
  return row;
}

std::string format_sig(double p) {
  auto s = fmt("%.3f", p);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

std::string render_paired_report(std::span<const PairedReportRow> rows) {
  std::string out;
  char line[256];
  out += "Paired Samples Statistics\n";
  std::snprintf(line, sizeof line, "%-8s%-22s%10s%6s%16s%17s\n", "", "", "Mean", "N",
                "Std. Deviation", "Std. Error Mean");
  out += line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto pair = "Pair " + std::to_string(i + 1);
    std::snprintf(line, sizeof line, "%-8s%-22s%10.2f%6zu%16.3f%17.3f\n", pair.c_str(),
                  r.pre_label.c_str(), r.pre.mean, r.pre.n, r.pre.sd, r.pre.se);
    out += line;
    std::snprintf(line, sizeof line, "%-8s%-22s%10.2f%6zu%16.3f%17.3f\n", "",
                  r.post_label.c_str(), r.post.mean, r.post.n, r.post.sd, r.post.se);
    out += line;
  }

  out += "\nPaired Samples Test\n";
  std::snprintf(line, sizeof line, "%-8s%-30s%10s%16s%17s%12s%12s%9s%5s%17s\n", "", "", "Mean",
                "Std. Deviation", "Std. Error Mean", "95% Lower", "95% Upper", "t", "df",
                "Sig. (2-tailed)");
  out += line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto pair = "Pair " + std::to_string(i + 1);
    const auto name = r.pre_label + " - " + r.post_label;
    if (!r.test) {
      std::snprintf(line, sizeof line, "%-8s%-30s%10.3f  (differences have zero variance; t undefined)\n",
                    pair.c_str(), name.c_str(), r.pre.mean - r.post.mean);
      out += line;
      continue;
    }
    const auto& t = *r.test;
    std::snprintf(line, sizeof line, "%-8s%-30s%10.3f%16.3f%17.3f%12.3f%12.3f%9.3f%5d%17s\n",
                  pair.c_str(), name.c_str(), t.mean_diff, t.sd_diff, t.se_diff, t.ci95.first,
                  t.ci95.second, t.t, t.df, format_sig(t.p_two_tailed).c_str());
    out += line;
  }
  out += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].test) continue;
    const auto& t = *rows[i].test;
    std::snprintf(line, sizeof line, "Pair %zu: t = %.3f, df = %d, Sig. (2-tailed) = %s\n", i + 1,
                  t.t, t.df, format_sig(t.p_two_tailed).c_str());
    out += line;
  }
  return out;
}

}  // namespace phishpond
