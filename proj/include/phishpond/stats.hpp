#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phishpond/psychometrics.hpp"

namespace phishpond {

// --- distributions ----------------------------------------------------------

// I_x(a, b) by Lentz's continued fraction. Requires a, b > 0 and 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
double student_t_two_tailed_p(double t, double df);
// Inverse of student_t_cdf for 0 < p < 1.
double student_t_quantile(double p, double df);

// --- descriptives -----------------------------------------------------------

double mean(std::span<const double> xs);
// n-1 denominator; the only variance convention used in this library.
double sample_variance(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

struct Descriptives {
  double mean = 0.0;
  std::size_t n = 0;
  double sd = 0.0;
  double se = 0.0;
};

Descriptives describe(std::span<const double> xs);

// --- paired t-test ----------------------------------------------------------

struct PairedSample {
  std::vector<double> pre;
  std::vector<double> post;

  std::size_t n() const { return pre.size(); }
};

struct TTestResult {
  double mean_pre = 0.0;
  double sd_pre = 0.0;
  double mean_post = 0.0;
  double sd_post = 0.0;
  double mean_diff = 0.0;  // mean of pre - post
  double sd_diff = 0.0;
  double se_diff = 0.0;
  double t = 0.0;
  int df = 0;
  std::pair<double, double> ci95;
  double p_two_tailed = 1.0;
};

// Throws LengthMismatch, InsufficientData (n < 2) or DegenerateVariance.
TTestResult paired_t(const PairedSample& sample);

// --- correlation and regression ---------------------------------------------

struct CorrelationReport {
  double r = 0.0;
  double p_two_tailed = 1.0;
};

// Throws LengthMismatch, InsufficientData (n < 3) or ConstantInput.
CorrelationReport pearson(std::span<const double> x, std::span<const double> y);

struct RegressionResult {
  // Intercept first, then one slope per predictor column.
  Eigen::VectorXd coefficients;
  double r_squared = 0.0;
  // SSres / (n - p - 1).
  double residual_variance = 0.0;
  Eigen::VectorXd residuals;
};

// Least squares with an implicit intercept column, solved by column-pivoted
// Householder QR. Throws Underdetermined or RankDeficient.
RegressionResult ols_regress(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& response);

// Mean-centres both blocks, then returns every product a_i * b_j with a's
// column index varying slowest. Throws RowMismatch.
Eigen::MatrixXd interaction_items(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Eigen::MatrixXd to_matrix(const LikertMatrix& matrix);
// Pearson correlation matrix of the columns. Throws ConstantInput.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

// Kaiser-Meyer-Olkin sampling adequacy. Throws InsufficientData (< 3
// columns) or SingularCorrelation.
double kmo(const Eigen::MatrixXd& data);
double kmo(const LikertMatrix& matrix);
double kmo_from_correlation(const Eigen::MatrixXd& correlation);

// --- reporting --------------------------------------------------------------

struct PairedReportRow {
  std::string pre_label;
  std::string post_label;
  Descriptives pre;
  Descriptives post;
  // Empty when the differences have zero variance.
  std::optional<TTestResult> test;
};

PairedReportRow make_report_row(std::string pre_label, std::string post_label,
                                const PairedSample& sample);

// Two fixed-layout blocks: "Paired Samples Statistics" (Mean, N, Std.
// Deviation, Std. Error Mean) and "Paired Samples Test" (paired
// differences, 95% CI, t, df, Sig. 2-tailed).
std::string render_paired_report(std::span<const PairedReportRow> rows);

// SPSS-style significance: ".000", ".725".
std::string format_sig(double p);

}  // namespace phishpond
