// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
// Exit status is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "phishpond/game.hpp"
#include "phishpond/psychometrics.hpp"
#include "phishpond/rules.hpp"
#include "phishpond/stats.hpp"
#include "phishpond/store.hpp"
#include "phishpond/study.hpp"
#include "support.hpp"

using namespace phishpond;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail << " [over time budget " << budget_s << " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %s (%.3f s)%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
              o.detail.str().c_str());
}

PairedSample two_point(double pre, double low, double high) {
  PairedSample s;
  for (int i = 0; i < 20; ++i) {
    s.pre.push_back(pre);
    s.post.push_back(i % 2 ? high : low);
  }
  return s;
}

PlayerAction right(const GameState& s) {
  return s.current_round()->truth == Truth::Legit ? PlayerAction::eat() : PlayerAction::avoid();
}
PlayerAction wrong(const GameState& s) {
  return s.current_round()->truth == Truth::Legit ? PlayerAction::avoid() : PlayerAction::eat();
}

}  // namespace

int main() {
  criterion("sus-reproduction", 1.0, [](Outcome& o) {
    const auto m = LikertMatrix::load(testsupport::example("sus_responses.csv"));
    std::vector<SusResponse> responses;
    for (const auto& row : m.rows()) responses.emplace_back(row);
    const auto r = sus_group(responses);
    double contributions = 0;
    for (std::size_t i = 0; i < kSusItems; ++i)
      contributions += sus_item_contribution(i, r.per_item_mean[i]);
    const double gap = std::abs(2.5 * contributions - r.overall_mean);
    o.detail << " respondents=" << responses.size() << " overall=" << r.overall_mean
             << " (83.62 +-0.01) identity gap=" << gap;
    o.require(responses.size() == 20, "20 respondents");
    o.require(near(r.overall_mean, 83.62, 0.01), "overall SUS");
    // Algebraically exact; the item means (3.95, ...) are not binary fractions.
    o.require(gap < 1e-12, "2.5 x sum of mean contributions, to rounding 1e-12");
  });

  criterion("paired-t-reproduction", 1.0, [](Outcome& o) {
    const auto g = paired_t(two_point(50, 62.92, 94.08));
    const double a = 31.267 * std::sqrt(19.0 / 20.0);
    const auto w = paired_t(two_point(60, 62.5 - a, 62.5 + a));
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  " game t=%.4f ci=(%.4f, %.4f) p=%.2e; web t=%.4f p=%.4f", g.t, g.ci95.first,
                  g.ci95.second, g.p_two_tailed, w.t, w.p_two_tailed);
    o.detail << buf;
    o.require(near(g.t, -7.973, 0.001), "game t -7.973 +-0.001");
    o.require(g.df == 19 && w.df == 19, "df 19");
    o.require(near(g.ci95.first, -35.981, 0.001) && near(g.ci95.second, -21.019, 0.001),
              "game CI (-35.981, -21.019) +-0.001");
    o.require(near(w.t, -0.358, 0.001), "web t -0.358 +-0.001");
    o.require(near(w.p_two_tailed, 0.725, 0.005), "web p 0.725 +-0.005");
  });

  criterion("classifier-corpus", 1.0, [](Outcome& o) {
    int ok = 0;
    for (const auto& e : default_corpus()) {
      const auto v = classify(parse_url(e.url), BrandLexicon::embedded());
      const auto want = e.label == Truth::Phish ? VerdictLabel::Phishing : VerdictLabel::Legitimate;
      const bool good = v.label == want && !v.hits.empty() && e.tip && v.hits.front().tip == *e.tip;
      if (good) ++ok;
      else o.detail << " miss:" << e.id;
    }
    o.detail << " " << ok << "/" << default_corpus().size() << " rows";
    o.require(default_corpus().size() == 10 && ok == 10, "all 10 rows label + exact tip");
  });

  criterion("engine-exhaustive", 30.0, [](Outcome& o) {
    for (bool advance : {true, false}) {
      const auto r = checks::enumerate_mini(advance);
      o.detail << " advance_on_error=" << advance << ": states=" << r.states
               << " terminal=" << r.terminal_states << " violations=" << r.violations.size();
      for (const auto& v : r.violations) o.detail << " {" << v << "}";
      o.require(r.violations.empty(), "no invariant violations");
    }
  });

  criterion("economy-spot-checks", 1.0, [](Outcome& o) {
    const auto pool = to_rounds(default_corpus());
    const auto fresh = new_session(GameConfig{}, pool, 1);
    o.require(fresh.score == 0 && fresh.lives == 5 && fresh.time_remaining == 600,
              "fresh (0, 5, 600)");
    auto s = fresh;
    bool exact = true;
    for (int i = 0; i < 6; ++i) {
      const int before = s.time_remaining;
      s = apply_action(s, PlayerAction::help()).first;
      exact &= before - s.time_remaining == 100;
    }
    o.require(exact, "each help deducts 100 s");
    o.require(s.status == GameStatus::TimeUp, "help to zero ends TimeUp");

    s = fresh;
    while (s.status == GameStatus::InProgress) s = apply_action(s, right(s)).first;
    o.require(s.score == 10 && s.status == GameStatus::Completed, "perfect play 10, Completed");

    s = fresh;
    for (int i = 0; i < 4; ++i) s = apply_action(s, wrong(s)).first;
    const bool alive = s.status == GameStatus::InProgress;
    s = apply_action(s, wrong(s)).first;
    o.require(alive && s.status == GameStatus::OutOfLives, "fifth mistake ends OutOfLives");

    s = apply_action(fresh, PlayerAction::tick(600)).first;
    o.require(s.status == GameStatus::TimeUp && s.time_remaining == 0, "clock exhaustion TimeUp");
    o.detail << " fresh=(0,5,600) help=-100 perfect=10/Completed 5th-mistake=OutOfLives tick600=TimeUp";
  });

  criterion("statistics-property-suite", 5.0, [](Outcome& o) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> pos(1, 5);
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < 30; ++i) {
      const int v = pos(rng);
      rows.push_back({v, v, v});
    }
    rows[0] = {1, 1, 1};
    rows[1] = {5, 5, 5};
    const LikertMatrix dup({"a", "b", "c"}, rows);
    const double alpha = cronbach_alpha(dup, ConstructSpec{"dup", {0, 1, 2}, {false, false, false}});
    o.require(near(alpha, 1.0, 1e-9), "alpha(duplicated) = 1 +-1e-9");

    std::normal_distribution<double> noise;
    std::vector<double> x(50);
    for (auto& v : x) v = noise(rng);
    o.require(near(pearson(x, x).r, 1.0, 1e-12), "pearson(x,x) = 1");

    Eigen::MatrixXd X(50, 2);
    Eigen::VectorXd y(50), yn(50);
    for (int i = 0; i < 50; ++i) {
      X(i, 0) = noise(rng);
      X(i, 1) = noise(rng);
      y(i) = 1.5 - 2 * X(i, 0) + 0.5 * X(i, 1);
      yn(i) = y(i) + noise(rng);
    }
    o.require(near(ols_regress(X, y).r_squared, 1.0, 1e-9), "exact-linear R^2 = 1 +-1e-9");
    const auto fit = ols_regress(X, yn);
    const Eigen::VectorXd e = fit.residuals.normalized();
    double worst = std::abs(e.sum() / std::sqrt(50.0));
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(e.dot(X.col(j).normalized())));
    o.require(worst < 1e-8, "residual-predictor orthogonality < 1e-8");

    const std::vector<std::vector<double>> r = {
        {1, 0.5, 0.4, 0.3}, {0.5, 1, 0.35, 0.2}, {0.4, 0.35, 1, 0.45}, {0.3, 0.2, 0.45, 1}};
    Eigen::MatrixXd rm(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) rm(i, j) = r[i][j];
    const double k = kmo_from_correlation(rm);
    const double oracle = checks::kmo_inverse_oracle(r);
    o.require(near(k, oracle, 1e-6), "KMO vs inverse-matrix oracle 1e-6");
    o.require(near(oracle, 36331799373.0 / 53388231773.0, 1e-12), "oracle vs exact fraction");

    const double crit = student_t_quantile(0.975, 19);
    o.require(near(crit, 2.093, 0.001), "t_crit(0.975, 19) = 2.093 +-0.001");
    char buf[200];
    std::snprintf(buf, sizeof buf, " alpha=%.12f orth=%.1e kmo=%.9f oracle=%.9f tcrit=%.6f", alpha,
                  worst, k, oracle, crit);
    o.detail << buf;
  });

  criterion("study-report-reproduction", 1.0, [](Outcome& o) {
    const auto study = load_study_dir(testsupport::data_dir() / "demo_study");
    const auto report = group_report(study.records, study.pretest, study.posttest);
    const auto* g = report.find(Condition::Game);
    const auto* c = report.find(Condition::Control);
    if (!g || !c) throw std::runtime_error("missing condition");
    const auto text = render_study_report(report);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  " game %.1f->%.1f (+%.1f) t=%.3f; control %.1f->%.1f (+%.1f) t=%.3f p=%.3f",
                  g->paired.pre.mean, g->paired.post.mean, g->improvement, g->paired.test->t,
                  c->paired.pre.mean, c->paired.post.mean, c->improvement, c->paired.test->t,
                  c->paired.test->p_two_tailed);
    o.detail << buf;
    o.require(g->paired.pre.mean == 55 && g->paired.post.mean == 84, "game means 55/84");
    o.require(c->paired.pre.mean == 60 && c->paired.post.mean == 62.5, "control means 60/62.5");
    o.require(g->improvement == 29 && c->improvement == 2.5, "improvement 29 and 2.5");
    o.require(text.find("t = -0.358, df = 19") != std::string::npos, "report embeds t = -0.358");
    o.require(near(c->paired.test->p_two_tailed, 0.725, 0.005), "control p 0.725");
    // Means 55/84 force a mean difference of -29, not -28.5; see README.
    o.require(near(g->paired.test->t, -7.973, 0.001) &&
                  text.find("t = -7.973, df = 19") != std::string::npos,
              "report embeds game t = -7.973 +-0.001");
  });

  criterion("replay-determinism-fuzz", 30.0, [](Outcome& o) {
    testsupport::ScratchDir dir("acceptance-fuzz");
    const auto r = checks::replay_fuzz(dir.path(), 100, 77);
    o.detail << " " << r.matched << "/" << r.runs << " identical";
    for (const auto& f : r.failures) o.detail << " {" << f << "}";
    o.require(r.matched == 100, "100/100");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
