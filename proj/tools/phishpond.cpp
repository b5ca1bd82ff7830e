// phishpond command line: classification, headless play, scoring,
// statistics, study reports and the HTTP server.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "phishpond/game.hpp"
#include "phishpond/psychometrics.hpp"
#include "phishpond/rules.hpp"
#include "phishpond/service.hpp"
#include "phishpond/stats.hpp"
#include "phishpond/store.hpp"
#include "phishpond/study.hpp"
#include "phishpond/text.hpp"
#include "phishpond/url.hpp"

// After the project headers: resolv.h defines a `_res` macro that Eigen trips on.
#include <httplib.h>

namespace pp = phishpond;

namespace {

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::vector<pp::CorpusEntry> corpus_from(const std::string& path) {
  if (!path.empty()) return pp::load_corpus(path);
  if (const char* env = std::getenv("PHISHPOND_CORPUS"); env && *env) return pp::load_corpus(env);
  return pp::default_corpus();
}

int run_classify(const std::string& url) {
  const auto parsed = pp::parse_url(url);
  const auto verdict = pp::classify(parsed, pp::BrandLexicon::embedded());
  std::cout << pp::to_string(verdict.label) << "\n";
  std::cout << "registrable: "
            << (parsed.registrable_domain.empty() ? parsed.host : parsed.registrable_domain)
            << "\n";
  if (verdict.hits.empty()) {
    std::cout << "tip: " << pp::TipCatalog::embedded().generic_legitimate() << "\n";
  }
  for (const auto& hit : verdict.hits) {
    std::cout << "rule: " << pp::to_string(hit.rule_id) << " (" << hit.evidence << ")\n";
    std::cout << "tip: " << hit.tip << "\n";
  }
  return 0;
}

// One action per line: eat | avoid | help | tick <seconds>. '#' starts a comment.
std::vector<pp::PlayerAction> parse_script(std::string_view content) {
  std::vector<pp::PlayerAction> actions;
  for (const auto& [line, body] : pp::text::content_lines(content)) {
    const auto words = pp::text::split(body, ' ');
    std::vector<std::string> parts;
    for (const auto& w : words)
      if (!pp::text::trim(w).empty()) parts.emplace_back(pp::text::trim(w));
    const auto verb = pp::text::to_lower(parts.at(0));
    if (verb == "eat" && parts.size() == 1) actions.push_back(pp::PlayerAction::eat());
    else if (verb == "avoid" && parts.size() == 1) actions.push_back(pp::PlayerAction::avoid());
    else if (verb == "help" && parts.size() == 1) actions.push_back(pp::PlayerAction::help());
    else if (verb == "tick" && parts.size() == 2 && pp::text::is_digits(parts[1]) &&
             parts[1].size() < 9)
      actions.push_back(pp::PlayerAction::tick(std::stoi(parts[1])));
    else
      throw pp::Error(pp::Errc::ParseError, "bad script line '" + std::string(body) + "'", line);
  }
  return actions;
}

int run_play(const std::string& script, std::uint64_t seed, const std::string& corpus_path,
             bool quiet) {
  const auto actions = parse_script(pp::text::read_file(script));
  const auto corpus = corpus_from(corpus_path);
  const auto pool = pp::to_rounds(corpus);
  auto state = pp::new_session(pp::GameConfig{}, pool, seed);
  std::size_t ignored = 0;
  for (const auto& action : actions) {
    if (state.status != pp::GameStatus::InProgress) {
      ++ignored;
      continue;
    }
    const auto* round = state.current_round();
    const auto number = state.round_index + 1;
    auto [next, outcome] = pp::apply_action(state, action);
    if (!quiet) {
      std::cout << "[" << number << "] " << pp::to_string(action.kind);
      if (action.kind == pp::PlayerAction::Kind::Tick) std::cout << " " << action.seconds;
      if (round) std::cout << " " << round->url;
      std::cout << " -> " << pp::to_string(outcome.kind);
      if (!outcome.feedback.empty()) std::cout << " \"" << outcome.feedback << "\"";
      if (outcome.resolved) std::cout << " (" << pp::to_string(outcome.resolved->truth) << ")";
      std::cout << "\n";
      if (outcome.tip) std::cout << "    tip: " << *outcome.tip << "\n";
    }
    state = std::move(next);
  }
  const auto summary = pp::summarize(state);
  std::cout << "seed: " << seed << "\n"
            << "status: " << pp::to_string(summary.status) << "\n"
            << "message: " << pp::status_message(summary.status) << "\n"
            << "score: " << summary.score << "\n"
            << "mistakes: " << summary.mistakes << "\n"
            << "helps_used: " << summary.helps_used << "\n"
            << "elapsed: " << summary.elapsed << "\n"
            << "lives: " << state.lives << "\n"
            << "time_remaining: " << state.time_remaining << "\n";
  if (ignored) std::cout << "ignored_after_end: " << ignored << "\n";
  return 0;
}

int run_sus(const std::string& path) {
  const auto matrix = pp::LikertMatrix::load(path);
  std::vector<pp::SusResponse> responses;
  for (const auto& row : matrix.rows()) responses.emplace_back(row);
  const auto report = pp::sus_group(responses);
  const auto& texts = pp::sus_item_texts();
  std::cout << "item,mean,sd,text\n";
  for (std::size_t i = 0; i < pp::kSusItems; ++i)
    std::cout << "Q" << (i + 1) << "," << fixed(report.per_item_mean[i], 2) << ","
              << fixed(report.per_item_sd[i], 3) << ",\"" << texts[i] << "\"\n";
  std::cout << "respondents: " << responses.size() << "\n";
  std::cout << "SUS score: " << fixed(report.overall_mean, 3) << "\n";
  return 0;
}

pp::PairedSample read_paired(const std::string& path) {
  pp::PairedSample sample;
  const auto content = pp::text::read_file(path);
  bool first = true;
  for (const auto& [line, body] : pp::text::content_lines(content)) {
    const auto cells = pp::text::split(body, ',');
    if (cells.size() != 2) throw pp::Error(pp::Errc::ParseError, "expected two columns", line);
    double pre = 0, post = 0;
    try {
      std::size_t used_a = 0, used_b = 0;
      const std::string a(pp::text::trim(cells[0])), b(pp::text::trim(cells[1]));
      pre = std::stod(a, &used_a);
      post = std::stod(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw pp::Error(pp::Errc::ParseError, "non-numeric value", line);
    }
    first = false;
    sample.pre.push_back(pre);
    sample.post.push_back(post);
  }
  return sample;
}

int run_ttest(const std::string& path, const std::string& pre_label,
              const std::string& post_label) {
  const auto sample = read_paired(path);
  const std::vector<pp::PairedReportRow> rows{pp::make_report_row(pre_label, post_label, sample)};
  std::cout << pp::render_paired_report(rows);
  return 0;
}

int run_report(const std::string& dir) {
  const auto study = pp::load_study_dir(dir);
  const auto report = pp::group_report(study.records, study.pretest, study.posttest);
  std::cout << "study: " << study.id << "\n" << pp::render_study_report(report);
  return 0;
}

int run_corpus_validate(const std::string& path) {
  const auto entries = pp::load_corpus(path);
  std::size_t phish = 0;
  for (const auto& e : entries) phish += e.label == pp::Truth::Phish;
  std::cout << "ok: " << entries.size() << " entries (" << (entries.size() - phish)
            << " Legit, " << phish << " Phish)\n";
  return 0;
}

int run_serve(const std::string& config_path, std::optional<int> port,
              std::optional<std::string> host, std::optional<std::string> data_dir,
              std::optional<std::string> static_dir) {
  pp::ServeConfig config;
  if (!config_path.empty()) config = pp::parse_serve_config(pp::text::read_file(config_path));
  pp::apply_environment(config);
  if (port) config.port = *port;
  if (host) config.host = *host;
  if (data_dir) config.data_dir = *data_dir;
  if (static_dir) config.static_dir = *static_dir;

  pp::ServiceOptions options;
  if (config.corpus) options.corpus = pp::load_corpus(*config.corpus);
  options.data_dir = config.data_dir;
  pp::GameService service(std::move(options));
  httplib::Server server;
  service.register_routes(server, config.static_dir);
  int bound = config.port;
  if (config.port == 0) {
    bound = server.bind_to_any_port(config.host);
    if (bound < 0) throw pp::Error(pp::Errc::IoError, "cannot bind " + config.host);
  } else if (!server.bind_to_port(config.host, config.port)) {
    throw pp::Error(pp::Errc::IoError,
                    "cannot bind " + config.host + ":" + std::to_string(config.port));
  }
  std::cout << "listening on http://" << config.host << ":" << bound << std::endl;
  server.listen_after_bind();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phishpond: phishing-awareness game, scoring and study statistics"};
  app.require_subcommand(1);

  std::string url;
  auto* classify = app.add_subcommand("classify", "Classify a URL and print the tips");
  classify->add_option("url", url)->required();

  std::string script, corpus_path;
  std::uint64_t seed = 1;
  bool quiet = false;
  auto* play = app.add_subcommand("play", "Run an action script headless");
  play->add_option("--script", script, "eat/avoid/help/tick N, one per line")->required();
  play->add_option("--seed", seed, "Round plan seed")->capture_default_str();
  play->add_option("--corpus", corpus_path, "Corpus JSONL (default: built-in)");
  play->add_flag("--quiet", quiet, "Only print the summary");

  std::string sus_path;
  auto* sus = app.add_subcommand("sus", "Score SUS responses (header + 10 columns)");
  sus->add_option("file", sus_path)->required();

  std::string ttest_path, pre_label = "PreTest", post_label = "PostTest";
  auto* ttest = app.add_subcommand("ttest", "Paired t-test on a pre,post file");
  ttest->add_option("file", ttest_path)->required();
  ttest->add_option("--pre-label", pre_label)->capture_default_str();
  ttest->add_option("--post-label", post_label)->capture_default_str();

  std::string study_dir;
  auto* report = app.add_subcommand("report", "Group report for a study directory");
  report->add_option("dir", study_dir)->required();

  std::string corpus_file;
  auto* corpus = app.add_subcommand("corpus", "Corpus utilities");
  corpus->require_subcommand(1);
  auto* validate = corpus->add_subcommand("validate", "Check a corpus file");
  validate->add_option("file", corpus_file)->required();

  std::string serve_config;
  std::optional<int> port;
  std::optional<std::string> host, data_dir, static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--config", serve_config, "key=value config file");
  serve->add_option("--port", port, "0 picks a free port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  serve->add_option("--data-dir", data_dir, "Where sessions and studies are stored");
  serve->add_option("--static", static_dir, "Directory served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return run_classify(url);
    if (*play) return run_play(script, seed, corpus_path, quiet);
    if (*sus) return run_sus(sus_path);
    if (*ttest) return run_ttest(ttest_path, pre_label, post_label);
    if (*report) return run_report(study_dir);
    if (*validate) return run_corpus_validate(corpus_file);
    if (*serve) return run_serve(serve_config, port, host, data_dir, static_dir);
  } catch (const pp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
