#include "phishpond/service.hpp"

#include <ctime>

#include "phishpond/text.hpp"

// After the project headers: resolv.h defines a `_res` macro that Eigen trips on.
#include <httplib.h>

namespace phishpond {

using nlohmann::json;

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::NotFound: return "NotFound";
    case ApiErrorCode::Finished: return "Finished";
    case ApiErrorCode::BadAction: return "BadAction";
    case ApiErrorCode::BadInput: return "BadInput";
    case ApiErrorCode::OutOfOrder: return "OutOfOrder";
  }
  return "BadInput";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::NotFound: return 404;
    case ApiErrorCode::Finished:
    case ApiErrorCode::OutOfOrder: return 409;
    case ApiErrorCode::BadAction:
    case ApiErrorCode::BadInput: return 400;
  }
  return 400;
}

ApiErrorCode api_error_for(Errc code) {
  switch (code) {
    case Errc::NotFound:
    case Errc::UnknownSession: return ApiErrorCode::NotFound;
    case Errc::SessionFinished: return ApiErrorCode::Finished;
    case Errc::BadAction: return ApiErrorCode::BadAction;
    case Errc::OutOfOrder: return ApiErrorCode::OutOfOrder;
    default: return ApiErrorCode::BadInput;
  }
}

namespace {

ApiResponse error_response(ApiErrorCode code, const std::string& message) {
  return {http_status(code), {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}}};
}

ApiResponse error_response(const Error& e) { return error_response(api_error_for(e.code()), e.what()); }

// Runs a handler body, turning library and JSON errors into API errors.
template <typename F>
ApiResponse guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return error_response(ApiErrorCode::BadInput, e.what());
  }
}

json summary_json(const SessionSummary& s) {
  return {{"score", s.score},
          {"mistakes", s.mistakes},
          {"helps_used", s.helps_used},
          {"elapsed", s.elapsed},
          {"status", std::string(to_string(s.status))}};
}

GameConfig config_from_overrides(const json& body) {
  GameConfig config;
  for (const auto& [key, value] : body.items()) {
    if (key == "seed") continue;
    if (key == "advance_on_error") {
      if (!value.is_boolean()) throw Error(Errc::InvalidConfig, "advance_on_error must be boolean");
      config.advance_on_error = value.get<bool>();
      continue;
    }
    int* field = nullptr;
    if (key == "lives_start") field = &config.lives_start;
    else if (key == "time_start") field = &config.time_start;
    else if (key == "help_cost") field = &config.help_cost;
    else if (key == "rounds_total") field = &config.rounds_total;
    else if (key == "legit_count") field = &config.legit_count;
    else if (key == "phish_count") field = &config.phish_count;
    else if (key == "points_per_correct") field = &config.points_per_correct;
    if (!field) throw Error(Errc::InvalidConfig, "unknown field '" + key + "'");
    if (!value.is_number_integer()) throw Error(Errc::InvalidConfig, key + " must be an integer");
    *field = value.get<int>();
  }
  config.validate();
  return config;
}

std::optional<std::uint64_t> seed_from(const json& body) {
  if (!body.contains("seed") || body.at("seed").is_null()) return std::nullopt;
  const auto& seed = body.at("seed");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
    throw Error(Errc::InvalidConfig, "seed must be a non-negative integer");
  return body.at("seed").get<std::uint64_t>();
}

std::vector<Truth> answers_from(const json& body, std::size_t expected) {
  if (!body.contains("answers") || !body.at("answers").is_array())
    throw Error(Errc::InvalidData, "answers must be an array");
  std::vector<Truth> answers;
  for (const auto& a : body.at("answers")) {
    if (!a.is_string()) throw Error(Errc::InvalidData, "answers must be \"Legit\" or \"Phish\"");
    answers.push_back(truth_from_string(a.get<std::string>()));
  }
  if (answers.size() != expected)
    throw Error(Errc::LengthMismatch, "expected " + std::to_string(expected) + " answers");
  return answers;
}

json test_urls(const TestKey& key) {
  json urls = json::array();
  for (const auto& item : key.items()) urls.push_back(item.url);
  return urls;
}

json descriptives_json(const Descriptives& d) {
  return {{"mean", d.mean}, {"n", d.n}, {"sd", d.sd}, {"se", d.se}};
}

json ttest_json(const std::optional<TTestResult>& t) {
  if (!t) return nullptr;
  return {{"mean_diff", t->mean_diff}, {"sd_diff", t->sd_diff},
          {"se_diff", t->se_diff},     {"t", t->t},
          {"df", t->df},               {"ci95", {t->ci95.first, t->ci95.second}},
          {"p_two_tailed", t->p_two_tailed}};
}

json report_json(const StudyReport& report) {
  json conditions = json::array();
  for (const auto& c : report.conditions) {
    json participants = json::array();
    for (std::size_t i = 0; i < c.participant_ids.size(); ++i)
      participants.push_back({{"participant", c.participant_ids[i]},
                              {"pre", c.pre_scores[i]},
                              {"post", c.post_scores[i]},
                              {"delta", c.deltas[i]}});
    conditions.push_back({{"condition", std::string(to_string(c.condition))},
                          {"pre", descriptives_json(c.paired.pre)},
                          {"post", descriptives_json(c.paired.post)},
                          {"improvement", c.improvement},
                          {"t_test", ttest_json(c.paired.test)},
                          {"participants", participants},
                          {"false_positives_pre", c.false_positives_pre},
                          {"false_negatives_pre", c.false_negatives_pre},
                          {"false_positives_post", c.false_positives_post},
                          {"false_negatives_post", c.false_negatives_post}});
  }
  return {{"conditions", conditions}, {"text", render_study_report(report)}};
}

}  // namespace

GameService::GameService(ServiceOptions options)
    : options_(std::move(options)), pool_(to_rounds(options_.corpus)),
      token_rng_(std::random_device{}()) {
  if (options_.data_dir) {
    session_store_.emplace(*options_.data_dir);
    study_store_.emplace(*options_.data_dir / "studies");
  }
}

std::string GameService::new_token() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::lock_guard lock(registry_mutex_);
  std::string token;
  for (int i = 0; i < 2; ++i) {
    auto v = token_rng_();
    for (int j = 0; j < 16; ++j, v >>= 4) token += kHex[v & 0xF];
  }
  return token;
}

std::uint64_t GameService::new_seed() {
  std::lock_guard lock(registry_mutex_);
  // Kept below 2^53 so browser clients read it exactly.
  return token_rng_() >> 11;
}

std::string GameService::timestamp(WallClock::time_point t) const {
  const std::time_t secs = WallClock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void GameService::expire_idle(WallClock::time_point now) {
  std::lock_guard lock(registry_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_action_at > options_.idle_expiry) {
      session_lock.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::size_t GameService::live_sessions() {
  expire_idle(options_.clock());
  std::lock_guard lock(registry_mutex_);
  return sessions_.size();
}

std::shared_ptr<GameService::LiveSession> GameService::find_session(const std::string& id) {
  expire_idle(options_.clock());
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::NotFound, "no session '" + id + "'");
  return it->second;
}

json GameService::public_state(const LiveSession& session) const {
  const auto& s = session.state;
  json round = nullptr;
  if (s.status == GameStatus::InProgress) {
    if (const auto* r = s.current_round())
      round = {{"number", s.round_index + 1}, {"total", s.config.rounds_total}, {"url", r->url}};
  }
  return {{"session_id", session.id},
          {"seed", s.seed},
          {"score", s.score},
          {"lives", s.lives},
          {"time_remaining", s.time_remaining},
          {"status", std::string(to_string(s.status))},
          {"status_message", std::string(status_message(s.status))},
          {"round", round},
          {"lives_start", s.config.lives_start},
          {"time_start", s.config.time_start},
          {"help_cost", s.config.help_cost},
          {"rounds_total", s.config.rounds_total},
          {"summary", summary_json(summarize(s))}};
}

void GameService::persist(const LiveSession& session) {
  if (session_store_) session_store_->persist(session.id, session.state);
}

ApiResponse GameService::open_session(const GameConfig& config, std::uint64_t seed,
                                      std::optional<StudyLink> link) {
  auto session = std::make_shared<LiveSession>();
  session->id = new_token();
  session->state = new_session(config, pool_, seed);
  session->started_at = session->last_action_at = options_.clock();
  session->study = std::move(link);
  persist(*session);
  json body = {{"session_id", session->id}, {"seed", seed}, {"state", public_state(*session)}};
  {
    std::lock_guard lock(registry_mutex_);
    sessions_[session->id] = session;
  }
  return {200, body};
}

ApiResponse GameService::create_session(const json& body) {
  return guarded([&] {
    const json& overrides = body.is_null() ? json::object() : body;
    if (!overrides.is_object()) throw Error(Errc::InvalidConfig, "body must be a JSON object");
    const auto config = config_from_overrides(overrides);
    const auto seed = seed_from(overrides).value_or(new_seed());
    return open_session(config, seed, std::nullopt);
  });
}

ApiResponse GameService::get_session(const std::string& session_id) {
  return guarded([&] {
    auto session = find_session(session_id);
    std::lock_guard lock(session->mutex);
    return ApiResponse{200, public_state(*session)};
  });
}

ApiResponse GameService::submit_action(const std::string& session_id, const json& body) {
  return guarded([&]() -> ApiResponse {
    auto session = find_session(session_id);
    std::lock_guard lock(session->mutex);

    if (!body.is_object() || !body.contains("action") || !body.at("action").is_string())
      throw Error(Errc::BadAction, "body needs an \"action\" string");
    PlayerAction action{action_kind_from_string(body.at("action").get<std::string>()), 0};
    if (action.kind == PlayerAction::Kind::Tick) {
      if (!body.contains("seconds") || !body.at("seconds").is_number_integer())
        throw Error(Errc::BadAction, "tick needs integer \"seconds\"");
      action.seconds = body.at("seconds").get<int>();
      if (action.seconds < 1) throw Error(Errc::BadAction, "tick seconds must be >= 1");
    }

    auto finished = [&](const std::string& message) {
      auto r = error_response(ApiErrorCode::Finished, message);
      r.body["state"] = public_state(*session);
      return r;
    };
    if (session->state.status != GameStatus::InProgress) return finished("session is finished");

    const auto now = options_.clock();
    if (session->study && now > session->study->deadline) return finished("play window closed");

    // Whole elapsed seconds become a Tick; the fractional remainder carries over.
    if (now > session->last_action_at) {
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::seconds>(now - session->last_action_at);
      if (elapsed.count() >= 1) {
        const auto seconds = static_cast<int>(
            std::min<std::int64_t>(elapsed.count(), session->state.time_remaining + 1));
        session->state = apply_action(session->state, PlayerAction::tick(seconds)).first;
        session->last_action_at += elapsed;
        if (session->state.status != GameStatus::InProgress) {
          persist(*session);
          return finished(std::string(status_message(session->state.status)));
        }
      }
    }

    auto [next, outcome] = apply_action(session->state, action);
    session->state = std::move(next);
    persist(*session);

    json out_json = {{"kind", std::string(to_string(outcome.kind))},
                     {"feedback", outcome.feedback},
                     {"status", std::string(to_string(outcome.status))}};
    if (outcome.tip) out_json["tip"] = *outcome.tip;
    json response = {{"outcome", out_json}, {"state", public_state(*session)}};
    if (outcome.resolved)
      response["resolved"] = {{"url", outcome.resolved->url},
                              {"truth", std::string(to_string(outcome.resolved->truth))}};
    return {200, response};
  });
}

// --- studies ----------------------------------------------------------------

std::shared_ptr<GameService::LiveStudy> GameService::find_study(const std::string& id) {
  std::lock_guard lock(registry_mutex_);
  if (auto it = studies_.find(id); it != studies_.end()) return it->second;
  if (study_store_ && study_store_->exists(id)) {
    auto live = std::make_shared<LiveStudy>(study_store_->load(id));
    for (const auto& r : live->study.records) {
      Participant p;
      p.condition = r.condition;
      p.stage = Stage::Done;
      live->participants[r.participant_id] = p;
    }
    studies_[id] = live;
    return live;
  }
  throw Error(Errc::NotFound, "no study '" + id + "'");
}

ApiResponse GameService::create_study(const json& body) {
  return guarded([&] {
    const json& b = body.is_null() ? json::object() : body;
    if (!b.is_object()) throw Error(Errc::InvalidData, "body must be a JSON object");
    auto read_key = [&](const char* name, const TestKey& fallback) {
      if (!b.contains(name)) return fallback;
      std::vector<TestItem> items;
      for (const auto& item : b.at(name))
        items.push_back({item.at("url").get<std::string>(),
                         truth_from_string(item.at("truth").get<std::string>())});
      return TestKey(std::move(items));
    };
    auto live = std::make_shared<LiveStudy>(Study{b.contains("id") ? b.at("id").get<std::string>() : new_token(),
                        read_key("pretest_key", TestKey::default_pretest()),
                        read_key("posttest_key", TestKey::default_posttest()),
                        timestamp(options_.clock()),
                        {}});
    const auto& id = live->study.id;
    {
      std::lock_guard lock(registry_mutex_);
      if (studies_.count(id) || (study_store_ && study_store_->exists(id)))
        throw Error(Errc::DuplicateId, "study '" + id + "' exists");
      if (study_store_)
        study_store_->create(id, live->study.pretest, live->study.posttest, live->study.created_at);
      studies_[id] = live;
    }
    return ApiResponse{200,
                       {{"study_id", id},
                        {"pretest", test_urls(live->study.pretest)},
                        {"posttest", test_urls(live->study.posttest)}}};
  });
}

ApiResponse GameService::get_study(const std::string& study_id) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    return ApiResponse{200,
                       {{"study_id", live->study.id},
                        {"pretest", test_urls(live->study.pretest)},
                        {"posttest", test_urls(live->study.posttest)},
                        {"completed", live->study.records.size()}}};
  });
}

ApiResponse GameService::submit_pretest(const std::string& study_id,
                                        const std::string& participant, const json& body) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    if (live->participants.count(participant))
      throw Error(Errc::OutOfOrder, "pretest already submitted for '" + participant + "'");
    if (!body.is_object() || !body.contains("condition"))
      throw Error(Errc::InvalidData, "body needs \"condition\" and \"answers\"");
    Participant p;
    p.condition = condition_from_string(body.at("condition").get<std::string>());
    p.pre_answers = answers_from(body, live->study.pretest.items().size());
    p.play_deadline = options_.clock() + options_.play_window;
    const auto score = score_test(p.pre_answers, live->study.pretest);
    live->participants[participant] = p;
    return ApiResponse{200,
                       {{"participant", participant},
                        {"condition", std::string(to_string(p.condition))},
                        {"score", score},
                        {"next", p.condition == Condition::Game ? "game" : "reading"},
                        {"play_window_seconds", options_.play_window.count()},
                        {"play_deadline", timestamp(p.play_deadline)}}};
  });
}

ApiResponse GameService::start_study_session(const std::string& study_id,
                                             const std::string& participant, const json& body) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    auto it = live->participants.find(participant);
    if (it == live->participants.end())
      throw Error(Errc::OutOfOrder, "pretest comes before the game");
    auto& p = it->second;
    if (p.condition != Condition::Game || p.stage != Stage::Pretested || p.session_ref)
      throw Error(Errc::OutOfOrder, "game session not available at this stage");
    if (options_.clock() > p.play_deadline)
      throw Error(Errc::SessionFinished, "play window closed");
    const json& b = body.is_null() ? json::object() : body;
    const auto seed = seed_from(b).value_or(new_seed());
    auto response = open_session(GameConfig{}, seed,
                                 StudyLink{study_id, participant, p.play_deadline});
    if (response.status == 200) p.session_ref = response.body.at("session_id").get<std::string>();
    return response;
  });
}

ApiResponse GameService::submit_sus(const std::string& study_id, const std::string& participant,
                                    const json& body) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    auto it = live->participants.find(participant);
    if (it == live->participants.end()) throw Error(Errc::OutOfOrder, "pretest comes first");
    auto& p = it->second;
    if (p.condition != Condition::Game)
      throw Error(Errc::OutOfOrder, "SUS is only collected in the Game condition");
    if (p.stage != Stage::Pretested) throw Error(Errc::OutOfOrder, "SUS already submitted");
    if (!body.is_object() || !body.contains("items"))
      throw Error(Errc::InvalidData, "body needs \"items\"");
    p.sus = SusResponse(body.at("items").get<std::vector<int>>());
    p.stage = Stage::SusDone;
    return ApiResponse{200, {{"participant", participant}, {"sus_score", sus_score(*p.sus)}}};
  });
}

ApiResponse GameService::submit_posttest(const std::string& study_id,
                                         const std::string& participant, const json& body) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    auto it = live->participants.find(participant);
    if (it == live->participants.end()) throw Error(Errc::OutOfOrder, "pretest comes first");
    auto& p = it->second;
    const auto required = p.condition == Condition::Game ? Stage::SusDone : Stage::Pretested;
    if (p.stage != required)
      throw Error(Errc::OutOfOrder, p.stage == Stage::Done ? "posttest already submitted"
                                                           : "SUS comes before the posttest");
    StudyRecord record;
    record.participant_id = participant;
    record.condition = p.condition;
    record.pre_answers = p.pre_answers;
    record.post_answers = answers_from(body, live->study.posttest.items().size());
    record.sus = p.sus;
    record.session_ref = p.session_ref;
    record.created_at = timestamp(options_.clock());
    if (study_store_) study_store_->append_record(study_id, record);
    live->study.records.push_back(record);
    p.stage = Stage::Done;
    return ApiResponse{200,
                       {{"participant", participant},
                        {"score", score_test(record.post_answers, live->study.posttest)},
                        {"record", json::parse(record_to_json_line(record))}}};
  });
}

ApiResponse GameService::study_report(const std::string& study_id) {
  return guarded([&] {
    auto live = find_study(study_id);
    std::lock_guard lock(live->mutex);
    auto report = group_report(live->study.records, live->study.pretest, live->study.posttest);
    return ApiResponse{200, report_json(report)};
  });
}

// --- HTTP wiring ------------------------------------------------------------

void GameService::register_routes(httplib::Server& server,
                                  const std::optional<std::filesystem::path>& static_dir) {
  auto send = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto with_body = [send](httplib::Response& res, const std::string& raw, auto&& handler) {
    json body = json::object();
    if (!text::trim(raw).empty()) {
      body = json::parse(raw, nullptr, false);
      if (body.is_discarded())
        return send(res, error_response(ApiErrorCode::BadInput, "body is not valid JSON"));
    }
    send(res, handler(body));
  };

  server.Post("/sessions", [this, with_body](const httplib::Request& req, httplib::Response& res) {
    with_body(res, req.body, [&](const json& b) { return create_session(b); });
  });
  server.Get(R"(/sessions/([A-Za-z0-9_-]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, get_session(req.matches[1]));
             });
  server.Post(R"(/sessions/([A-Za-z0-9_-]+)/actions)",
              [this, with_body](const httplib::Request& req, httplib::Response& res) {
                with_body(res, req.body,
                          [&](const json& b) { return submit_action(req.matches[1], b); });
              });
  server.Post("/studies", [this, with_body](const httplib::Request& req, httplib::Response& res) {
    with_body(res, req.body, [&](const json& b) { return create_study(b); });
  });
  server.Get(R"(/studies/([A-Za-z0-9_-]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, get_study(req.matches[1]));
             });
  server.Get(R"(/studies/([A-Za-z0-9_-]+)/report)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, study_report(req.matches[1]));
             });
  server.Post(R"(/studies/([A-Za-z0-9_-]+)/participants/([A-Za-z0-9_-]+)/(pretest|sus|posttest|session))",
              [this, with_body](const httplib::Request& req, httplib::Response& res) {
                const std::string study = req.matches[1];
                const std::string pid = req.matches[2];
                const std::string stage = req.matches[3];
                with_body(res, req.body, [&](const json& b) {
                  if (stage == "pretest") return submit_pretest(study, pid, b);
                  if (stage == "sus") return submit_sus(study, pid, b);
                  if (stage == "session") return start_study_session(study, pid, b);
                  return submit_posttest(study, pid, b);
                });
              });
  if (static_dir) server.set_mount_point("/", static_dir->string());
}

// --- serve configuration ----------------------------------------------------

ServeConfig parse_serve_config(std::string_view content) {
  ServeConfig config;
  for (const auto& [line, value] : text::content_lines(content)) {
    auto eq = value.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "expected key=value", line);
    const auto key = std::string(text::trim(std::string_view(value).substr(0, eq)));
    const auto val = std::string(text::trim(std::string_view(value).substr(eq + 1)));
    if (key == "host") {
      config.host = val;
    } else if (key == "port") {
      if (!text::is_digits(val) || val.size() > 5 || std::stoi(val) > 65535)
        throw Error(Errc::ParseError, "bad port '" + val + "'", line);
      config.port = std::stoi(val);
    } else if (key == "corpus") {
      config.corpus = val;
    } else if (key == "data_dir") {
      config.data_dir = val;
    } else if (key == "static_dir") {
      config.static_dir = val;
    } else {
      throw Error(Errc::ParseError, "unknown key '" + key + "'", line);
    }
  }
  return config;
}

void apply_environment(ServeConfig& config) {
  if (const char* corpus = std::getenv("PHISHPOND_CORPUS"); corpus && *corpus)
    config.corpus = corpus;
}

}  // namespace phishpond
