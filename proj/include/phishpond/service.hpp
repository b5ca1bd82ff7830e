#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phishpond/error.hpp"
#include "phishpond/game.hpp"
#include "phishpond/store.hpp"
#include "phishpond/study.hpp"

namespace httplib {
class Server;
}

namespace phishpond {

using WallClock = std::chrono::system_clock;

enum class ApiErrorCode { NotFound, Finished, BadAction, BadInput, OutOfOrder };

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);
ApiErrorCode api_error_for(Errc code);

struct ServiceOptions {
  std::vector<CorpusEntry> corpus = default_corpus();
  // Sessions and studies are written below this directory when set.
  std::optional<std::filesystem::path> data_dir;
  std::function<WallClock::time_point()> clock = [] { return WallClock::now(); };
  std::chrono::seconds idle_expiry{3600};
  std::chrono::seconds play_window{900};
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Request handling for the game and study API. Every handler is safe to call
// concurrently; actions on one session are serialised by a per-session lock.
class GameService {
 public:
  explicit GameService(ServiceOptions options = {});

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse get_session(const std::string& session_id);
  ApiResponse submit_action(const std::string& session_id, const nlohmann::json& body);

  ApiResponse create_study(const nlohmann::json& body);
  ApiResponse get_study(const std::string& study_id);
  ApiResponse submit_pretest(const std::string& study_id, const std::string& participant,
                             const nlohmann::json& body);
  ApiResponse start_study_session(const std::string& study_id, const std::string& participant,
                                  const nlohmann::json& body);
  ApiResponse submit_sus(const std::string& study_id, const std::string& participant,
                         const nlohmann::json& body);
  ApiResponse submit_posttest(const std::string& study_id, const std::string& participant,
                              const nlohmann::json& body);
  ApiResponse study_report(const std::string& study_id);

  std::size_t live_sessions();

  // Installs every route on server. static_dir, when given, is served at "/".
  void register_routes(httplib::Server& server,
                       const std::optional<std::filesystem::path>& static_dir = std::nullopt);

 private:
  struct StudyLink {
    std::string study_id;
    std::string participant;
    WallClock::time_point deadline;
  };

  struct LiveSession {
    std::mutex mutex;
    std::string id;
    GameState state;
    WallClock::time_point started_at;
    WallClock::time_point last_action_at;
    std::optional<StudyLink> study;
  };

  enum class Stage { Pretested, SusDone, Done };

  struct Participant {
    Condition condition = Condition::Game;
    std::vector<Truth> pre_answers;
    std::optional<SusResponse> sus;
    std::optional<std::string> session_ref;
    WallClock::time_point play_deadline;
    Stage stage = Stage::Pretested;
  };

  struct LiveStudy {
    explicit LiveStudy(Study s) : study(std::move(s)) {}
    std::mutex mutex;
    Study study;
    std::map<std::string, Participant> participants;
  };

  ApiResponse open_session(const GameConfig& config, std::uint64_t seed,
                           std::optional<StudyLink> link);
  std::shared_ptr<LiveSession> find_session(const std::string& id);
  std::shared_ptr<LiveStudy> find_study(const std::string& id);
  nlohmann::json public_state(const LiveSession& session) const;
  void persist(const LiveSession& session);
  void expire_idle(WallClock::time_point now);
  std::string new_token();
  std::uint64_t new_seed();
  std::string timestamp(WallClock::time_point t) const;

  ServiceOptions options_;
  std::vector<WormRound> pool_;
  std::optional<SessionStore> session_store_;
  std::optional<StudyStore> study_store_;

  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
  std::map<std::string, std::shared_ptr<LiveStudy>> studies_;
  std::mt19937_64 token_rng_;
};

// Line-oriented key=value configuration for `serve`.
struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> static_dir;
};

// Throws ParseError for malformed lines or unknown keys.
ServeConfig parse_serve_config(std::string_view content);
// PHISHPOND_CORPUS, when set, replaces the corpus path.
void apply_environment(ServeConfig& config);

}  // namespace phishpond
