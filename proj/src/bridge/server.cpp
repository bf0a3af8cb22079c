#include "mre/bridge/server.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <stdexcept>

#include "mre/core/serialize.hpp"
#include "mre/io/json.hpp"
#include "mre/session/session.hpp"

namespace mre::bridge {

using Clock = std::chrono::steady_clock;

ServerOptions options_from_env(ServerOptions base) {
  const char* bind = std::getenv("MRE_BIND");
  if (bind == nullptr || *bind == '\0') return base;
  const std::string s(bind);
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) {
    base.host = s;
    return base;
  }
  if (colon > 0) base.host = s.substr(0, colon);
  const std::string port = s.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long p = std::stoul(port, &used);
    if (used != port.size() || p > 65535) throw std::out_of_range("port");
    base.port = static_cast<std::uint16_t>(p);
  } catch (const std::exception&) {
    throw std::invalid_argument("MRE_BIND: bad port '" + port + "'");
  }
  return base;
}

/// One client: a reader thread decoding inputs, a session thread running
/// ticks, and a writer thread draining the outgoing queue.
class Connection {
 public:
  Connection(Socket socket, const ServerOptions& options, std::uint64_t id)
      : socket_(std::move(socket)), options_(options), id_(id), tick_rate_(options.tick_rate) {}

  ~Connection() { stop(); }

  void start() {
    reader_ = std::thread([this] { read_loop(); });
    session_thread_ = std::thread([this] { session_loop(); });
    writer_ = std::thread([this] { write_loop(); });
  }

  void stop() {
    close_inbox();
    close_outbox();
    socket_.shutdown();
    if (reader_.joinable()) reader_.join();
    if (session_thread_.joinable()) session_thread_.join();
    if (writer_.joinable()) writer_.join();
  }

  bool finished() const { return finished_.load(); }

 private:
  // ---- inbox ----
  void push_inbox(ClientMessage m) {
    {
      std::lock_guard lock(in_mu_);
      inbox_.push_back(std::move(m));
    }
    in_cv_.notify_all();
  }

  void close_inbox() {
    {
      std::lock_guard lock(in_mu_);
      in_closed_ = true;
    }
    in_cv_.notify_all();
  }

  /// Waits until `deadline` for messages; returns everything queued.
  std::deque<ClientMessage> take_inbox(std::optional<Clock::time_point> deadline) {
    std::unique_lock lock(in_mu_);
    auto ready = [&] { return in_closed_ || !inbox_.empty(); };
    if (deadline) {
      in_cv_.wait_until(lock, *deadline, ready);
    } else {
      in_cv_.wait(lock, ready);
    }
    return std::exchange(inbox_, {});
  }

  bool inbox_closed() {
    std::lock_guard lock(in_mu_);
    return in_closed_;
  }

  // ---- outbox ----
  void send(ServerMessage m) {
    {
      std::lock_guard lock(out_mu_);
      if (out_closed_) return;
      const bool frame = std::holds_alternative<FrameMessage>(m);
      if (frame) {
        if (frames_queued_ >= options_.frame_queue) {
          for (auto it = outbox_.begin(); it != outbox_.end(); ++it) {
            if (std::holds_alternative<FrameMessage>(*it)) {
              outbox_.erase(it);
              --frames_queued_;
              ++dropped_;
              break;
            }
          }
        }
        ++frames_queued_;
      }
      outbox_.push_back(std::move(m));
    }
    out_cv_.notify_all();
  }

  void close_outbox() {
    {
      std::lock_guard lock(out_mu_);
      out_closed_ = true;
    }
    out_cv_.notify_all();
  }

  void error(const std::string& msg) { send(ErrorMessage{msg}); }

  void read_loop() {
    MessageDecoder decoder;
    try {
      while (!inbox_closed()) {
        bool eof = false;
        const std::string bytes = socket_.receive(std::chrono::milliseconds(100), eof);
        if (eof) break;
        decoder.feed(bytes);
        while (auto item = decoder.next()) {
          if (auto* err = std::get_if<DecodeError>(&*item)) {
            error("malformed message: " + err->message);
            continue;
          }
          try {
            push_inbox(parse_client_message(std::get<json>(*item)));
          } catch (const ProtocolError& e) {
            error(std::string("invalid message: ") + e.what());
          }
        }
      }
    } catch (const std::exception& e) {
      std::clog << "bridge: connection " << id_ << " read failed: " << e.what() << "\n";
    }
    close_inbox();
  }

  void write_loop() {
    for (;;) {
      ServerMessage m;
      {
        std::unique_lock lock(out_mu_);
        out_cv_.wait(lock, [&] { return out_closed_ || !outbox_.empty(); });
        if (outbox_.empty()) break;
        m = std::move(outbox_.front());
        outbox_.pop_front();
        if (std::holds_alternative<FrameMessage>(m)) --frames_queued_;
      }
      try {
        socket_.send_all(encode_message(to_json(m)));
      } catch (const std::exception&) {
        break;
      }
    }
    close_inbox();
    socket_.shutdown();
    finished_ = true;
  }

  // ---- session ----
  void session_loop() {
    try {
      if (join()) run();
    } catch (const std::exception& e) {
      error(std::string("session failed: ") + e.what());
    }
    {
      std::lock_guard lock(out_mu_);
      if (dropped_ > 0) {
        std::clog << "bridge: connection " << id_ << " dropped " << dropped_ << " frames\n";
      }
    }
    close_outbox();
  }

  bool join() {
    while (true) {
      auto batch = take_inbox(std::nullopt);
      if (batch.empty() && inbox_closed()) return false;
      while (!batch.empty()) {
        ClientMessage m = std::move(batch.front());
        batch.pop_front();
        const auto* j = std::get_if<JoinMessage>(&m);
        if (j == nullptr) {
          error("join first");
          continue;
        }
        if (j->protocol_version < 1 || j->protocol_version > kProtocolVersion) {
          error("unsupported protocol version " + std::to_string(j->protocol_version));
          continue;
        }
        try {
          session::SessionConfig cfg = j->session_config(tick_rate_);
          cfg.validate();
          session_ = std::make_unique<session::Session>(std::move(cfg));
        } catch (const std::exception& e) {
          error(std::string("invalid join: ") + e.what());
          continue;
        }
        pace_ = j->pace;
        HelloMessage hello;
        hello.env = io::to_json(session_->env().spec());
        hello.tick_rate = tick_rate_;
        hello.pace = pace_;
        hello.session_seed = session_->config().seed;
        send(hello);
        // Inputs that arrived alongside the join are handled by run().
        std::lock_guard lock(in_mu_);
        for (auto it = batch.rbegin(); it != batch.rend(); ++it) inbox_.push_front(std::move(*it));
        return true;
      }
    }
  }

  void run() {
    auto next = Clock::now();
    while (true) {
      std::optional<Clock::time_point> deadline;
      if (pace_ == Pace::Realtime) {
        next += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / tick_rate_));
        deadline = next;
      }
      std::uint64_t steps = 0;
      // Realtime: gather inputs until the tick deadline.
      while (true) {
        auto batch = take_inbox(deadline);
        for (ClientMessage& m : batch) steps += apply(m);
        if (inbox_closed()) return;
        if (pace_ == Pace::Lockstep) break;
        if (Clock::now() >= *deadline) break;
      }
      if (pace_ == Pace::Realtime) {
        step_once();
        const auto now = Clock::now();
        if (now - next > std::chrono::seconds(1)) next = now;  // fell far behind
      } else {
        (void)steps;
      }
    }
  }

  /// Applies one input. In lockstep, steps and syncs run immediately so
  /// replies stay ordered with the ticks they follow.
  std::uint64_t apply(const ClientMessage& m) {
    const auto* in = std::get_if<InputMessage>(&m);
    if (in == nullptr) {
      error("already joined");
      return 0;
    }
    using K = InputMessage::Kind;
    switch (in->kind) {
      case K::TakeoverOn: session_->takeover(true); break;
      case K::TakeoverOff: session_->takeover(false); break;
      case K::Key: session_->press(in->action); break;
      case K::Reset: session_->request_reset(); break;
      case K::SaveModel: save_model(); break;
      case K::SetConfig: return set_config(in->config), 0;
      case K::Step:
        if (pace_ != Pace::Lockstep) {
          error("step is only valid with lockstep pace");
          break;
        }
        for (std::uint64_t i = 0; i < in->count; ++i) step_once();
        return in->count;
      case K::Sync: send(SyncMessage{session_->episode_index(), ticks_}); break;
    }
    return 0;
  }

  void set_config(const ConfigPatch& p) {
    if (p.min_match_level) {
      const int lvl = *p.min_match_level;
      if (lvl < 0 || lvl > session_->config().max_level) {
        error("min_match_level out of range");
        return;
      }
      session_->set_min_match_level(lvl);
    }
    if (p.ingest_on_release) session_->set_ingest_on_release(*p.ingest_on_release);
    if (p.tick_rate) {
      if (!(*p.tick_rate > 0.0) || *p.tick_rate > 1000.0) {
        error("tick_rate must be in (0, 1000]");
        return;
      }
      tick_rate_ = *p.tick_rate;
    }
  }

  void save_model() {
    const auto path = options_.model_dir /
                      ("session-" + std::to_string(id_) + "-" + std::to_string(saves_++) + ".mrme");
    try {
      save_stack(session_->stack(), path);
      send(SavedMessage{path.string()});
    } catch (const std::exception& e) {
      error(std::string("save failed: ") + e.what());
    }
  }

  void step_once() {
    const std::uint64_t ignored = session_->ignored_keys();
    const session::TickReport rep = session_->tick();
    ++ticks_;
    if (session_->ignored_keys() > ignored) {
      std::clog << "bridge: connection " << id_ << " ignored key at episode " << rep.episode
                << " tick " << rep.tick << "\n";
    }
    if (rep.episode != frame_episode_) {
      frame_episode_ = rep.episode;
      reward_ = 0.0;
      provenance_.reset();
    }
    reward_ += rep.reward;
    if (rep.provenance) provenance_ = rep.provenance;

    FrameMessage f;
    f.episode = rep.episode;
    f.tick = rep.tick;
    f.owner = rep.owner;
    f.render = session_->env().render();
    f.obs = session_->env().observation();
    f.reward = rep.metrics ? rep.metrics->reward : reward_;
    if (rep.metrics) {
      f.competence = rep.metrics->competence;
    } else if (!session_->tick_competence().empty()) {
      f.competence = session_->tick_competence().back();
    }
    f.provenance = provenance_;
    f.demonstrations = session_->stack().size();
    f.done = rep.done;
    send(std::move(f));
    if (rep.metrics) send(EpisodeEndMessage{*rep.metrics});
  }

  Socket socket_;
  const ServerOptions& options_;
  const std::uint64_t id_;
  double tick_rate_;
  Pace pace_ = Pace::Realtime;
  std::unique_ptr<session::Session> session_;
  std::uint64_t ticks_ = 0;
  std::uint64_t saves_ = 0;
  std::uint64_t frame_episode_ = ~0ULL;
  double reward_ = 0.0;
  std::optional<Provenance> provenance_;

  std::mutex in_mu_;
  std::condition_variable in_cv_;
  std::deque<ClientMessage> inbox_;
  bool in_closed_ = false;

  std::mutex out_mu_;
  std::condition_variable out_cv_;
  std::deque<ServerMessage> outbox_;
  std::size_t frames_queued_ = 0;
  std::uint64_t dropped_ = 0;
  bool out_closed_ = false;

  std::atomic<bool> finished_{false};
  std::thread reader_, session_thread_, writer_;
};

BridgeServer::BridgeServer(ServerOptions options) : options_(std::move(options)) {
  if (!(options_.tick_rate > 0.0)) throw std::invalid_argument("tick_rate must be positive");
  if (options_.frame_queue == 0) throw std::invalid_argument("frame_queue must be positive");
}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  if (running_) return;
  listener_ = listen_tcp(options_.host, options_.port);
  port_ = local_port(listener_);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void BridgeServer::stop() {
  if (!running_.exchange(false)) return;
  listener_.shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  std::lock_guard lock(mutex_);
  for (auto& c : connections_) c->stop();
  connections_.clear();
}

void BridgeServer::accept_loop() {
  std::uint64_t next_id = 0;
  while (running_) {
    bool eof = false;
    Socket client = accept_tcp(listener_, std::chrono::milliseconds(100), eof);
    if (eof) break;
    std::lock_guard lock(mutex_);
    connections_.remove_if([](const std::unique_ptr<Connection>& c) {
      if (!c->finished()) return false;
      c->stop();
      return true;
    });
    if (!client.valid()) continue;
    auto conn = std::make_unique<Connection>(std::move(client), options_, next_id++);
    conn->start();
    connections_.push_back(std::move(conn));
    ++served_;
  }
}

}  // namespace mre::bridge
