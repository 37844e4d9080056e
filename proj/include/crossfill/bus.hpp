#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "crossfill/candidates.hpp"
#include "crossfill/experts.hpp"

namespace crossfill {

namespace topics {
inline constexpr std::string_view kClueRequest = "clue.request";
inline constexpr std::string_view kClueResponse = "clue.response";
inline constexpr std::string_view kSolverStatus = "solver.status";

inline bool is_known(std::string_view t) { return t == kClueRequest || t == kClueResponse || t == kSolverStatus; }
}  // namespace topics

struct Envelope {
  std::string topic;
  std::string correlation;
  std::string payload;  // JSON text
  std::string sender;
  std::uint64_t timestamp = 0;  // assigned by the transport: publish sequence number
};

struct PublishAck {
  std::uint64_t sequence = 0;
  std::size_t deliveries = 0;
};

using Handler = std::function<void(const Envelope&)>;

/// Unsubscribes on destruction.
class Subscription {
 public:
  Subscription() = default;
  explicit Subscription(std::function<void()> cancel) : cancel_(std::move(cancel)) {}
  Subscription(Subscription&& o) noexcept : cancel_(std::exchange(o.cancel_, {})) {}
  Subscription& operator=(Subscription&& o) noexcept {
    if (this != &o) {
      reset();
      cancel_ = std::exchange(o.cancel_, {});
    }
    return *this;
  }
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;
  ~Subscription() { reset(); }

  void reset() {
    if (cancel_) std::exchange(cancel_, {})();
  }

 private:
  std::function<void()> cancel_;
};

/// Transport contract. An adapter for an external broker implements the same
/// two calls with the same Envelope schema.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual PublishAck publish(Envelope envelope) = 0;
  [[nodiscard]] virtual Subscription subscribe(std::string topic, Handler handler) = 0;
};

/// Synchronous in-process transport: handlers run on the publishing thread,
/// outside the bus lock, so a handler may publish in turn. With a shuffle
/// seed, every publish dispatches to subscribers in a pseudo-random order.
class InProcessBus final : public Transport {
 public:
  InProcessBus() = default;
  explicit InProcessBus(std::uint64_t shuffle_seed) : rng_(shuffle_seed), shuffle_(true) {}

  PublishAck publish(Envelope envelope) override {
    if (!topics::is_known(envelope.topic)) throw Error("unknown topic '" + envelope.topic + "'");
    std::vector<std::shared_ptr<const Handler>> targets;
    {
      std::lock_guard lock(mutex_);
      envelope.timestamp = ++sequence_;
      for (const auto& [id, sub] : subscribers_) {
        if (sub.topic == envelope.topic) targets.push_back(sub.handler);
      }
      if (shuffle_) std::shuffle(targets.begin(), targets.end(), rng_);
    }
    for (const auto& h : targets) (*h)(envelope);
    return {envelope.timestamp, targets.size()};
  }

  [[nodiscard]] Subscription subscribe(std::string topic, Handler handler) override {
    if (!topics::is_known(topic)) throw Error("unknown topic '" + topic + "'");
    std::lock_guard lock(mutex_);
    const std::uint64_t id = ++next_id_;
    subscribers_.emplace(id, Entry{std::move(topic), std::make_shared<const Handler>(std::move(handler))});
    return Subscription([this, id] {
      std::lock_guard l(mutex_);
      subscribers_.erase(id);
    });
  }

  std::size_t subscriber_count() const {
    std::lock_guard lock(mutex_);
    return subscribers_.size();
  }

 private:
  struct Entry {
    std::string topic;
    std::shared_ptr<const Handler> handler;
  };

  mutable std::mutex mutex_;
  std::map<std::uint64_t, Entry> subscribers_;  // subscription order
  std::uint64_t next_id_ = 0;
  std::uint64_t sequence_ = 0;
  std::mt19937_64 rng_;
  bool shuffle_ = false;
};

namespace payload {

using nlohmann::json;

struct ClueRequest {
  std::string correlation;
  std::string clue_text;
  int length = 0;
  std::vector<std::string> active_expert_ids;
};

struct ClueResponse {
  std::string correlation;
  std::string expert_id;
  CandidateList list;
};

struct SolverStatus {
  std::string run_id;
  std::string phase;
  double progress_fraction = 0.0;
};

inline std::string encode(const ClueRequest& r) {
  return json{{"correlation", r.correlation},
              {"clue_text", r.clue_text},
              {"length", r.length},
              {"active_expert_ids", r.active_expert_ids}}
      .dump();
}

inline std::string encode(const ClueResponse& r) {
  json cands = json::array();
  for (const auto& c : r.list) cands.push_back({{"answer", c.answer}, {"probability", c.probability}});
  return json{{"correlation", r.correlation},
              {"expert_id", r.expert_id},
              {"confidence", r.list.confidence()},
              {"candidates", std::move(cands)}}
      .dump();
}

inline std::string encode(const SolverStatus& s) {
  return json{{"run_id", s.run_id}, {"phase", s.phase}, {"progress_fraction", s.progress_fraction}}.dump();
}

inline ClueRequest decode_request(std::string_view text) {
  try {
    const auto j = json::parse(text);
    return {j.at("correlation").get<std::string>(), j.at("clue_text").get<std::string>(), j.at("length").get<int>(),
            j.at("active_expert_ids").get<std::vector<std::string>>()};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed clue.request payload: ") + e.what());
  }
}

/// The list's clue id is the clue text it answers, supplied by the caller.
inline ClueResponse decode_response(std::string_view text, const std::string& clue_id) {
  try {
    const auto j = json::parse(text);
    std::vector<Candidate> cands;
    for (const auto& c : j.at("candidates")) cands.push_back({c.at("answer").get<std::string>(), c.at("probability").get<double>()});
    const auto expert = j.at("expert_id").get<std::string>();
    return {j.at("correlation").get<std::string>(), expert,
            CandidateList(clue_id, expert, std::move(cands), j.at("confidence").get<double>())};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed clue.response payload: ") + e.what());
  }
}

inline SolverStatus decode_status(std::string_view text) {
  try {
    const auto j = json::parse(text);
    return {j.at("run_id").get<std::string>(), j.at("phase").get<std::string>(), j.at("progress_fraction").get<double>()};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed solver.status payload: ") + e.what());
  }
}

inline std::string correlation_of(std::string_view text) {
  try {
    return json::parse(text).at("correlation").get<std::string>();
  } catch (const json::exception&) {
    return {};
  }
}

}  // namespace payload

enum class AgentMode { Inline, Threaded };

/// Serves one expert on the bus: answers clue.request envelopes that list its
/// id among the active experts. Expert exceptions become an empty response.
/// Threaded agents answer from a private worker thread, in request order.
class ExpertAgent {
 public:
  ExpertAgent(Transport& bus, ExpertPtr expert, AgentMode mode = AgentMode::Inline)
      : bus_(bus), expert_(std::move(expert)), mode_(mode) {
    if (mode_ == AgentMode::Threaded) worker_ = std::thread([this] { run(); });
    sub_ = bus_.subscribe(std::string(topics::kClueRequest), [this](const Envelope& e) { on_request(e); });
  }

  ~ExpertAgent() {
    sub_.reset();
    if (worker_.joinable()) {
      {
        std::lock_guard lock(mutex_);
        stop_ = true;
      }
      cv_.notify_all();
      worker_.join();
    }
  }

  ExpertAgent(const ExpertAgent&) = delete;
  ExpertAgent& operator=(const ExpertAgent&) = delete;

  const std::string& id() const { return expert_->id(); }

 private:
  void on_request(const Envelope& e) {
    payload::ClueRequest req;
    try {
      req = payload::decode_request(e.payload);
    } catch (const Error& err) {
      spdlog::warn("agent {}: {}", id(), err.what());
      return;
    }
    const auto& ids = req.active_expert_ids;
    if (std::find(ids.begin(), ids.end(), id()) == ids.end()) return;
    if (mode_ == AgentMode::Inline) {
      answer(req);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(req));
    }
    cv_.notify_one();
  }

  void run() {
    for (;;) {
      payload::ClueRequest req;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
        if (queue_.empty()) return;
        req = std::move(queue_.front());
        queue_.pop_front();
      }
      answer(req);
    }
  }

  void answer(const payload::ClueRequest& req) {
    CandidateList list = CandidateList::empty(req.clue_text, id());
    try {
      list = expert_->generate(req.clue_text, req.length);
    } catch (const std::exception& ex) {
      spdlog::warn("expert {} failed on '{}': {}", id(), req.clue_text, ex.what());
    }
    bus_.publish({std::string(topics::kClueResponse), req.correlation,
                  payload::encode(payload::ClueResponse{req.correlation, id(), list}), id(), 0});
  }

  Transport& bus_;
  ExpertPtr expert_;
  AgentMode mode_;
  Subscription sub_;
  std::thread worker_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<payload::ClueRequest> queue_;
  bool stop_ = false;
};

struct GatherPolicy {
  std::chrono::milliseconds deadline{5000};
  std::set<std::string> required;
  std::set<std::string> optional;
};

struct GatherResult {
  std::map<std::string, CandidateList> lists;  // keyed by expert id
  std::size_t stale = 0;                        // responses for another request
  std::size_t ignored = 0;                      // unexpected sender, duplicate or malformed
};

/// Hands out correlation ids of the form `<run>:<n>`.
class CorrelationIds {
 public:
  explicit CorrelationIds(std::string run_id) : run_(std::move(run_id)) {}
  std::string next() { return run_ + ":" + std::to_string(++n_); }
  const std::string& run_id() const { return run_; }

 private:
  std::string run_;
  std::atomic<std::uint64_t> n_{0};
};

/// Publishes one clue.request and waits until every required and optional
/// expert has answered or the deadline passes. Silent optional experts get an
/// empty list; a silent required expert is an error.
inline GatherResult request_candidates(Transport& bus, CorrelationIds& ids, std::string_view clue, int length,
                                       const GatherPolicy& policy) {
  if (policy.deadline.count() <= 0) throw Error("gather deadline must be positive");
  std::set<std::string> expected = policy.required;
  expected.insert(policy.optional.begin(), policy.optional.end());

  // Shared with the handler: a threaded publisher may still be inside it
  // after the subscription is gone.
  struct State {
    std::mutex mutex;
    std::condition_variable cv;
    std::string correlation;
    std::string clue_id;
    std::set<std::string> expected;
    GatherResult result;
    bool closed = false;
  };
  auto st = std::make_shared<State>();
  st->correlation = ids.next();
  st->clue_id = std::string(clue);
  st->expected = std::move(expected);

  auto sub = bus.subscribe(std::string(topics::kClueResponse), [st](const Envelope& e) {
    std::lock_guard lock(st->mutex);
    if (st->closed) return;
    if (e.correlation != st->correlation || payload::correlation_of(e.payload) != st->correlation) {
      ++st->result.stale;
      return;
    }
    try {
      auto resp = payload::decode_response(e.payload, st->clue_id);
      if (!st->expected.count(resp.expert_id) || st->result.lists.count(resp.expert_id) || resp.expert_id != e.sender) {
        ++st->result.ignored;
        return;
      }
      st->result.lists.emplace(resp.expert_id, std::move(resp.list));
    } catch (const Error& err) {
      spdlog::warn("gather: {}", err.what());
      ++st->result.ignored;
      return;
    }
    st->cv.notify_all();
  });

  bus.publish({std::string(topics::kClueRequest), st->correlation,
               payload::encode(payload::ClueRequest{st->correlation, st->clue_id, length,
                                                    std::vector<std::string>(st->expected.begin(), st->expected.end())}),
               "solver", 0});

  GatherResult result;
  {
    std::unique_lock lock(st->mutex);
    st->cv.wait_for(lock, policy.deadline, [&] { return st->result.lists.size() == st->expected.size(); });
    st->closed = true;
    result = std::move(st->result);
  }
  sub.reset();

  for (const auto& id : policy.required) {
    if (!result.lists.count(id)) throw Error("expert timeout: " + id);
  }
  for (const auto& id : st->expected) {
    if (!result.lists.count(id)) result.lists.emplace(id, CandidateList::empty(st->clue_id, id));
  }
  return result;
}

inline void publish_status(Transport& bus, const std::string& run_id, std::string phase, double progress) {
  bus.publish({std::string(topics::kSolverStatus), run_id,
               payload::encode(payload::SolverStatus{run_id, std::move(phase), progress}), "solver", 0});
}

}  // namespace crossfill
