#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rarepat/bitops.hpp"
#include "rarepat/compat.hpp"
#include "rarepat/solver.hpp"

namespace rarepat {

enum class RewardMode : uint8_t { PerStep, EndOfEpisode };

struct EnvConfig {
  uint32_t max_steps = 0;  // 0 selects min(rare count, 256)
  RewardMode reward_mode = RewardMode::PerStep;
  bool masking = true;
  double gamma = 0.99;
  uint64_t seed = 1;
};

/// Decides joint satisfiability of whole rare-net sets. Pairwise
/// compatibility is not sufficient, so set-level rewards always go through
/// one of these.
class JointCertifier {
 public:
  virtual ~JointCertifier() = default;
  virtual bool certify(std::span<const uint32_t> members) = 0;
};

/// SAT-backed certification on a circuit.
class SatCertifier final : public JointCertifier {
 public:
  SatCertifier(const CircuitCnf& cnf, const RareNetTable& rare,
               uint64_t conflict_budget = Solver::kDefaultBudget);
  bool certify(std::span<const uint32_t> members) override;

 private:
  const RareNetTable& rare_;
  Solver solver_;
  uint64_t budget_;
};

/// Ground-truth certification for synthetic matrices where pairwise
/// compatibility is joint compatibility by construction (toy instances).
class CliqueCertifier final : public JointCertifier {
 public:
  explicit CliqueCertifier(const CompatMatrix& matrix) : matrix_(matrix) {}
  bool certify(std::span<const uint32_t> members) override;

 private:
  const CompatMatrix& matrix_;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
  bool grew = false;
};

struct TraceEvent {
  enum Kind { Step, Terminal } kind;
  uint64_t episode;
  uint32_t step;          // Step events
  uint32_t action;        // Step events
  uint32_t state_size;    // Step events
  double reward;          // Step events
  size_t mask_popcount;   // Step events
  std::vector<uint32_t> certified;  // Terminal events
};

/// One episode grows a compatible rare-net set from a random singleton.
///
/// Transitions are deterministic: a compatible action joins the state, an
/// incompatible one leaves it unchanged. With masking on, the agent only
/// ever sees actions that pass the pairwise screen. Reward is the squared
/// size of the grown state, paid per step or once at episode end.
class Env {
 public:
  Env(const CompatMatrix& matrix, JointCertifier& certifier, EnvConfig config);

  /// Starts a new episode in a uniformly random satisfiable singleton.
  /// Deterministic in (config seed, episode key); by default the key is an
  /// internal episode counter.
  void reset();
  void reset_with_key(uint64_t episode_key);

  StepResult step(uint32_t action);

  /// Mode-dependent compatibility decision for (current state, action):
  /// pairwise screen first, joint certification only where the reward mode
  /// requires it per step.
  bool action_compatible(uint32_t action);

  uint32_t rare_count() const { return matrix_.size(); }
  uint32_t max_steps() const { return config_.max_steps; }
  const EnvConfig& config() const { return config_; }
  bool done() const { return done_; }
  uint32_t steps_in_episode() const { return steps_; }
  uint64_t episode_index() const { return episode_; }

  std::span<const uint64_t> state_bits() const { return state_; }
  std::span<const uint64_t> mask_bits() const { return mask_; }
  uint32_t state_size() const { return static_cast<uint32_t>(bits::popcount(state_)); }

  /// Certified set of the last finished episode.
  const std::vector<uint32_t>& last_certified() const { return certified_; }

  struct Stats {
    uint64_t joint_certifications = 0;
    uint64_t env_steps = 0;
    uint64_t episodes_completed = 0;
  };
  const Stats& stats() const { return stats_; }

  using TraceSink = std::function<void(const TraceEvent&)>;
  void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

 private:
  bool certify_counted(std::span<const uint32_t> members);
  void refresh_mask();
  void finish_episode();

  const CompatMatrix& matrix_;
  JointCertifier& certifier_;
  EnvConfig config_;

  BitVec state_;
  BitVec mask_;
  BitVec excluded_;  // masked actions that failed joint certification
  std::vector<uint32_t> growth_order_;
  std::vector<uint32_t> certified_;
  uint32_t steps_ = 0;
  bool done_ = true;
  uint64_t episode_ = 0;
  uint64_t episode_counter_ = 0;
  Stats stats_;
  TraceSink trace_;
};

std::string trace_event_json(const TraceEvent& event);

}  // namespace rarepat
