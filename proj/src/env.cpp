#include "rarepat/env.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "rarepat/rng.hpp"

namespace rarepat {

SatCertifier::SatCertifier(const CircuitCnf& cnf, const RareNetTable& rare,
                           uint64_t conflict_budget)
    : rare_(rare), solver_(cnf), budget_(conflict_budget) {}

bool SatCertifier::certify(std::span<const uint32_t> members) {
  const auto assumps = rare_value_assumptions(rare_.entries, members);
  const auto res = solver_.solve(assumps, budget_);
  if (res.status == SolveStatus::BudgetExceeded)
    throw ResourceError("joint certification exceeded the conflict budget");
  return res.sat();
}

bool CliqueCertifier::certify(std::span<const uint32_t> members) {
  for (size_t i = 0; i < members.size(); ++i) {
    if (!matrix_.diag(members[i])) return false;
    for (size_t j = i + 1; j < members.size(); ++j)
      if (!matrix_.pair(members[i], members[j])) return false;
  }
  return true;
}

Env::Env(const CompatMatrix& matrix, JointCertifier& certifier,
         EnvConfig config)
    : matrix_(matrix), certifier_(certifier), config_(config) {
  if (matrix_.size() == 0)
    throw ValidationError("environment needs at least one rare net");
  if (config_.max_steps == 0)
    config_.max_steps = std::min<uint32_t>(matrix_.size(), 256);
  state_ = bits::make(matrix_.size());
  mask_ = bits::make(matrix_.size());
  excluded_ = bits::make(matrix_.size());
}

bool Env::certify_counted(std::span<const uint32_t> members) {
  ++stats_.joint_certifications;
  bool sat = false;
  try {
    sat = certifier_.certify(members);
  } catch (const ResourceError&) {
    // Budget overruns degrade to "incompatible"; the episode goes on.
    sat = false;
  }
  return sat;
}

void Env::refresh_mask() {
  if (config_.masking) {
    mask_ = masked_actions(matrix_, state_);
    for (size_t w = 0; w < mask_.size(); ++w) mask_[w] &= ~excluded_[w];
  } else {
    std::fill(mask_.begin(), mask_.end(), ~uint64_t{0});
    bits::clear_tail(mask_, matrix_.size());
  }
}

void Env::reset() { reset_with_key(episode_counter_); }

void Env::reset_with_key(uint64_t episode_key) {
  const auto diag = matrix_.diag_bits();
  const size_t n_live = bits::popcount(diag);
  if (n_live == 0)
    throw ValidationError("no satisfiable rare net to start an episode from");

  Rng rng(mix_seed(config_.seed, episode_key, 0xe9150de5ull));
  const uint32_t start =
      static_cast<uint32_t>(bits::nth_set(diag, rng.below(n_live)));

  std::fill(state_.begin(), state_.end(), 0);
  std::fill(excluded_.begin(), excluded_.end(), 0);
  bits::set(state_, start);
  growth_order_.assign(1, start);
  certified_.clear();
  steps_ = 0;
  done_ = false;
  episode_ = episode_counter_++;
  refresh_mask();
  if (config_.masking && !bits::any(mask_)) finish_episode();
}

bool Env::action_compatible(uint32_t action) {
  if (action >= matrix_.size())
    throw ValidationError("action index out of range");
  if (bits::get(state_, action)) return false;
  if (!matrix_.diag(action)) return false;
  bool pairwise = true;
  bits::for_each_set(state_, [&](size_t j) {
    pairwise = pairwise && matrix_.pair(action, static_cast<uint32_t>(j));
  });
  if (!pairwise) return false;
  if (config_.reward_mode == RewardMode::EndOfEpisode)
    return true;  // joint check deferred to the terminal certification
  std::vector<uint32_t> candidate = bits::to_indices(state_);
  candidate.push_back(action);
  return certify_counted(candidate);
}

void Env::finish_episode() {
  done_ = true;
  if (config_.reward_mode == RewardMode::EndOfEpisode) {
    // Certify the grown set; on UNSAT, drop the most recently added nets
    // until a satisfiable prefix remains. The singleton prefix is
    // satisfiable by the diagonal screen.
    size_t len = growth_order_.size();
    while (len > 0) {
      std::span<const uint32_t> prefix(growth_order_.data(), len);
      if (certify_counted(prefix)) break;
      --len;
    }
    certified_.assign(growth_order_.begin(),
                      growth_order_.begin() + static_cast<long>(len));
  } else {
    // Every growth step was certified jointly, so the state is certified.
    certified_ = growth_order_;
  }
  std::sort(certified_.begin(), certified_.end());
  ++stats_.episodes_completed;
  if (trace_) {
    TraceEvent ev{};
    ev.kind = TraceEvent::Terminal;
    ev.episode = episode_;
    ev.certified = certified_;
    ev.state_size = static_cast<uint32_t>(certified_.size());
    trace_(ev);
  }
}

StepResult Env::step(uint32_t action) {
  if (done_) throw ValidationError("step() called on a finished episode");
  if (action >= matrix_.size())
    throw ValidationError("action index out of range");
  if (config_.masking && !bits::get(mask_, action))
    throw ValidationError("action is masked off in the current state");

  ++steps_;
  ++stats_.env_steps;

  StepResult result;
  const bool compatible = action_compatible(action);
  if (compatible) {
    bits::set(state_, action);
    growth_order_.push_back(action);
    result.grew = true;
  } else if (config_.masking) {
    // The action passed the pairwise screen but failed joint
    // certification; retrying it this episode cannot succeed.
    bits::set(excluded_, action);
  }
  refresh_mask();

  const bool out_of_steps = steps_ >= config_.max_steps;
  const bool mask_exhausted = config_.masking && !bits::any(mask_);
  if (out_of_steps || mask_exhausted) finish_episode();
  result.done = done_;

  if (config_.reward_mode == RewardMode::PerStep) {
    const uint32_t size = state_size();
    result.reward =
        compatible ? static_cast<double>(size) * static_cast<double>(size)
                   : 0.0;
  } else {
    if (done_) {
      const double m = static_cast<double>(certified_.size());
      result.reward = m * m;
    }
  }

  if (trace_) {
    TraceEvent ev{};
    ev.kind = TraceEvent::Step;
    ev.episode = episode_;
    ev.step = steps_;
    ev.action = action;
    ev.state_size = state_size();
    ev.reward = result.reward;
    ev.mask_popcount = bits::popcount(mask_);
    trace_(ev);
  }
  return result;
}

std::string trace_event_json(const TraceEvent& event) {
  nlohmann::json j;
  if (event.kind == TraceEvent::Step) {
    j["episode"] = event.episode;
    j["step"] = event.step;
    j["action"] = event.action;
    j["state_size"] = event.state_size;
    j["reward"] = event.reward;
    j["mask_popcount"] = event.mask_popcount;
  } else {
    j["episode"] = event.episode;
    j["certified_size"] = event.certified.size();
    j["certified_set"] = event.certified;
  }
  return j.dump();
}

}  // namespace rarepat
