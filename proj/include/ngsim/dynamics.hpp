#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngsim/errors.hpp"
#include "ngsim/random.hpp"
#include "ngsim/topology.hpp"

namespace ngsim {

/// Opaque word token. Tokens are handed out by SimState::invent_word in
/// increasing order, so two inventions in one run never collide.
struct Word {
  std::uint32_t token = 0;

  friend auto operator<=>(const Word&, const Word&) = default;
};

/// A node's list of synonyms, in insertion order, without duplicates.
using Vocabulary = std::vector<Word>;

enum class InteractionMode { broadcast, pairwise };

const char* to_string(InteractionMode m);
InteractionMode parse_mode(const std::string& s);

struct StepOutcome {
  NodeId speaker = 0;
  Word transmitted;
  std::uint32_t listener_count = 0;
  std::uint32_t success_count = 0;
  bool invented = false;
};

/// Vocabularies of all nodes plus the event clock.
///
/// Keeps per-word holder counts so that the total word count N_w, the
/// number of distinct words N_d and the consensus test are O(1).
class SimState {
 public:
  explicit SimState(std::size_t n);

  std::size_t node_count() const noexcept { return vocab_.size(); }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t inventions() const noexcept { return word_holders_.size(); }
  /// One time unit is n speaker events.
  double time() const noexcept { return static_cast<double>(steps_) / static_cast<double>(vocab_.size()); }

  std::uint64_t total_words() const noexcept { return total_words_; }
  std::uint64_t distinct_words() const noexcept { return distinct_words_; }
  bool is_consensus() const noexcept {
    return distinct_words_ == 1 && total_words_ == vocab_.size();
  }

  const Vocabulary& vocabulary(NodeId u) const noexcept { return vocab_[u]; }
  bool holds(NodeId u, Word w) const noexcept;
  /// Number of nodes currently holding w.
  std::uint32_t holders(Word w) const noexcept { return word_holders_[w.token]; }

  /// Creates a fresh word; it is not yet held by anyone.
  Word invent_word();

  /// Appends w to u's list if absent. Returns true if u already held it.
  bool hear(NodeId u, Word w);
  /// Reduces u's list to exactly {w}.
  void collapse(NodeId u, Word w);
  /// Replaces u's list. Every word must come from invent_word() and the
  /// list must be duplicate-free; violations throw ParameterError.
  void set_vocabulary(NodeId u, std::span<const Word> words);

  void advance_clock() noexcept { ++steps_; }

 private:
  void add_holder(Word w);
  void drop_holder(Word w);

  std::vector<Vocabulary> vocab_;
  std::vector<std::uint32_t> word_holders_;
  std::uint64_t steps_ = 0;
  std::uint64_t total_words_ = 0;
  std::uint64_t distinct_words_ = 0;
};

/// Word chosen uniformly from the speaker's list, inventing one if empty.
Word pick_word(SimState& state, NodeId speaker, Rng& rng, bool& invented);

/// One speaker event with a given speaker. Advances the clock by one.
StepOutcome apply_event(SimState& state, const Graph& g, InteractionMode mode, NodeId speaker, Rng& rng);

/// One speaker event with the speaker drawn uniformly from all nodes.
StepOutcome step(SimState& state, const Graph& g, InteractionMode mode, Rng& rng);

struct RunResult {
  bool converged = false;
  std::optional<double> t_c;
  SimState final_state{1};
};

/// Steps from an empty start until consensus or until max_time*n events.
/// `observer(const SimState&, const StepOutcome&)` sees every event after it
/// has been applied.
template <class Observer>
RunResult run(const Graph& g, InteractionMode mode, Rng& rng, Observer&& observer, double max_time) {
  if (g.node_count() == 0) throw ParameterError("run: empty graph");
  if (!(max_time > 0.0)) throw ParameterError("run: max_time must be positive");
  SimState state(g.node_count());
  const auto max_steps =
      static_cast<std::uint64_t>(std::ceil(max_time * static_cast<double>(g.node_count())));
  while (state.steps() < max_steps) {
    const StepOutcome outcome = step(state, g, mode, rng);
    observer(static_cast<const SimState&>(state), outcome);
    if (state.is_consensus()) {
      const double tc = state.time();
      return {true, tc, std::move(state)};
    }
  }
  return {false, std::nullopt, std::move(state)};
}

inline RunResult run(const Graph& g, InteractionMode mode, Rng& rng, double max_time) {
  return run(g, mode, rng, [](const SimState&, const StepOutcome&) {}, max_time);
}

}  // namespace ngsim
