#include "ngsim/dynamics.hpp"

#include <algorithm>

namespace ngsim {

const char* to_string(InteractionMode m) {
  return m == InteractionMode::broadcast ? "broadcast" : "pairwise";
}

InteractionMode parse_mode(const std::string& s) {
  if (s == "broadcast") return InteractionMode::broadcast;
  if (s == "pairwise") return InteractionMode::pairwise;
  throw ParameterError("unknown interaction mode '" + s + "'");
}

SimState::SimState(std::size_t n) : vocab_(n) {
  if (n == 0) throw ParameterError("SimState needs at least one node");
}

bool SimState::holds(NodeId u, Word w) const noexcept {
  const auto& v = vocab_[u];
  return std::find(v.begin(), v.end(), w) != v.end();
}

Word SimState::invent_word() {
  word_holders_.push_back(0);
  return Word{static_cast<std::uint32_t>(word_holders_.size() - 1)};
}

void SimState::add_holder(Word w) {
  if (word_holders_[w.token]++ == 0) ++distinct_words_;
  ++total_words_;
}

void SimState::drop_holder(Word w) {
  if (--word_holders_[w.token] == 0) --distinct_words_;
  --total_words_;
}

bool SimState::hear(NodeId u, Word w) {
  if (holds(u, w)) return true;
  vocab_[u].push_back(w);
  add_holder(w);
  return false;
}

void SimState::collapse(NodeId u, Word w) {
  auto& v = vocab_[u];
  bool had = false;
  for (Word x : v) {
    if (x == w) had = true;
    else drop_holder(x);
  }
  if (!had) add_holder(w);
  v.assign(1, w);
}

void SimState::set_vocabulary(NodeId u, std::span<const Word> words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].token >= word_holders_.size())
      throw ParameterError("set_vocabulary: word was never invented");
    for (std::size_t j = 0; j < i; ++j)
      if (words[j] == words[i]) throw ParameterError("set_vocabulary: duplicate word");
  }
  for (Word x : vocab_[u]) drop_holder(x);
  vocab_[u].assign(words.begin(), words.end());
  for (Word x : vocab_[u]) add_holder(x);
}

Word pick_word(SimState& state, NodeId speaker, Rng& rng, bool& invented) {
  const Vocabulary& list = state.vocabulary(speaker);
  invented = list.empty();
  if (invented) {
    const Word w = state.invent_word();
    state.hear(speaker, w);
    return w;
  }
  return list.size() == 1 ? list.front() : list[uniform_below(rng, list.size())];
}

StepOutcome apply_event(SimState& state, const Graph& g, InteractionMode mode, NodeId speaker, Rng& rng) {
  StepOutcome out;
  out.speaker = speaker;
  out.transmitted = pick_word(state, speaker, rng, out.invented);
  const Word w = out.transmitted;
  const auto nb = g.neighbors(speaker);

  if (mode == InteractionMode::broadcast) {
    out.listener_count = static_cast<std::uint32_t>(nb.size());
    for (NodeId v : nb) {
      if (state.hear(v, w)) {
        state.collapse(v, w);
        ++out.success_count;
      }
    }
    if (out.success_count > 0) state.collapse(speaker, w);
  } else if (!nb.empty()) {
    const NodeId listener = nb[uniform_below(rng, nb.size())];
    out.listener_count = 1;
    if (state.hear(listener, w)) {
      state.collapse(listener, w);
      state.collapse(speaker, w);
      out.success_count = 1;
    }
  }
  state.advance_clock();
  return out;
}

StepOutcome step(SimState& state, const Graph& g, InteractionMode mode, Rng& rng) {
  const auto speaker = static_cast<NodeId>(uniform_below(rng, state.node_count()));
  return apply_event(state, g, mode, speaker, rng);
}

}  // namespace ngsim
