#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galex/context.hpp"
#include "galex/error.hpp"
#include "galex/lattice.hpp"

namespace galex {

enum class Direction { Up, Down };

/// One minimal step to a cover neighbour of the current concept. Going up
/// drops attributes and gains objects; going down does the opposite.
struct Move {
  Direction direction = Direction::Up;
  ConceptId target = 0;
  AttributeSet attributes_removed;
  AttributeSet attributes_added;
  ObjectSet objects_gained;
  ObjectSet objects_lost;
  /// Target is an object-concept, i.e. its intent is an existing configuration.
  bool target_is_valid_configuration = false;
};

enum class Via { Start, Move, Jump };

struct HistoryEntry {
  ConceptId concept_id = 0;
  Via via = Via::Start;
};

class NavigationSession {
 public:
  /// Starts at `at`, or at top when absent.
  explicit NavigationSession(std::shared_ptr<const ConceptLattice> lattice, std::optional<ConceptId> at = {})
      : lattice_(std::move(lattice)) {
    const ConceptId start = at.value_or(lattice_->top());
    if (!lattice_->contains(start)) throw Error(ErrorCode::UnknownConcept, "concept " + std::to_string(start));
    history_.push_back({start, Via::Start});
  }

  const ConceptLattice& lattice() const noexcept { return *lattice_; }
  ConceptId current() const noexcept { return history_.back().concept_id; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }

  /// UP moves then DOWN moves, each sorted by target id.
  std::vector<Move> available_moves() const {
    const auto& l = *lattice_;
    std::vector<Move> moves;
    for (ConceptId up : l.upper_covers(current())) moves.push_back(make_move(Direction::Up, up));
    for (ConceptId down : l.lower_covers(current())) moves.push_back(make_move(Direction::Down, down));
    return moves;
  }

  /// Moves to a cover neighbour; anything else is NotAdjacent.
  Move apply_move(ConceptId target) {
    const auto& l = *lattice_;
    if (!l.contains(target)) throw Error(ErrorCode::UnknownConcept, "concept " + std::to_string(target));
    const ConceptId here = current();
    Direction dir;
    if (l.is_cover(here, target))
      dir = Direction::Up;
    else if (l.is_cover(target, here))
      dir = Direction::Down;
    else
      throw Error(ErrorCode::NotAdjacent,
                  "concept " + std::to_string(target) + " is not a cover neighbour of " + std::to_string(here));
    Move m = make_move(dir, target);
    history_.push_back({target, Via::Move});
    return m;
  }

  /// Free repositioning, recorded as a jump. Returns the delta from the old position.
  Move jump(ConceptId target) {
    const auto& l = *lattice_;
    if (!l.contains(target)) throw Error(ErrorCode::UnknownConcept, "concept " + std::to_string(target));
    const Direction dir = l.leq(current(), target) ? Direction::Up : Direction::Down;
    Move m = make_move(dir, target);
    history_.push_back({target, Via::Jump});
    return m;
  }

  /// (object, object-concept) for every object in the current extent.
  std::vector<std::pair<std::size_t, ConceptId>> reachable_configurations() const {
    const auto& l = *lattice_;
    std::vector<std::pair<std::size_t, ConceptId>> out;
    l.concept_at(current()).extent.bits().for_each(
        [&](std::size_t o) { out.emplace_back(o, l.object_concept(o)); });
    return out;
  }

 private:
  Move make_move(Direction dir, ConceptId target) const {
    const auto& l = *lattice_;
    const auto& from = l.concept_at(current());
    const auto& to = l.concept_at(target);
    Move m;
    m.direction = dir;
    m.target = target;
    m.attributes_removed = from.intent - to.intent;
    m.attributes_added = to.intent - from.intent;
    m.objects_gained = to.extent - from.extent;
    m.objects_lost = from.extent - to.extent;
    to.extent.bits().for_each([&](std::size_t o) {
      m.target_is_valid_configuration = m.target_is_valid_configuration || l.object_concept(o) == target;
    });
    return m;
  }

  std::shared_ptr<const ConceptLattice> lattice_;
  std::vector<HistoryEntry> history_;
};

inline nlohmann::ordered_json move_to_json(const ConceptLattice& l, const Move& m) {
  const auto& ctx = l.context();
  nlohmann::ordered_json j;
  j["direction"] = m.direction == Direction::Up ? "UP" : "DOWN";
  j["target"] = m.target;
  j["attributes_removed"] = ctx.names_of(m.attributes_removed);
  j["attributes_added"] = ctx.names_of(m.attributes_added);
  j["objects_gained"] = ctx.names_of(m.objects_gained);
  j["objects_lost"] = ctx.names_of(m.objects_lost);
  j["target_is_valid_configuration"] = m.target_is_valid_configuration;
  return j;
}

inline nlohmann::ordered_json moves_to_json(const ConceptLattice& l, const std::vector<Move>& moves) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : moves) arr.push_back(move_to_json(l, m));
  return arr;
}

inline nlohmann::ordered_json session_to_json(const NavigationSession& s, const std::string& session_id) {
  nlohmann::ordered_json j;
  j["session_id"] = session_id;
  j["current"] = s.current();
  auto hist = nlohmann::ordered_json::array();
  for (const auto& h : s.history()) {
    // The starting placement is a free positioning, so it serializes as a jump.
    const char* via = h.via == Via::Move ? "move" : "jump";
    hist.push_back({{"concept", h.concept_id}, {"via", via}});
  }
  j["history"] = std::move(hist);
  return j;
}

}  // namespace galex
