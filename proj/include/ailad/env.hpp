// Copyright 2026 The ailad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AILAD_ENV_HPP_
#define AILAD_ENV_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "ailad/rng.hpp"

// Turn-based tactics simulation: a team of three heroes against 2-4 scripted
// enemies on a small grid, at most kDefaultMaxTurns turns. Heroes move, shoot,
// stab and may use a once-per-episode super. A unit gets one shot and one stab
// per turn, and once it has shot it can no longer move that turn. Actions that
// are not available are masked out.
namespace ailad::env {

inline constexpr int kHeroCount = 3;
inline constexpr int kMaxEnemies = 4;
inline constexpr int kMinEnemies = 2;
inline constexpr int kDefaultGridSize = 12;
inline constexpr int kDefaultMaxTurns = 10;

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

inline double euclid(Cell a, Cell b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

enum class Team { kHero, kEnemy };
enum class HeroClass { kShielder = 0, kHealer = 1, kEmpowerer = 2 };

struct UnitStats {
  int max_hp;
  int move_range;
  int attack_range;
  int attack_damage;
};

// Unit stat defaults. The source material does not publish exact unit stats;
// these values are this project's balance table.
UnitStats hero_base_stats(HeroClass c);
UnitStats enemy_base_stats();
inline constexpr int kEmpowerBonusDamage = 3;
inline constexpr int kHealAmount = 4;

struct LevelSpec {
  int grid_width = kDefaultGridSize;
  int grid_height = kDefaultGridSize;
  std::vector<Cell> cover_cells;
  std::array<Cell, kHeroCount> hero_spawns{};
  std::vector<Cell> enemy_spawns;
  int enemy_count = 3;
  int max_turns = kDefaultMaxTurns;
  uint64_t rng_seed = 0;

  int cell_count() const { return grid_width * grid_height; }
  // Action catalog: move-to-cell for every cell, shoot/stab per opposing
  // slot, use-super, end-unit-turn.
  int action_count() const { return cell_count() + 2 * kMaxEnemies + 2; }
  int observation_size() const;

  bool valid(std::string* why = nullptr) const;

  // Line-oriented text format, stable across runs.
  std::string to_text() const;
  static LevelSpec from_text(const std::string& text);

  bool operator==(const LevelSpec&) const = default;
};

// A reasonable fixed layout for unit tests and quick experiments.
LevelSpec default_level();

// Deterministic level family; index selects the layout, seed the family.
LevelSpec generate_level(int index, uint64_t seed);

// Action id layout within the catalog.
struct ActionIds {
  int cells;  // grid_width * grid_height
  explicit ActionIds(const LevelSpec& level) : cells(level.cell_count()) {}
  int move_to(int cell_index) const { return cell_index; }
  int shoot(int slot) const { return cells + slot; }
  int stab(int slot) const { return cells + kMaxEnemies + slot; }
  int use_super() const { return cells + 2 * kMaxEnemies; }
  int end_turn() const { return cells + 2 * kMaxEnemies + 1; }
  bool is_move(int a) const { return a >= 0 && a < cells; }
  bool is_shoot(int a) const { return a >= cells && a < cells + kMaxEnemies; }
  bool is_stab(int a) const {
    return a >= cells + kMaxEnemies && a < cells + 2 * kMaxEnemies;
  }
  int target_slot(int a) const {
    return is_shoot(a) ? a - cells : a - cells - kMaxEnemies;
  }
};

struct UnitState {
  int id = 0;
  Team team = Team::kHero;
  HeroClass hero_class = HeroClass::kShielder;
  Cell pos;
  int hp = 0;
  int max_hp = 0;
  int move_range = 0;
  int attack_range = 0;
  int attack_damage = 0;
  bool has_shot_this_turn = false;
  bool has_stabbed_this_turn = false;
  bool has_moved_this_turn = false;
  bool has_moved_lock = false;  // set by shooting; movement is over for the turn
  bool super_available = false;
  bool empowered = false;
  bool shielded = false;

  bool alive() const { return hp > 0; }
};

enum class Phase { kHeroPhase, kEnemyPhase };
enum class Outcome { kOngoing, kWin, kLose, kDraw };

std::string outcome_name(Outcome o);

// Per-episode event record. The seven counters are the aggregated metrics the
// rest of the system consumes; snapshots and hp ledgers feed the extended
// in-game report.
struct EventLog {
  int shots_by_heroes = 0;
  int stabs_by_heroes = 0;
  int shots_taken = 0;
  int stabs_taken = 0;
  int shields_used = 0;
  int heals_used = 0;
  int empowered_shots = 0;

  struct TurnSnapshot {
    std::array<Cell, kHeroCount> hero_pos{};
    std::array<bool, kHeroCount> hero_alive{};
    std::array<Cell, kMaxEnemies> enemy_pos{};
    std::array<bool, kMaxEnemies> enemy_alive{};
    bool operator==(const TurnSnapshot&) const = default;
  };
  std::vector<TurnSnapshot> turn_snapshots;

  int hero_damage_taken = 0;
  int enemy_damage_taken = 0;
  int hero_hp_healed = 0;

  Outcome outcome = Outcome::kOngoing;
  int turns_played = 0;

  std::string to_text() const;
  static EventLog from_text(const std::string& text);

  bool operator==(const EventLog&) const = default;
};

// Event counter changes produced by a single micro-step.
struct StepDelta {
  int shots_by_heroes = 0;
  int stabs_by_heroes = 0;
  int shots_taken = 0;
  int stabs_taken = 0;
  int shields_used = 0;
  int heals_used = 0;
  int empowered_shots = 0;
  int hero_damage = 0;
  int enemy_damage = 0;
};

// Flattened board channels plus a scalar block. Fixed length for a given
// grid shape; see layout notes in env.cpp.
struct Observation {
  std::vector<double> grid_onehot;  // 4 channels x cells: hero, enemy, cover, empty
  std::vector<double> scalars;

  size_t size() const { return grid_onehot.size() + scalars.size(); }
  std::vector<double> flat() const;
  void flat_into(std::vector<double>& out) const;
};

// Index of the turns-remaining entry within Observation::scalars.
inline constexpr int kScalarTurnsRemaining = 0;

struct ActionMask {
  std::vector<uint8_t> legal;
  int count() const;
  bool is_legal(int a) const {
    return a >= 0 && a < static_cast<int>(legal.size()) && legal[a] != 0;
  }
};

struct BattleState {
  LevelSpec level;
  std::vector<UnitState> units;  // heroes first, then enemies
  int turn_number = 1;
  Phase phase = Phase::kHeroPhase;
  int active_unit = 0;
  uint64_t rng_state = 0;  // seed counter for the scripted side
  int micro_steps = 0;
  Outcome outcome = Outcome::kOngoing;
  EventLog log;
};

struct StepResult {
  bool done = false;
  StepDelta delta;
};

// Owns one episode. Construction is reset(): turn 1, hero phase, all units at
// full hp with supers available. step() drives hero micro-actions; the enemy
// phase resolves internally once every hero has ended its turn.
class Battle {
 public:
  explicit Battle(const LevelSpec& level);

  const BattleState& state() const { return state_; }
  const Observation& observation() const { return obs_; }
  const ActionMask& mask() const { return mask_; }
  const EventLog& log() const { return state_.log; }
  bool done() const { return state_.outcome != Outcome::kOngoing; }
  Outcome outcome() const { return state_.outcome; }

  // Applies one hero micro-action. Throws IllegalAction if the action is
  // masked or the episode is over.
  StepResult step(int action);

  // Mask recomputation for an arbitrary unit; used by the scripted side and
  // by tests probing enemy-phase states.
  static ActionMask compute_mask(const BattleState& s, int unit_index);

 private:
  void refresh();
  void apply_unit_action(int unit_index, int action, StepDelta& delta);
  void advance_hero_cursor();
  void run_enemy_phase(StepDelta& delta);
  void finish_turn(StepDelta& delta);
  void snapshot_positions();
  void check_elimination();

  BattleState state_;
  Observation obs_;
  ActionMask mask_;
};

// Scripted enemy: stab an adjacent hero, else shoot the nearest hero in
// range, else move toward the nearest hero, else end. Deterministic given the
// state and rng.
int scripted_enemy_policy(const BattleState& s, int unit_index, Rng& rng);

// Behavior profile for a synthetic expert. All in [0, 1].
struct StyleParams {
  double aggression = 0.5;
  double super_affinity = 0.5;
  double caution = 0.5;
};

// Stochastic hero policy whose event statistics scale with the style knobs.
int scripted_expert_policy(const StyleParams& style, const BattleState& s,
                           const ActionMask& mask, Rng& rng);

// Plays one full episode with the scripted expert; returns the event log.
EventLog play_expert_episode(const LevelSpec& level, const StyleParams& style,
                             uint64_t episode_seed);

}  // namespace ailad::env

#endif  // AILAD_ENV_HPP_
