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

#include "ailad/env.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "ailad/errors.hpp"
#include "ailad/io.hpp"

namespace ailad::env {

namespace {

// Observation scalar block layout.
//   [0]      turns remaining / max_turns
//   [1..3]   hero hp fractions
//   [4..7]   enemy hp fractions (absent or dead -> 0)
//   [8..10]  hero super availability
//   [11..13] active-hero one-hot
//   [14..16] active hero has_moved / has_shot / has_stabbed
//   [17..19] hero empowered flags
//   [20..22] hero shielded flags
constexpr int kScalarCount = 23;

constexpr int kGridChannels = 4;  // hero, enemy, cover, empty

int cell_index(const LevelSpec& level, Cell c) {
  return c.y * level.grid_width + c.x;
}

bool in_bounds(const LevelSpec& level, Cell c) {
  return c.x >= 0 && c.x < level.grid_width && c.y >= 0 &&
         c.y < level.grid_height;
}

std::string cell_to_text(Cell c) {
  return std::to_string(c.x) + "," + std::to_string(c.y);
}

Cell cell_from_text(const std::string& s) {
  auto parts = io::split(s, ',');
  if (parts.size() != 2) throw IoFailure("bad cell: " + s);
  return Cell{static_cast<int>(io::parse_int(parts[0])),
              static_cast<int>(io::parse_int(parts[1]))};
}

}  // namespace

UnitStats hero_base_stats(HeroClass c) {
  switch (c) {
    case HeroClass::kShielder:
      return {12, 3, 5, 3};
    case HeroClass::kHealer:
      return {10, 4, 4, 2};
    case HeroClass::kEmpowerer:
      return {11, 3, 4, 2};
  }
  return {10, 3, 4, 2};
}

UnitStats enemy_base_stats() { return {8, 3, 4, 2}; }

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kOngoing:
      return "ongoing";
    case Outcome::kWin:
      return "win";
    case Outcome::kLose:
      return "lose";
    case Outcome::kDraw:
      return "draw";
  }
  return "?";
}

int LevelSpec::observation_size() const {
  return kGridChannels * cell_count() + kScalarCount;
}

bool LevelSpec::valid(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (grid_width < 4 || grid_height < 4) return fail("grid too small");
  if (max_turns < 1) return fail("max_turns < 1");
  if (enemy_count < kMinEnemies || enemy_count > kMaxEnemies)
    return fail("enemy_count out of range");
  if (static_cast<int>(enemy_spawns.size()) != enemy_count)
    return fail("enemy_spawns size != enemy_count");
  std::vector<Cell> all;
  for (Cell c : hero_spawns) all.push_back(c);
  for (Cell c : enemy_spawns) all.push_back(c);
  for (Cell c : cover_cells) all.push_back(c);
  for (Cell c : all) {
    if (!in_bounds(*this, c)) return fail("cell out of bounds");
  }
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i + 1; j < all.size(); ++j) {
      if (all[i] == all[j]) return fail("spawn/cover cells not distinct");
    }
  }
  return true;
}

std::string LevelSpec::to_text() const {
  std::ostringstream out;
  out << "level v1\n";
  out << "grid " << grid_width << " " << grid_height << "\n";
  out << "max_turns " << max_turns << "\n";
  out << "seed " << rng_seed << "\n";
  out << "heroes";
  for (Cell c : hero_spawns) out << " " << cell_to_text(c);
  out << "\nenemies";
  for (Cell c : enemy_spawns) out << " " << cell_to_text(c);
  out << "\ncover";
  for (Cell c : cover_cells) out << " " << cell_to_text(c);
  out << "\n";
  return out.str();
}

LevelSpec LevelSpec::from_text(const std::string& text) {
  LevelSpec level;
  level.cover_cells.clear();
  level.enemy_spawns.clear();
  auto lines = io::split_lines(text);
  if (lines.empty() || lines[0] != "level v1")
    throw IoFailure("bad level header");
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto tok = io::split(lines[i], ' ');
    const std::string& key = tok[0];
    if (key == "grid" && tok.size() == 3) {
      level.grid_width = static_cast<int>(io::parse_int(tok[1]));
      level.grid_height = static_cast<int>(io::parse_int(tok[2]));
    } else if (key == "max_turns" && tok.size() == 2) {
      level.max_turns = static_cast<int>(io::parse_int(tok[1]));
    } else if (key == "seed" && tok.size() == 2) {
      level.rng_seed = static_cast<uint64_t>(io::parse_int(tok[1]));
    } else if (key == "heroes") {
      if (tok.size() != kHeroCount + 1) throw IoFailure("bad heroes line");
      for (int h = 0; h < kHeroCount; ++h)
        level.hero_spawns[h] = cell_from_text(tok[h + 1]);
    } else if (key == "enemies") {
      for (size_t t = 1; t < tok.size(); ++t)
        level.enemy_spawns.push_back(cell_from_text(tok[t]));
      level.enemy_count = static_cast<int>(level.enemy_spawns.size());
    } else if (key == "cover") {
      for (size_t t = 1; t < tok.size(); ++t)
        level.cover_cells.push_back(cell_from_text(tok[t]));
    } else {
      throw IoFailure("unknown level key: " + key);
    }
  }
  std::string why;
  if (!level.valid(&why)) throw IoFailure("invalid level: " + why);
  return level;
}

LevelSpec default_level() {
  LevelSpec level;
  level.hero_spawns = {Cell{3, 11}, Cell{5, 11}, Cell{7, 11}};
  level.enemy_spawns = {Cell{4, 0}, Cell{6, 0}, Cell{8, 0}};
  level.enemy_count = 3;
  level.cover_cells = {Cell{3, 5}, Cell{8, 6}, Cell{5, 4}, Cell{6, 7}};
  level.rng_seed = 12345;
  return level;
}

LevelSpec generate_level(int index, uint64_t seed) {
  Rng rng(derive_seed(seed, static_cast<uint64_t>(index), 0x1e7e1));
  LevelSpec level;
  level.enemy_count = kMinEnemies + rng.uniform_int(kMaxEnemies - kMinEnemies + 1);
  level.rng_seed = derive_seed(seed, static_cast<uint64_t>(index), 0x5eed);

  auto pick_cells = [&rng, &level](int y_lo, int y_hi, int count) {
    std::vector<Cell> candidates;
    for (int y = y_lo; y <= y_hi; ++y)
      for (int x = 0; x < level.grid_width; ++x) candidates.push_back({x, y});
    for (int i = static_cast<int>(candidates.size()) - 1; i > 0; --i) {
      int j = rng.uniform_int(i + 1);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(count);
    return candidates;
  };

  auto heroes = pick_cells(level.grid_height - 3, level.grid_height - 1, kHeroCount);
  std::copy(heroes.begin(), heroes.end(), level.hero_spawns.begin());
  level.enemy_spawns = pick_cells(0, 2, level.enemy_count);
  int n_cover = 4 + rng.uniform_int(4);
  level.cover_cells = pick_cells(3, level.grid_height - 4, n_cover);
  return level;
}

std::vector<double> Observation::flat() const {
  std::vector<double> out;
  flat_into(out);
  return out;
}

void Observation::flat_into(std::vector<double>& out) const {
  out.resize(size());
  std::copy(grid_onehot.begin(), grid_onehot.end(), out.begin());
  std::copy(scalars.begin(), scalars.end(),
            out.begin() + static_cast<long>(grid_onehot.size()));
}

int ActionMask::count() const {
  int n = 0;
  for (uint8_t b : legal) n += (b != 0);
  return n;
}

namespace {

std::vector<uint8_t> blocked_cells(const BattleState& s) {
  std::vector<uint8_t> blocked(s.level.cell_count(), 0);
  for (Cell c : s.level.cover_cells) blocked[cell_index(s.level, c)] = 1;
  for (const UnitState& u : s.units)
    if (u.alive()) blocked[cell_index(s.level, u.pos)] = 1;
  return blocked;
}

// Cells reachable within `range` 4-neighbor steps, not passing through cover
// or living units. The unit's own cell is not included.
std::vector<uint8_t> reachable_cells(const BattleState& s, int unit_index,
                                     int range) {
  const LevelSpec& level = s.level;
  const UnitState& u = s.units[unit_index];
  std::vector<uint8_t> blocked = blocked_cells(s);
  std::vector<int> dist(level.cell_count(), -1);
  std::vector<uint8_t> reach(level.cell_count(), 0);
  std::deque<Cell> frontier;
  frontier.push_back(u.pos);
  dist[cell_index(level, u.pos)] = 0;
  while (!frontier.empty()) {
    Cell c = frontier.front();
    frontier.pop_front();
    int d = dist[cell_index(level, c)];
    if (d >= range) continue;
    const Cell nbrs[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1},
                          {c.x, c.y - 1}};
    for (Cell n : nbrs) {
      if (!in_bounds(level, n)) continue;
      int ni = cell_index(level, n);
      if (blocked[ni] || dist[ni] >= 0) continue;
      dist[ni] = d + 1;
      reach[ni] = 1;
      frontier.push_back(n);
    }
  }
  return reach;
}

int opposing_base(const BattleState&, Team team) {
  return team == Team::kHero ? kHeroCount : 0;
}

int opposing_count(const BattleState& s, Team team) {
  return team == Team::kHero ? s.level.enemy_count : kHeroCount;
}

// Deterministic super target; -1 when no eligible target exists.
int super_target(const BattleState& s, int unit_index) {
  const UnitState& u = s.units[unit_index];
  if (u.team != Team::kHero) return -1;
  int best = -1;
  double best_frac = 2.0;
  switch (u.hero_class) {
    case HeroClass::kShielder:
      for (int h = 0; h < kHeroCount; ++h) {
        const UnitState& t = s.units[h];
        if (!t.alive() || t.shielded) continue;
        double frac = static_cast<double>(t.hp) / t.max_hp;
        if (frac < best_frac) {
          best_frac = frac;
          best = h;
        }
      }
      return best;
    case HeroClass::kHealer:
      for (int h = 0; h < kHeroCount; ++h) {
        const UnitState& t = s.units[h];
        if (!t.alive() || t.hp >= t.max_hp) continue;
        double frac = static_cast<double>(t.hp) / t.max_hp;
        if (frac < best_frac) {
          best_frac = frac;
          best = h;
        }
      }
      return best;
    case HeroClass::kEmpowerer:
      for (int h = 0; h < kHeroCount; ++h) {
        const UnitState& t = s.units[h];
        if (t.alive() && !t.empowered) return h;
      }
      return -1;
  }
  return -1;
}

}  // namespace

ActionMask Battle::compute_mask(const BattleState& s, int unit_index) {
  const LevelSpec& level = s.level;
  const UnitState& u = s.units[unit_index];
  ActionIds ids(level);
  ActionMask mask;
  mask.legal.assign(level.action_count(), 0);
  if (s.outcome != Outcome::kOngoing || !u.alive()) return mask;

  if (!u.has_moved_this_turn && !u.has_moved_lock) {
    std::vector<uint8_t> reach = reachable_cells(s, unit_index, u.move_range);
    for (int c = 0; c < level.cell_count(); ++c)
      if (reach[c]) mask.legal[ids.move_to(c)] = 1;
  }

  int base = opposing_base(s, u.team);
  int count = opposing_count(s, u.team);
  for (int slot = 0; slot < count; ++slot) {
    const UnitState& t = s.units[base + slot];
    if (!t.alive()) continue;
    int d = chebyshev(u.pos, t.pos);
    if (!u.has_shot_this_turn && d <= u.attack_range)
      mask.legal[ids.shoot(slot)] = 1;
    if (!u.has_stabbed_this_turn && d <= 1) mask.legal[ids.stab(slot)] = 1;
  }

  if (u.super_available && super_target(s, unit_index) >= 0)
    mask.legal[ids.use_super()] = 1;

  mask.legal[ids.end_turn()] = 1;
  return mask;
}

Battle::Battle(const LevelSpec& level) {
  std::string why;
  if (!level.valid(&why)) throw ConfigInvalid("invalid level: " + why);
  state_.level = level;
  state_.units.clear();
  for (int h = 0; h < kHeroCount; ++h) {
    UnitState u;
    u.id = h;
    u.team = Team::kHero;
    u.hero_class = static_cast<HeroClass>(h);
    UnitStats st = hero_base_stats(u.hero_class);
    u.pos = level.hero_spawns[h];
    u.hp = u.max_hp = st.max_hp;
    u.move_range = st.move_range;
    u.attack_range = st.attack_range;
    u.attack_damage = st.attack_damage;
    u.super_available = true;
    state_.units.push_back(u);
  }
  for (int e = 0; e < level.enemy_count; ++e) {
    UnitState u;
    u.id = kHeroCount + e;
    u.team = Team::kEnemy;
    UnitStats st = enemy_base_stats();
    u.pos = level.enemy_spawns[e];
    u.hp = u.max_hp = st.max_hp;
    u.move_range = st.move_range;
    u.attack_range = st.attack_range;
    u.attack_damage = st.attack_damage;
    u.super_available = false;
    state_.units.push_back(u);
  }
  state_.turn_number = 1;
  state_.phase = Phase::kHeroPhase;
  state_.active_unit = 0;
  state_.rng_state = level.rng_seed;
  refresh();
}

void Battle::refresh() {
  const LevelSpec& level = state_.level;
  int cells = level.cell_count();
  obs_.grid_onehot.assign(kGridChannels * cells, 0.0);
  for (int c = 0; c < cells; ++c) obs_.grid_onehot[3 * cells + c] = 1.0;
  auto mark = [&](int channel, Cell c) {
    int ci = cell_index(level, c);
    obs_.grid_onehot[channel * cells + ci] = 1.0;
    obs_.grid_onehot[3 * cells + ci] = 0.0;
  };
  for (const UnitState& u : state_.units)
    if (u.alive()) mark(u.team == Team::kHero ? 0 : 1, u.pos);
  for (Cell c : level.cover_cells) mark(2, c);

  obs_.scalars.assign(kScalarCount, 0.0);
  obs_.scalars[kScalarTurnsRemaining] =
      static_cast<double>(level.max_turns - state_.turn_number + 1) /
      level.max_turns;
  for (int h = 0; h < kHeroCount; ++h) {
    const UnitState& u = state_.units[h];
    obs_.scalars[1 + h] = static_cast<double>(u.hp) / u.max_hp;
    obs_.scalars[8 + h] = u.super_available ? 1.0 : 0.0;
    obs_.scalars[17 + h] = u.empowered ? 1.0 : 0.0;
    obs_.scalars[20 + h] = u.shielded ? 1.0 : 0.0;
  }
  for (int e = 0; e < state_.level.enemy_count; ++e) {
    const UnitState& u = state_.units[kHeroCount + e];
    obs_.scalars[4 + e] = static_cast<double>(u.hp) / u.max_hp;
  }
  if (state_.outcome == Outcome::kOngoing &&
      state_.phase == Phase::kHeroPhase) {
    int a = state_.active_unit;
    obs_.scalars[11 + a] = 1.0;
    obs_.scalars[14] = state_.units[a].has_moved_this_turn ? 1.0 : 0.0;
    obs_.scalars[15] = state_.units[a].has_shot_this_turn ? 1.0 : 0.0;
    obs_.scalars[16] = state_.units[a].has_stabbed_this_turn ? 1.0 : 0.0;
    mask_ = compute_mask(state_, a);
  } else {
    mask_.legal.assign(state_.level.action_count(), 0);
  }
}

void Battle::snapshot_positions() {
  EventLog::TurnSnapshot snap;
  for (int h = 0; h < kHeroCount; ++h) {
    snap.hero_pos[h] = state_.units[h].pos;
    snap.hero_alive[h] = state_.units[h].alive();
  }
  for (int e = 0; e < kMaxEnemies; ++e) {
    if (e < state_.level.enemy_count) {
      snap.enemy_pos[e] = state_.units[kHeroCount + e].pos;
      snap.enemy_alive[e] = state_.units[kHeroCount + e].alive();
    } else {
      snap.enemy_pos[e] = Cell{0, 0};
      snap.enemy_alive[e] = false;
    }
  }
  state_.log.turn_snapshots.push_back(snap);
  state_.log.turns_played = static_cast<int>(state_.log.turn_snapshots.size());
}

void Battle::check_elimination() {
  if (state_.outcome != Outcome::kOngoing) return;
  bool any_enemy = false, any_hero = false;
  for (const UnitState& u : state_.units) {
    if (!u.alive()) continue;
    (u.team == Team::kHero ? any_hero : any_enemy) = true;
  }
  if (any_hero && any_enemy) return;
  state_.outcome = any_hero ? Outcome::kWin : Outcome::kLose;
  if (static_cast<int>(state_.log.turn_snapshots.size()) < state_.turn_number)
    snapshot_positions();
  state_.log.outcome = state_.outcome;
}

void Battle::apply_unit_action(int unit_index, int action, StepDelta& delta) {
  const LevelSpec& level = state_.level;
  ActionIds ids(level);
  UnitState& u = state_.units[unit_index];
  EventLog& log = state_.log;
  bool is_hero = u.team == Team::kHero;

  if (ids.is_move(action)) {
    u.pos = Cell{action % level.grid_width, action / level.grid_width};
    u.has_moved_this_turn = true;
    return;
  }
  if (ids.is_shoot(action) || ids.is_stab(action)) {
    bool shot = ids.is_shoot(action);
    UnitState& target =
        state_.units[opposing_base(state_, u.team) + ids.target_slot(action)];
    int dmg = u.attack_damage;
    if (shot && u.empowered) {
      dmg += kEmpowerBonusDamage;
      u.empowered = false;
      if (is_hero) {
        ++log.empowered_shots;
        ++delta.empowered_shots;
      }
    }
    if (target.shielded) {
      target.shielded = false;
      dmg = 0;
    }
    int dealt = std::min(dmg, target.hp);
    target.hp -= dealt;
    if (is_hero) {
      log.enemy_damage_taken += dealt;
      delta.enemy_damage += dealt;
      if (shot) {
        ++log.shots_by_heroes;
        ++delta.shots_by_heroes;
      } else {
        ++log.stabs_by_heroes;
        ++delta.stabs_by_heroes;
      }
    } else {
      log.hero_damage_taken += dealt;
      delta.hero_damage += dealt;
      if (shot) {
        ++log.shots_taken;
        ++delta.shots_taken;
      } else {
        ++log.stabs_taken;
        ++delta.stabs_taken;
      }
    }
    if (shot) {
      u.has_shot_this_turn = true;
      u.has_moved_lock = true;  // shooting ends movement for the turn
    } else {
      u.has_stabbed_this_turn = true;
    }
    check_elimination();
    return;
  }
  if (action == ids.use_super()) {
    int t = super_target(state_, unit_index);
    UnitState& target = state_.units[t];
    switch (u.hero_class) {
      case HeroClass::kShielder:
        target.shielded = true;
        ++log.shields_used;
        ++delta.shields_used;
        break;
      case HeroClass::kHealer: {
        int healed = std::min(kHealAmount, target.max_hp - target.hp);
        target.hp += healed;
        log.hero_hp_healed += healed;
        ++log.heals_used;
        ++delta.heals_used;
        break;
      }
      case HeroClass::kEmpowerer:
        target.empowered = true;
        break;
    }
    u.super_available = false;
    return;
  }
  // end-unit-turn handled by the caller
}

void Battle::run_enemy_phase(StepDelta& delta) {
  state_.phase = Phase::kEnemyPhase;
  for (int e = 0; e < state_.level.enemy_count; ++e) {
    int idx = kHeroCount + e;
    if (!state_.units[idx].alive()) continue;
    Rng rng(derive_seed(state_.rng_state, state_.turn_number, idx));
    state_.active_unit = idx;
    // A unit's per-turn action flags bound this loop.
    for (int guard = 0; guard < 8; ++guard) {
      if (state_.outcome != Outcome::kOngoing) return;
      int action = scripted_enemy_policy(state_, idx, rng);
      if (action == ActionIds(state_.level).end_turn()) break;
      apply_unit_action(idx, action, delta);
    }
    if (state_.outcome != Outcome::kOngoing) return;
  }
}

void Battle::finish_turn(StepDelta& delta) {
  run_enemy_phase(delta);
  if (state_.outcome != Outcome::kOngoing) return;
  if (static_cast<int>(state_.log.turn_snapshots.size()) < state_.turn_number)
    snapshot_positions();
  ++state_.turn_number;
  if (state_.turn_number > state_.level.max_turns) {
    state_.outcome = Outcome::kDraw;
    state_.log.outcome = Outcome::kDraw;
    return;
  }
  for (UnitState& u : state_.units) {
    u.has_shot_this_turn = false;
    u.has_stabbed_this_turn = false;
    u.has_moved_this_turn = false;
    u.has_moved_lock = false;
  }
  state_.phase = Phase::kHeroPhase;
  state_.active_unit = -1;
  advance_hero_cursor();
}

void Battle::advance_hero_cursor() {
  for (int h = state_.active_unit + 1; h < kHeroCount; ++h) {
    if (state_.units[h].alive()) {
      state_.active_unit = h;
      return;
    }
  }
  state_.active_unit = kHeroCount;  // hero phase exhausted
}

StepResult Battle::step(int action) {
  if (done()) throw IllegalAction("step on finished episode");
  if (!mask_.is_legal(action))
    throw IllegalAction("masked action " + std::to_string(action) +
                        " for unit " + std::to_string(state_.active_unit));
  StepResult result;
  ActionIds ids(state_.level);
  ++state_.micro_steps;

  if (action == ids.end_turn()) {
    advance_hero_cursor();
    if (state_.active_unit >= kHeroCount) finish_turn(result.delta);
  } else {
    apply_unit_action(state_.active_unit, action, result.delta);
  }
  result.done = done();
  refresh();
  return result;
}

int scripted_enemy_policy(const BattleState& s, int unit_index, Rng& rng) {
  (void)rng;  // priorities are deterministic; rng reserved for future variants
  const UnitState& u = s.units[unit_index];
  ActionIds ids(s.level);
  ActionMask mask = Battle::compute_mask(s, unit_index);

  // Nearest living hero; ties broken by slot order.
  int nearest = -1;
  double nearest_d = 1e18;
  for (int h = 0; h < kHeroCount; ++h) {
    const UnitState& t = s.units[h];
    if (!t.alive()) continue;
    double d = euclid(u.pos, t.pos);
    if (d < nearest_d) {
      nearest_d = d;
      nearest = h;
    }
  }
  if (nearest < 0) return ids.end_turn();

  for (int h = 0; h < kHeroCount; ++h)
    if (mask.is_legal(ids.stab(h))) return ids.stab(h);
  if (mask.is_legal(ids.shoot(nearest))) return ids.shoot(nearest);
  for (int h = 0; h < kHeroCount; ++h)
    if (mask.is_legal(ids.shoot(h))) return ids.shoot(h);

  if (!u.has_moved_this_turn && !u.has_moved_lock) {
    Cell hero_pos = s.units[nearest].pos;
    int best = -1;
    double best_d = euclid(u.pos, hero_pos);
    for (int c = 0; c < s.level.cell_count(); ++c) {
      if (!mask.is_legal(ids.move_to(c))) continue;
      Cell cc{c % s.level.grid_width, c / s.level.grid_width};
      double d = euclid(cc, hero_pos);
      if (d < best_d - 1e-12) {
        best_d = d;
        best = c;
      }
    }
    if (best >= 0) return ids.move_to(best);
  }
  return ids.end_turn();
}

int scripted_expert_policy(const StyleParams& style, const BattleState& s,
                           const ActionMask& mask, Rng& rng) {
  const UnitState& u = s.units[s.active_unit];
  ActionIds ids(s.level);

  // One super attempt per unit turn, at a quarter of the affinity, so the
  // episode-level usage rate stays below saturation over ten turns.
  bool fresh = !u.has_moved_this_turn && !u.has_shot_this_turn &&
               !u.has_stabbed_this_turn;
  if (fresh && mask.is_legal(ids.use_super()) &&
      rng.uniform() < 0.25 * style.super_affinity)
    return ids.use_super();

  double p_attack = 0.02 + 0.98 * style.aggression;

  // Stab the nearest adjacent enemy.
  {
    int best = -1;
    double best_d = 1e18;
    for (int e = 0; e < kMaxEnemies; ++e) {
      if (!mask.is_legal(ids.stab(e))) continue;
      double d = euclid(u.pos, s.units[kHeroCount + e].pos);
      if (d < best_d) {
        best_d = d;
        best = e;
      }
    }
    if (best >= 0 && rng.uniform() < p_attack) return ids.stab(best);
  }

  // Reposition before shooting: advance when aggressive, fall back when
  // cautious and threatened.
  if (!u.has_moved_this_turn && !u.has_moved_lock) {
    int nearest = -1;
    double nearest_d = 1e18;
    for (int e = 0; e < s.level.enemy_count; ++e) {
      const UnitState& t = s.units[kHeroCount + e];
      if (!t.alive()) continue;
      double d = euclid(u.pos, t.pos);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = e;
      }
    }
    if (nearest >= 0) {
      Cell enemy_pos = s.units[kHeroCount + nearest].pos;
      bool advance = rng.uniform() < style.aggression;
      bool retreat = !advance && nearest_d <= 6.0 &&
                     rng.uniform() < style.caution;
      int best = -1;
      double best_d = euclid(u.pos, enemy_pos);
      if (advance || retreat) {
        for (int c = 0; c < s.level.cell_count(); ++c) {
          if (!mask.is_legal(ids.move_to(c))) continue;
          Cell cc{c % s.level.grid_width, c / s.level.grid_width};
          double d = euclid(cc, enemy_pos);
          bool better = advance ? (d < best_d - 1e-12) : (d > best_d + 1e-12);
          if (better) {
            best_d = d;
            best = c;
          }
        }
        if (best >= 0) return ids.move_to(best);
      }
    }
  }

  // Shoot the weakest enemy in range.
  {
    int best = -1;
    int best_hp = 1 << 30;
    for (int e = 0; e < kMaxEnemies; ++e) {
      if (!mask.is_legal(ids.shoot(e))) continue;
      int hp = s.units[kHeroCount + e].hp;
      if (hp < best_hp) {
        best_hp = hp;
        best = e;
      }
    }
    if (best >= 0 && rng.uniform() < p_attack) return ids.shoot(best);
  }

  return ids.end_turn();
}

EventLog play_expert_episode(const LevelSpec& level, const StyleParams& style,
                             uint64_t episode_seed) {
  Battle battle(level);
  Rng rng(episode_seed);
  while (!battle.done()) {
    int action =
        scripted_expert_policy(style, battle.state(), battle.mask(), rng);
    battle.step(action);
  }
  return battle.log();
}

std::string EventLog::to_text() const {
  std::ostringstream out;
  out << "eventlog v1\n";
  out << "counters " << shots_by_heroes << " " << stabs_by_heroes << " "
      << shots_taken << " " << stabs_taken << " " << shields_used << " "
      << heals_used << " " << empowered_shots << "\n";
  out << "damage " << hero_damage_taken << " " << enemy_damage_taken << " "
      << hero_hp_healed << "\n";
  out << "outcome " << outcome_name(outcome) << "\n";
  out << "turns " << turns_played << "\n";
  for (const TurnSnapshot& snap : turn_snapshots) {
    out << "snapshot";
    for (int h = 0; h < kHeroCount; ++h)
      out << " " << cell_to_text(snap.hero_pos[h]) << ","
          << (snap.hero_alive[h] ? 1 : 0);
    for (int e = 0; e < kMaxEnemies; ++e)
      out << " " << cell_to_text(snap.enemy_pos[e]) << ","
          << (snap.enemy_alive[e] ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

EventLog EventLog::from_text(const std::string& text) {
  EventLog log;
  auto lines = io::split_lines(text);
  if (lines.empty() || lines[0] != "eventlog v1")
    throw IoFailure("bad eventlog header");
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto tok = io::split(lines[i], ' ');
    const std::string& key = tok[0];
    if (key == "counters" && tok.size() == 8) {
      log.shots_by_heroes = static_cast<int>(io::parse_int(tok[1]));
      log.stabs_by_heroes = static_cast<int>(io::parse_int(tok[2]));
      log.shots_taken = static_cast<int>(io::parse_int(tok[3]));
      log.stabs_taken = static_cast<int>(io::parse_int(tok[4]));
      log.shields_used = static_cast<int>(io::parse_int(tok[5]));
      log.heals_used = static_cast<int>(io::parse_int(tok[6]));
      log.empowered_shots = static_cast<int>(io::parse_int(tok[7]));
    } else if (key == "damage" && tok.size() == 4) {
      log.hero_damage_taken = static_cast<int>(io::parse_int(tok[1]));
      log.enemy_damage_taken = static_cast<int>(io::parse_int(tok[2]));
      log.hero_hp_healed = static_cast<int>(io::parse_int(tok[3]));
    } else if (key == "outcome" && tok.size() == 2) {
      if (tok[1] == "win") log.outcome = Outcome::kWin;
      else if (tok[1] == "lose") log.outcome = Outcome::kLose;
      else if (tok[1] == "draw") log.outcome = Outcome::kDraw;
      else log.outcome = Outcome::kOngoing;
    } else if (key == "turns" && tok.size() == 2) {
      log.turns_played = static_cast<int>(io::parse_int(tok[1]));
    } else if (key == "snapshot" && tok.size() == 1 + kHeroCount + kMaxEnemies) {
      TurnSnapshot snap;
      for (int h = 0; h < kHeroCount; ++h) {
        auto parts = io::split(tok[1 + h], ',');
        if (parts.size() != 3) throw IoFailure("bad snapshot entry");
        snap.hero_pos[h] = Cell{static_cast<int>(io::parse_int(parts[0])),
                                static_cast<int>(io::parse_int(parts[1]))};
        snap.hero_alive[h] = io::parse_int(parts[2]) != 0;
      }
      for (int e = 0; e < kMaxEnemies; ++e) {
        auto parts = io::split(tok[1 + kHeroCount + e], ',');
        if (parts.size() != 3) throw IoFailure("bad snapshot entry");
        snap.enemy_pos[e] = Cell{static_cast<int>(io::parse_int(parts[0])),
                                 static_cast<int>(io::parse_int(parts[1]))};
        snap.enemy_alive[e] = io::parse_int(parts[2]) != 0;
      }
      log.turn_snapshots.push_back(snap);
    } else {
      throw IoFailure("unknown eventlog key: " + key);
    }
  }
  return log;
}

}  // namespace ailad::env
