#pragma once

#include "polyopt/core/program.hpp"
#include "polyopt/core/program_ops.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

namespace polyopt {

struct LiveRange {
  TempId temp = 0;
  std::size_t first_def = 0;
  std::size_t last_use = 0;
};

// Post-order of the instructions reachable from the outputs, outputs first to last and
// operands by position. Temporaries are renumbered in the new order.
inline Program dfs_schedule(const Program& program) { return schedule_postorder(program); }

// Live range per defined temporary of a program with unique targets. Uses by outputs
// extend to one past the last instruction.
inline std::vector<LiveRange> live_ranges(const Program& program) {
  const TempId bound = program.temp_bound();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> def(bound, unset);
  std::vector<std::size_t> last(bound, 0);
  const std::size_t end = program.instructions.size();
  for (std::size_t i = 0; i < end; ++i) {
    for (const auto& o : program.instructions[i].operands)
      if (o.is_temp()) last[o.index] = std::max(last[o.index], i);
    const auto t = program.instructions[i].target;
    def[t] = i;
    last[t] = std::max(last[t], i);
  }
  for (const auto& out : program.outputs)
    if (out.value.is_temp()) last[out.value.index] = end;
  std::vector<LiveRange> ranges;
  for (TempId t = 0; t < bound; ++t)
    if (def[t] != unset) ranges.push_back({t, def[t], last[t]});
  return ranges;
}

// Linear scan: each definition takes the lowest slot that is free at that point. An
// operand read for the last time frees its slot first, so Z1 = Z1*Z2 can occur.
// Slots are the new temp ids; emitted names are 1-based.
inline Program recycle(const Program& program) {
  const TempId bound = program.temp_bound();
  const auto ranges = live_ranges(program);
  std::vector<std::size_t> last(bound, 0);
  for (const auto& r : ranges) last[r.temp] = r.last_use;
  std::vector<TempId> slot(bound, 0);
  std::vector<bool> assigned(bound, false);
  std::set<TempId> free_slots;
  TempId next_slot = 0;
  Program out;
  out.instructions.reserve(program.instructions.size());
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const auto& ins = program.instructions[i];
    Instruction renamed = ins;
    for (auto& o : renamed.operands) {
      if (!o.is_temp()) continue;
      if (!assigned[o.index]) throw std::logic_error("temporary used before definition");
      const TempId s = slot[o.index];
      if (last[o.index] == i) free_slots.insert(s);
      o.index = s;
    }
    TempId s;
    if (!free_slots.empty()) {
      s = *free_slots.begin();
      free_slots.erase(free_slots.begin());
    } else {
      s = next_slot++;
    }
    slot[ins.target] = s;
    assigned[ins.target] = true;
    renamed.target = s;
    // A value that is never read is dead right after its definition.
    if (last[ins.target] == i) free_slots.insert(s);
    out.instructions.push_back(std::move(renamed));
  }
  out.outputs = program.outputs;
  for (auto& o : out.outputs)
    if (o.value.is_temp()) o.value.index = slot[o.value.index];
  return out;
}

// 1-based range of temporary indices used by a program; {0, 0} when there are none.
inline std::pair<TempId, TempId> slot_range(const Program& program) {
  if (program.instructions.empty()) return {0, 0};
  TempId lo = std::numeric_limits<TempId>::max();
  TempId hi = 0;
  for (const auto& ins : program.instructions) {
    lo = std::min(lo, ins.target);
    hi = std::max(hi, ins.target);
  }
  return {lo + 1, hi + 1};
}

}  // namespace polyopt
