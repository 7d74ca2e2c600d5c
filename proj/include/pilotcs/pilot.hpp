// SPDX-License-Identifier: Apache-2.0
//
// Cyclic-shift pilot assignment. Transmitter i (1-based) gets base
// sequence beta(i) = ceil(i*L/M) left-shifted by alpha(i) = ((i-1) mod
// (M/L)) * L, re-indexed so that its partial circulant equals the
// matching L-column slab of the base circulant. Concatenating all t
// slabs then tiles exactly q = tL/M full circulants.

#pragma once

#include <ostream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pilotcs/correlation.hpp"
#include "pilotcs/sequence.hpp"

namespace pilotcs {

/// (base index 1..q, shift in {0, L, ..., M-L}) for transmitter i (1-based).
inline std::pair<int, int> shift_index(int i, int m, int l) {
  if (i < 1) throw std::invalid_argument("shift_index: transmitter index starts at 1");
  if (l < 1 || m < 1 || m % l != 0)
    throw std::invalid_argument("shift_index: invalid configuration, M mod L != 0");
  const int shifts_per_base = m / l;
  const int base = static_cast<int>((static_cast<long long>(i) * l + m - 1) / m);  // ceil(iL/M)
  const int shift = ((i - 1) % shifts_per_base) * l;
  return {base, shift};
}

/// The emitted waveform for a base sequence: phi(j) = b((L-1-j) mod M),
/// 0-based. This is the unique re-indexing for which the circular-model
/// matrix built from phi equals the first L columns of the circulant
/// with first row b.
inline PeriodicSequence pilot_from_base(const PeriodicSequence& base, int l) {
  const int m = base.period();
  if (l < 1 || l > m) throw std::invalid_argument("pilot_from_base: L must be in [1, M]");
  cvec values(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) values[static_cast<std::size_t>(j)] = base[l - 1 - j];
  return PeriodicSequence(std::move(values));
}

/// Inverse of pilot_from_base; recovers the base sequence exactly.
inline PeriodicSequence base_from_pilot(const PeriodicSequence& pilot, int l) {
  const int m = pilot.period();
  if (l < 1 || l > m) throw std::invalid_argument("base_from_pilot: L must be in [1, M]");
  cvec values(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) values[static_cast<std::size_t>(k)] = pilot[l - 1 - k];
  return PeriodicSequence(std::move(values));
}

struct PilotAssignment {
  int transmitter = 0;  // 1..t
  int base_index = 0;   // 1..q
  int shift = 0;        // multiple of L in [0, M-L]
  PeriodicSequence pilot;
};

struct PilotPlan {
  std::vector<PilotAssignment> assignments;
  int m = 0;
  int l = 0;
  int t = 0;
  int q = 0;
  SequenceFamily base_family;  // the q sequences actually used, with their own profile
};

/// Build the assignment plan for t transmitters from an explicit list of
/// base indices (0-based positions into the supplied family).
inline PilotPlan assign_pilots(const SequenceFamily& family, int t, int m, int l,
                               const std::vector<int>& base_positions) {
  if (m < 1 || l < 1 || t < 1) throw std::invalid_argument("assign_pilots: M, L, t must be positive");
  if (m % l != 0)
    throw std::invalid_argument("assign_pilots: invalid configuration, M mod L != 0 (M=" +
                                std::to_string(m) + ", L=" + std::to_string(l) + ")");
  const long long total = static_cast<long long>(t) * l;
  if (total % m != 0)
    throw std::invalid_argument("assign_pilots: invalid configuration, t*L=" + std::to_string(total) +
                                " not divisible by M=" + std::to_string(m));
  const int q = static_cast<int>(total / m);
  if (q > static_cast<int>(base_positions.size()))
    throw std::invalid_argument("assign_pilots: insufficient family, needs q=" + std::to_string(q) +
                                " base sequences, got " + std::to_string(base_positions.size()));
  if (family.period() != m)
    throw std::invalid_argument("assign_pilots: family period != M");
  std::vector<PeriodicSequence> bases;
  bases.reserve(static_cast<std::size_t>(q));
  for (int u = 0; u < q; ++u) {
    const int pos = base_positions[static_cast<std::size_t>(u)];
    if (pos < 0 || pos >= family.size())
      throw std::invalid_argument("assign_pilots: base position out of range");
    bases.push_back(family.sequences[static_cast<std::size_t>(pos)]);
  }

  PilotPlan plan;
  plan.m = m;
  plan.l = l;
  plan.t = t;
  plan.q = q;
  for (int i = 1; i <= t; ++i) {
    const auto [base, shift] = shift_index(i, m, l);
    PilotAssignment assignment{
        i, base, shift,
        pilot_from_base(cyclic_shift(bases[static_cast<std::size_t>(base - 1)], shift), l)};
    plan.assignments.push_back(std::move(assignment));
  }
  plan.base_family = make_family(family.kind, std::move(bases));
  return plan;
}

/// Default base subset: the first q members of the family in family order.
inline PilotPlan assign_pilots(const SequenceFamily& family, int t, int m, int l) {
  const long long total = static_cast<long long>(t) * l;
  const int q = (m >= 1 && total % m == 0) ? static_cast<int>(total / m) : family.size();
  std::vector<int> positions;
  for (int u = 0; u < q && u < family.size(); ++u) positions.push_back(u);
  return assign_pilots(family, t, m, l, positions);
}

/// Text manifest: one line per transmitter "index base shift", after a
/// header of the plan dimensions.
inline void write_manifest(const PilotPlan& plan, std::ostream& out) {
  out << "M " << plan.m << " L " << plan.l << " t " << plan.t << " q " << plan.q << "\n";
  for (const auto& a : plan.assignments)
    out << a.transmitter << " " << a.base_index << " " << a.shift << "\n";
}

struct ManifestEntry {
  int transmitter = 0;
  int base_index = 0;
  int shift = 0;
};

struct Manifest {
  int m = 0, l = 0, t = 0, q = 0;
  std::vector<ManifestEntry> entries;
};

inline Manifest read_manifest(std::istream& in) {
  Manifest manifest;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_manifest: empty input");
  std::istringstream header(line);
  std::string key;
  if (!(header >> key >> manifest.m) || key != "M" || !(header >> key >> manifest.l) || key != "L" ||
      !(header >> key >> manifest.t) || key != "t" || !(header >> key >> manifest.q) || key != "q")
    throw std::invalid_argument("read_manifest: malformed header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    ManifestEntry entry;
    if (!(row >> entry.transmitter >> entry.base_index >> entry.shift))
      throw std::invalid_argument("read_manifest: malformed row: " + line);
    manifest.entries.push_back(entry);
  }
  return manifest;
}

}  // namespace pilotcs
