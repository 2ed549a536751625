#pragma once

// Scenario file format: one line-oriented text document listing prosumers,
// non-neutral relations as unordered pair entries, and per-hour orders.
//
//   peermarket scenario v1
//   prosumer: B1
//   prosumer: S4
//   relation: B1 S4 friend
//   order: B1 10 3.250 12 1     # owner hour qty_kwh price_gwei delta_gwei
//
// Unlisted pairs are neutral. serialize() writes the canonical form: prosumers
// sorted buyers-then-sellers by index, relations sorted by pair, orders sorted
// by (hour, owner), energies with exactly three decimals. parse() additionally
// accepts blank lines, '#' comments and relations in either orientation;
// serialize(parse(x)) == x for canonical x.

#include <string>
#include <vector>

#include "peermarket/domain.hpp"

namespace peermarket {

/// Unvalidated scenario contents, exactly what the file says.
struct Scenario {
    std::vector<ProsumerId> prosumers;
    std::vector<RelationEntry> relations;
    std::vector<Order> orders;

    /// Runs session intake on the scenario.
    Session validate() const { return validate_session(orders, prosumers, relations); }
};

std::string serialize_scenario(const Scenario& s);

/// Throws SimError{MalformedInput} with a line number on any malformed line.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& s, const std::string& path);

/// Canonical ordering used by serialize_scenario, exposed so generators can
/// emit canonical scenarios directly.
void canonicalize(Scenario& s);

} // namespace peermarket
