#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "tbsg/conditioning.h"
#include "tbsg/hard_instances.h"

namespace tbsg {

/// Unreadable, unparsable or structurally malformed input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Game file: {"gamma": g, "states": [{"owner": 1|2, "actions":
// [{"cost": c, "dist": [[state, prob], ...]}]}]}
std::string game_to_json(const Game& game);
Game game_from_json(const std::string& text);  // FormatError or GameValidationError
Game read_game_file(const std::string& path);
void write_game_file(const std::string& path, const Game& game);

// Partition sidecar: {"sigma": [...], "tau": [...]} plus, for G_n,
// "family": {"name": "gn", "n", "gamma", "a", "a_mode"}.
struct PartitionFile {
  Partition partition;
  std::optional<GnSpec> gn;
};
std::string partition_to_json(const PartitionFile& file);
PartitionFile partition_from_json(const std::string& text);
PartitionFile read_partition_file(const std::string& path);
void write_partition_file(const std::string& path, const PartitionFile& file);
/// "<game>.partition.json"
std::string partition_sidecar_path(const std::string& game_path);

// LCP export: {"n": n, "M": [[...], ...], "q": [...]}
std::string lcp_to_json(const Lcp& lcp);
Lcp lcp_from_json(const std::string& text);

std::string report_to_json(const ConditioningReport& report);
/// n,gamma,kappa_est,kappa_ub,delta,delta_lb,theta_est,theta_lb,cond,pmatrix,seed
std::string report_csv_header();
std::string report_csv_row(const ConditioningReport& report);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tbsg
