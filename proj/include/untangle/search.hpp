#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "untangle/moves.hpp"

namespace untangle {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchConfig {
    int max_depth = 12;
    size_t max_states = 2000;
    Discretization discretization;
    double state_key_resolution = 0.05;
    // Progress callback, called with (states, depth) every 100 expansions.
    std::function<void(size_t, int)> progress;
};

struct SearchResult {
    bool found = false;
    MoveScript script;
    size_t states = 0;   // distinct quantized states seen
    int depth = 0;       // deepest level fully or partly expanded
    bool state_limit = false;
};

// Quantized key of rope vertices and piece poses.
std::string state_key(const Scene& s, double resolution);

// Breadth-first search. A rigid step is applied as a macro: the step is
// repeated until the piece has moved about one key resolution, and the
// script records every micro step.
SearchResult search(const Scene& s, const SearchConfig& cfg);

// ---------------------------------------------------------------- fuzz

// Audit names: "word" (Model A), "index" (Model B), "linking" (all pairwise
// linking numbers of the closed components), "legal", "budget".
struct AuditEntry {
    size_t step = 0;
    std::string invariant;
    std::string status;  // "conserved", "skipped", "VIOLATED"
    nlohmann::json value;
};

struct FuzzConfig {
    uint64_t seed = 0;
    size_t steps = 1000;
    std::vector<std::string> audits;
    Discretization discretization;
    size_t max_rejections = 200;
};

struct FuzzReport {
    uint64_t seed = 0;
    size_t steps_attempted = 0;
    size_t steps_applied = 0;
    nlohmann::json initial;
    std::vector<AuditEntry> invariant_audits;
    std::vector<Move> applied;  // not serialized

    size_t count(const std::string& status, const std::string& invariant = "") const;
};

// Discretization the CLI and the harness use by default for a scene.
Discretization default_discretization(const Scene& s);

bool known_audit(const std::string& name);
nlohmann::json audit_value(const Scene& s, const std::string& name);
FuzzReport fuzz(const Scene& s, const FuzzConfig& cfg);
nlohmann::json to_json(const FuzzReport& r);

// Uniform integer in [0, n) by rejection on the raw 64-bit output.
uint64_t uniform_index(std::mt19937_64& g, uint64_t n);

// ---------------------------------------------------------------- replay

struct ReplayResult {
    bool ok = false;
    bool hash_mismatch = false;
    std::optional<size_t> failed_step;
    std::string message;
    Scene final_scene;
    bool goal = false;
};

ReplayResult replay(const Scene& s, const MoveScript& script);

}  // namespace untangle
