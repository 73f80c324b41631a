#include "untangle/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "untangle/invariants.hpp"

namespace untangle {

using nlohmann::json;

namespace {

void put(std::string& key, double v, double res) {
    int64_t q = std::llround(v / res);
    key.append(reinterpret_cast<const char*>(&q), sizeof q);
}

void put(std::string& key, const Vec3& v, double res) {
    put(key, v.x, res);
    put(key, v.y, res);
    put(key, v.z, res);
}

}  // namespace

std::string state_key(const Scene& s, double resolution) {
    std::string key;
    for (const RigidPiece& p : s.pieces) {
        if (p.segment) {
            put(key, p.segment->a, resolution);
            put(key, p.segment->b, resolution);
        }
        if (p.circle) {
            put(key, p.circle->center, resolution);
            put(key, p.circle->normal, resolution);
        }
    }
    for (const PolyRope& r : s.ropes) {
        key.push_back('|');
        for (const Vec3& v : r.vertices) put(key, v, resolution);
    }
    return key;
}

namespace {

struct Node {
    int parent = -1;
    std::vector<Move> moves;
    int depth = 0;
};

MoveScript script_to(const std::vector<Node>& nodes, int id, const std::string& hash) {
    std::vector<int> chain;
    for (int k = id; k > 0; k = nodes[k].parent) chain.push_back(k);
    MoveScript out;
    out.scene_hash = hash;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        for (const Move& m : nodes[*it].moves) out.moves.push_back(m);
    return out;
}

}  // namespace

SearchResult search(const Scene& s, const SearchConfig& cfg) {
    if (cfg.max_depth <= 0 || cfg.max_states == 0 || !(cfg.state_key_resolution > 0) ||
        !(cfg.discretization.pitch > 0) || !(cfg.discretization.ball > 0))
        throw ConfigError("search bounds must be positive");
    LegalityReport legal = is_legal(s);
    if (!legal.ok) throw IllegalMove("start scene is not legal: " + legal.violations.front().message());

    const std::string hash = scene_hash(s);
    SearchResult res;
    res.script.scene_hash = hash;
    if (goal_reached(s)) {
        res.found = true;
        res.states = 1;
        return res;
    }

    std::vector<Node> nodes{Node{}};
    std::deque<std::pair<Scene, int>> frontier{{s, 0}};
    std::unordered_set<std::string> seen{state_key(s, cfg.state_key_resolution)};
    Discretization ropes_only = cfg.discretization;
    ropes_only.rigid = false;
    size_t expansions = 0;

    auto finish_found = [&](int id) {
        res.found = true;
        res.script = script_to(nodes, id, hash);
        res.states = seen.size();
        ReplayResult check = replay(s, res.script);
        if (!check.ok || !check.goal) throw std::logic_error("search produced a script that does not replay");
        return res;
    };

    while (!frontier.empty()) {
        auto [cur, id] = std::move(frontier.front());
        frontier.pop_front();
        const int depth = nodes[id].depth;
        if (depth >= cfg.max_depth) continue;
        res.depth = std::max(res.depth, depth + 1);
        if (cfg.progress && ++expansions % 100 == 0) cfg.progress(seen.size(), res.depth);

        std::vector<std::pair<Scene, std::vector<Move>>> children;
        for (const Move& m : enumerate_moves(cur, ropes_only)) children.push_back({apply_unchecked(cur, m), {m}});
        if (cfg.discretization.rigid) {
            for (const RigidPiece& p : cur.pieces) {
                if (!p.movable) continue;
                for (const RigidStep& st : rigid_step_set(cur, p)) {
                    int k = std::max(1, static_cast<int>(std::ceil(cfg.state_key_resolution / step_displacement(p, st) - 1e-9)));
                    Scene next = cur;
                    std::vector<Move> micro;
                    for (int i = 0; i < k; ++i) {
                        if (!validate_rigid_step(next, st).ok) break;
                        next = apply_unchecked(next, st);
                        micro.push_back(st);
                    }
                    if (!micro.empty()) children.push_back({std::move(next), std::move(micro)});
                }
            }
        }

        for (auto& [child, moves] : children) {
            if (!seen.insert(state_key(child, cfg.state_key_resolution)).second) continue;
            nodes.push_back({id, std::move(moves), depth + 1});
            const int cid = static_cast<int>(nodes.size()) - 1;
            if (goal_reached(child)) return finish_found(cid);
            if (seen.size() >= cfg.max_states) {
                res.states = seen.size();
                res.state_limit = true;
                return res;
            }
            frontier.push_back({std::move(child), cid});
        }
    }
    res.states = seen.size();
    return res;
}

// ---------------------------------------------------------------- fuzz

uint64_t uniform_index(std::mt19937_64& g, uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const uint64_t floor = (0 - n) % n;  // 2^64 mod n
    uint64_t r;
    do r = g();
    while (r < floor);
    return r % n;
}

size_t FuzzReport::count(const std::string& status, const std::string& invariant) const {
    size_t c = 0;
    for (const AuditEntry& e : invariant_audits)
        if (e.status == status && (invariant.empty() || e.invariant == invariant)) ++c;
    return c;
}

Discretization default_discretization(const Scene& s) {
    // Model C ropes are a few centimetres across; the default grid would
    // almost never land a legal apex.
    if (s.model_tag == "modelC") return {0.02, 0.06, true};
    return {};
}

bool known_audit(const std::string& name) {
    return name == "word" || name == "index" || name == "linking" || name == "legal" || name == "budget";
}

json audit_value(const Scene& s, const std::string& name) {
    if (name == "word") return model_a_word(s).str();
    if (name == "index") return model_b_index(s);
    if (name == "linking") {
        ProjectOptions opt;
        opt.auto_direction = true;
        std::vector<Curve3> curves = scene_curves(s);
        if (curves.size() < 2) throw InvariantUndefined("fewer than two closed components");
        Diagram d = project_diagram(curves, opt);
        json out = json::object();
        for (size_t i = 0; i < curves.size(); ++i)
            for (size_t j = i + 1; j < curves.size(); ++j)
                out[curves[i].id + "|" + curves[j].id] = linking_number(d, static_cast<int>(i), static_cast<int>(j));
        return out;
    }
    if (name == "legal") return is_legal(s).ok;
    if (name == "budget") {
        double worst = -std::numeric_limits<double>::infinity();
        for (const PolyRope& r : s.ropes)
            if (r.length_budget) worst = std::max(worst, r.perimeter() - *r.length_budget);
        if (!std::isfinite(worst)) throw InvariantUndefined("no rope has a length budget");
        return worst;  // perimeter minus budget, worst rope
    }
    throw ConfigError("unknown audit '" + name + "'");
}

namespace {

// Index space of candidate_moves without building it. Collinear apexes stay in
// the space and are rejected at draw time like any invalid move.
class CandidateSpace {
public:
    CandidateSpace(const Scene& s, const Discretization& d) : offsets_(apex_offsets(d)) {
        for (const PolyRope& r : s.ropes) ropes_.push_back(&r);
        std::sort(ropes_.begin(), ropes_.end(), [](auto* a, auto* b) { return a->id < b->id; });
        for (const PolyRope* r : ropes_) {
            size_t inv = r->closed ? r->vertices.size() : r->vertices.size() - 2;
            size_ += r->edge_count() * offsets_.size() + inv;
        }
        if (d.rigid) {
            std::vector<const RigidPiece*> pieces;
            for (const RigidPiece& p : s.pieces)
                if (p.movable) pieces.push_back(&p);
            std::sort(pieces.begin(), pieces.end(), [](auto* a, auto* b) { return a->id < b->id; });
            for (const RigidPiece* p : pieces)
                for (const RigidStep& st : rigid_step_set(s, *p)) rigid_.push_back(st);
        }
        size_ += rigid_.size();
    }

    size_t size() const { return size_; }

    std::optional<Move> at(size_t idx) const {
        for (const PolyRope* r : ropes_) {
            size_t deltas = r->edge_count() * offsets_.size();
            if (idx < deltas) {
                size_t e = idx / offsets_.size();
                SegmentT seg = r->edge(e);
                Vec3 apex = (seg.a + seg.b) * 0.5 + offsets_[idx % offsets_.size()];
                if (!apex_usable(seg, apex)) return std::nullopt;
                return DeltaMove{r->id, e, apex};
            }
            idx -= deltas;
            size_t inv = r->closed ? r->vertices.size() : r->vertices.size() - 2;
            if (idx < inv) return InverseDelta{r->id, r->closed ? idx : idx + 1};
            idx -= inv;
        }
        return rigid_.at(idx);
    }

private:
    std::vector<Vec3> offsets_;
    std::vector<const PolyRope*> ropes_;
    std::vector<RigidStep> rigid_;
    size_t size_ = 0;
};

AuditEntry audit(const Scene& s, size_t step, const std::string& name, const json& initial) {
    AuditEntry e{step, name, "skipped", nullptr};
    try {
        e.value = audit_value(s, name);
    } catch (const InvariantUndefined&) {
        return e;
    } catch (const DegenerateCrossing&) {
        return e;
    } catch (const GenericityError&) {
        return e;
    }
    if (name == "legal") {
        e.status = e.value.get<bool>() ? "conserved" : "VIOLATED";
    } else if (name == "budget") {
        e.status = e.value.get<double>() <= 1e-12 ? "conserved" : "VIOLATED";
    } else if (initial.is_null()) {
        e.status = "skipped";
    } else {
        e.status = e.value == initial ? "conserved" : "VIOLATED";
    }
    return e;
}

}  // namespace

FuzzReport fuzz(const Scene& s, const FuzzConfig& cfg) {
    for (const std::string& a : cfg.audits)
        if (!known_audit(a)) throw ConfigError("unknown audit '" + a + "'");
    LegalityReport legal = is_legal(s);
    if (!legal.ok) throw IllegalMove("start scene is not legal: " + legal.violations.front().message());

    FuzzReport rep;
    rep.seed = cfg.seed;
    rep.initial = json::object();
    for (const std::string& a : cfg.audits) {
        json v = nullptr;
        try {
            v = audit_value(s, a);
        } catch (const InvariantUndefined&) {
        } catch (const DegenerateCrossing&) {
        } catch (const GenericityError&) {
        }
        rep.initial[a] = v;
    }

    std::mt19937_64 g(cfg.seed);
    Scene cur = s;
    for (size_t step = 1; step <= cfg.steps; ++step) {
        ++rep.steps_attempted;
        CandidateSpace space(cur, cfg.discretization);
        std::optional<Move> chosen;
        if (space.size() > 0) {
            for (size_t r = 0; r < cfg.max_rejections && !chosen; ++r) {
                std::optional<Move> m = space.at(uniform_index(g, space.size()));
                if (m && validate_move(cur, *m).ok) chosen = m;
            }
            if (!chosen) {
                std::vector<Move> valid = enumerate_moves(cur, cfg.discretization);
                if (!valid.empty()) chosen = valid[uniform_index(g, valid.size())];
            }
        }
        if (chosen) {
            cur = apply_unchecked(cur, *chosen);
            ++rep.steps_applied;
            rep.applied.push_back(*chosen);
        }
        for (const std::string& a : cfg.audits) rep.invariant_audits.push_back(audit(cur, step, a, rep.initial[a]));
    }
    return rep;
}

json to_json(const FuzzReport& r) {
    json audits = json::array();
    for (const AuditEntry& e : r.invariant_audits)
        audits.push_back({{"step", e.step}, {"invariant", e.invariant}, {"status", e.status}, {"value", e.value}});
    return {{"version", 1},
            {"seed", r.seed},
            {"steps_attempted", r.steps_attempted},
            {"steps_applied", r.steps_applied},
            {"initial", r.initial},
            {"summary",
             {{"conserved", r.count("conserved")}, {"skipped", r.count("skipped")}, {"violated", r.count("VIOLATED")}}},
            {"invariant_audits", audits}};
}

// ---------------------------------------------------------------- replay

ReplayResult replay(const Scene& s, const MoveScript& script) {
    ReplayResult out;
    out.final_scene = s;
    if (script.scene_hash != scene_hash(s)) {
        out.hash_mismatch = true;
        out.message = "hash mismatch: script expects " + script.scene_hash + ", scene is " + scene_hash(s);
        return out;
    }
    for (size_t i = 0; i < script.moves.size(); ++i) {
        MoveCheck c;
        try {
            c = validate_move(out.final_scene, script.moves[i]);
        } catch (const MoveError& e) {
            c.ok = false;
            c.violations.push_back({"move", "", 0, e.what()});
        }
        if (!c.ok) {
            out.failed_step = i;
            out.message = "step " + std::to_string(i) + ": " + c.message();
            return out;
        }
        out.final_scene = apply_unchecked(out.final_scene, script.moves[i]);
    }
    out.ok = true;
    out.goal = goal_reached(out.final_scene);
    return out;
}

}  // namespace untangle
