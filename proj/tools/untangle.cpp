// untangle: build puzzle scenes, compute invariants, fuzz, search, replay and export.
//
// Exit codes: 0 success, 1 invariant violation / illegal scene / failed replay,
// 2 usage or parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "untangle/export.hpp"
#include "untangle/invariants.hpp"
#include "untangle/search.hpp"

using namespace untangle;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Vec3 parse_vec(const std::string& s) {
    Vec3 v;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',' || !in.eof())
        throw UsageError("expected x,y,z, got '" + s + "'");
    return v;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

Scene legal_scene(const std::string& path) {
    Scene s = load_scene(path);
    LegalityReport rep = is_legal(s);
    if (!rep.ok) throw IllegalMove("scene is not legal: " + rep.violations.front().message());
    return s;
}

// ---------------------------------------------------------------- scene

struct SceneArgs {
    std::string model, out;
    double r = 1.5;
    double r_left = 1, r_right = 1, r_hoop = 1, slack = 0.5;
    double tube = 0.05, rope_length = 1.0;
};

int cmd_scene(const SceneArgs& a) {
    Scene s;
    if (a.model == "modelA")
        s = build_model_a(a.r);
    else if (a.model == "modelB")
        s = build_model_b(a.r_left, a.r_right, a.r_hoop, a.slack);
    else
        s = build_model_c(a.r_hoop, a.tube, a.rope_length);
    write_text(a.out, to_json(s).dump(2) + "\n");
    std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
    if (s.regime_tags.empty()) log << "no regime tags\n";
    for (const std::string& t : s.regime_tags) log << t << "\n";
    return kOk;
}

// ---------------------------------------------------------------- invariant

struct InvariantArgs {
    std::string kind, scene, band_sum, direction;
    uint64_t seed = 0;
};

Diagram diagram_for(const std::vector<Curve3>& curves, const InvariantArgs& a) {
    ProjectOptions opt;
    opt.seed = a.seed;
    if (a.direction.empty()) {
        opt.auto_direction = true;
    } else {
        opt.direction = parse_vec(a.direction);
    }
    return project_diagram(curves, opt);
}

int cmd_invariant(const InvariantArgs& a) {
    Scene s = legal_scene(a.scene);
    if (a.kind == "word") {
        std::cout << "word: " << model_a_word(s).str() << "\n";
    } else if (a.kind == "index") {
        std::cout << "index: " << model_b_index(s) << "\n";
    } else if (a.kind == "linking") {
        std::vector<Curve3> curves = scene_curves(s);
        if (curves.size() < 2) throw InvariantUndefined("the scene has fewer than two closed components");
        Diagram d = diagram_for(curves, a);
        for (size_t i = 0; i < curves.size(); ++i)
            for (size_t j = i + 1; j < curves.size(); ++j)
                std::cout << "linking " << curves[i].id << " " << curves[j].id << ": "
                          << linking_number(d, static_cast<int>(i), static_cast<int>(j)) << "\n";
    } else {
        std::vector<Curve3> curves;
        if (a.band_sum == "canonical")
            curves = model_c_band_curves(s);
        else if (a.band_sum.empty())
            curves = scene_curves(s);
        else
            throw UsageError("unknown band-sum site '" + a.band_sum + "'");
        if (curves.empty()) throw InvariantUndefined("the scene has no closed components");
        Diagram d = diagram_for(curves, a);
        uint64_t n = tricolor_count(d);
        std::cout << "count: " << n << ", tricolorable: " << (n > 3 ? "true" : "false") << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------- fuzz

struct FuzzArgs {
    std::string scene, out;
    size_t steps = 1000;
    uint64_t seed = 0;
    std::vector<std::string> audits;
    double pitch = 0, ball = 0;
    bool no_rigid = false;
};

Discretization discretization_for(const Scene& s, double pitch, double ball, bool no_rigid) {
    Discretization d = default_discretization(s);
    if (pitch > 0) d.pitch = pitch;
    if (ball > 0) d.ball = ball;
    if (no_rigid) d.rigid = false;
    return d;
}

std::vector<std::string> default_audits(const Scene& s) {
    if (s.model_tag == "modelA") return {"word", "legal"};
    if (s.model_tag == "modelB") return {"index", "legal"};
    if (s.model_tag == "modelC") return {"linking", "budget", "legal"};
    return {"legal"};
}

int cmd_fuzz(const FuzzArgs& a) {
    Scene s = legal_scene(a.scene);
    FuzzConfig cfg;
    cfg.seed = a.seed;
    cfg.steps = a.steps;
    cfg.audits = a.audits.empty() ? default_audits(s) : a.audits;
    for (const std::string& name : cfg.audits)
        if (!known_audit(name)) throw UsageError("unknown audit '" + name + "'");
    cfg.discretization = discretization_for(s, a.pitch, a.ball, a.no_rigid);
    FuzzReport rep = fuzz(s, cfg);
    write_text(a.out, to_json(rep).dump() + "\n");
    std::cerr << "fuzz: " << rep.steps_applied << "/" << rep.steps_attempted << " steps applied, "
              << rep.count("conserved") << " conserved, " << rep.count("skipped") << " skipped, "
              << rep.count("VIOLATED") << " violated\n";
    return rep.count("VIOLATED") > 0 ? kFail : kOk;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
    std::string scene, out;
    int max_depth = 12;
    size_t max_states = 2000;
    double resolution = 0.05, pitch = 0, ball = 0;
    bool no_rigid = false, quiet = false;
};

SearchResult run_search(const Scene& s, const SearchArgs& a) {
    SearchConfig cfg;
    cfg.max_depth = a.max_depth;
    cfg.max_states = a.max_states;
    cfg.state_key_resolution = a.resolution;
    cfg.discretization = discretization_for(s, a.pitch, a.ball, a.no_rigid);
    if (!a.quiet)
        cfg.progress = [](size_t states, int depth) {
            std::cerr << "search: " << states << " states, depth " << depth << "\n";
        };
    return search(s, cfg);
}

int cmd_search(const SearchArgs& a) {
    Scene s = legal_scene(a.scene);
    SearchResult r = run_search(s, a);
    if (r.found) {
        if (!a.out.empty()) save_script(r.script, a.out);
        std::cout << "found: " << r.script.moves.size() << " moves, " << r.states << " states\n";
    } else {
        std::cout << "exhausted: " << r.states << " states, depth " << r.depth
                  << (r.state_limit ? " (state limit)" : "") << "; a search bound, not a proof\n";
    }
    return kOk;
}

// ---------------------------------------------------------------- replay

int cmd_replay(const std::string& scene_path, const std::string& script_path) {
    Scene s = load_scene(scene_path);
    MoveScript script = load_script(script_path);
    ReplayResult r = replay(s, script);
    if (!r.ok) {
        std::cout << "replay: failed\n" << r.message << "\n";
        return kFail;
    }
    std::cout << "replay: ok, " << script.moves.size() << " moves\n";
    std::cout << "goal: " << (r.goal ? "reached" : "not reached") << "\n";
    return kOk;
}

// ---------------------------------------------------------------- export

struct ExportArgs {
    std::string scene, format, out, direction;
    bool no_retry = false;
    uint64_t seed = 0;
};

int cmd_export(const ExportArgs& a) {
    Scene s = load_scene(a.scene);
    ExportOptions opt;
    if (!a.direction.empty()) opt.direction = parse_vec(a.direction);
    opt.auto_retry = !a.no_retry;
    opt.seed = a.seed;
    write_text(a.out, a.format == "svg" ? export_svg(s, opt) : export_obj(s, opt));
    return kOk;
}

// ---------------------------------------------------------------- experiment

struct ScanArgs {
    double from = 0.5, to = 3.5, step = 0.25, r_hoop = 1, tube = 0.05;
    int max_depth = 4;
    size_t max_states = 200;
    std::string out;
};

int cmd_length_scan(const ScanArgs& a) {
    if (!(a.step > 0) || a.to < a.from) throw UsageError("need step > 0 and to >= from");
    std::ostringstream csv;
    csv << "length,outcome,states\n";
    const int n = static_cast<int>(std::floor((a.to - a.from) / a.step + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double len = a.from + i * a.step;
        std::string outcome;
        size_t states = 0;
        try {
            Scene s = build_model_c(a.r_hoop, a.tube, len);
            SearchArgs sa;
            sa.max_depth = a.max_depth;
            sa.max_states = a.max_states;
            sa.quiet = true;
            SearchResult r = run_search(s, sa);
            outcome = r.found ? "solved" : "exhausted";
            states = r.states;
        } catch (const ParameterError&) {
            outcome = "infeasible";
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", len);
        csv << buf << "," << outcome << "," << states << "\n";
        std::cerr << "length " << buf << ": " << outcome << "\n";
    }
    write_text(a.out, csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disentanglement puzzle engine: scenes, moves, invariants, search"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    SceneArgs sc;
    auto* scene = app.add_subcommand("scene", "Build a model scene and write it as JSON");
    scene->add_option("model", sc.model, "modelA, modelB or modelC")->required()->check(CLI::IsMember({"modelA", "modelB", "modelC"}));
    scene->add_option("--r", sc.r, "Model A hoop radius, 0 < r < 2");
    scene->add_option("--r-left", sc.r_left, "Model B left end radius");
    scene->add_option("--r-right", sc.r_right, "Model B right end radius");
    scene->add_option("--r-hoop", sc.r_hoop, "Model B/C hoop radius");
    scene->add_option("--slack", sc.slack, "Model B rope slack");
    scene->add_option("--tube", sc.tube, "Model C hoop tube radius");
    scene->add_option("--rope-length", sc.rope_length, "Model C rope length budget");
    scene->add_option("-o,--out", sc.out, "Output file (default: stdout)");

    InvariantArgs inv;
    auto* invariant = app.add_subcommand("invariant", "Print an invariant of a scene");
    invariant->add_option("kind", inv.kind, "word, index, linking or tricolor")->required()->check(CLI::IsMember({"word", "index", "linking", "tricolor"}));
    invariant->add_option("scene", inv.scene, "Scene JSON")->required();
    invariant->add_option("--band-sum", inv.band_sum, "Band-sum site for tricolor (canonical)");
    invariant->add_option("--direction", inv.direction, "Projection direction x,y,z (default: seeded random)");
    invariant->add_option("--seed", inv.seed, "Seed for random projection directions");

    FuzzArgs fz;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Apply random legal moves and audit invariants");
    fuzz_cmd->add_option("scene", fz.scene, "Scene JSON")->required();
    fuzz_cmd->add_option("--steps", fz.steps, "Number of steps");
    fuzz_cmd->add_option("--seed", fz.seed, "Generator seed");
    fuzz_cmd->add_option("--audit", fz.audits, "word, index, linking, legal or budget (repeatable)");
    fuzz_cmd->add_option("--pitch", fz.pitch, "Apex grid pitch (default per model)");
    fuzz_cmd->add_option("--ball", fz.ball, "Apex grid radius (default per model)");
    fuzz_cmd->add_flag("--no-rigid", fz.no_rigid, "Rope moves only");
    fuzz_cmd->add_option("-o,--out", fz.out, "Report file (default: stdout)");

    SearchArgs se;
    auto* search_cmd = app.add_subcommand("search", "Bounded breadth-first search for the goal");
    search_cmd->add_option("scene", se.scene, "Scene JSON")->required();
    search_cmd->add_option("--max-depth", se.max_depth, "Depth bound");
    search_cmd->add_option("--max-states", se.max_states, "Distinct state bound");
    search_cmd->add_option("--resolution", se.resolution, "State key quantization");
    search_cmd->add_option("--pitch", se.pitch, "Apex grid pitch (default per model)");
    search_cmd->add_option("--ball", se.ball, "Apex grid radius (default per model)");
    search_cmd->add_flag("--no-rigid", se.no_rigid, "Rope moves only");
    search_cmd->add_flag("-q,--quiet", se.quiet, "No progress lines");
    search_cmd->add_option("-o,--out", se.out, "Script file for a found solution");

    std::string rp_scene, rp_script;
    auto* replay_cmd = app.add_subcommand("replay", "Validate and apply a move script");
    replay_cmd->add_option("scene", rp_scene, "Scene JSON")->required();
    replay_cmd->add_option("script", rp_script, "Move script JSON")->required();

    ExportArgs ex;
    auto* export_cmd = app.add_subcommand("export", "Write an SVG drawing or an OBJ mesh");
    export_cmd->add_option("scene", ex.scene, "Scene JSON")->required();
    export_cmd->add_option("--format", ex.format, "svg or obj")->required()->check(CLI::IsMember({"svg", "obj"}));
    export_cmd->add_option("--direction", ex.direction, "Projection direction x,y,z for svg");
    export_cmd->add_flag("--no-retry", ex.no_retry, "Fail instead of trying other directions");
    export_cmd->add_option("--seed", ex.seed, "Seed for retry directions");
    export_cmd->add_option("-o,--out", ex.out, "Output file (default: stdout)");

    ScanArgs sa;
    auto* experiment = app.add_subcommand("experiment", "Exploratory runs");
    auto* scan = experiment->add_subcommand(
        "modelC-length-scan",
        "Bounded search per Model C rope length. CSV columns: length, outcome (solved | exhausted | "
        "infeasible), states (distinct states explored)");
    experiment->require_subcommand(1);
    scan->add_option("--from", sa.from, "First rope length");
    scan->add_option("--to", sa.to, "Last rope length");
    scan->add_option("--step", sa.step, "Length increment");
    scan->add_option("--r-hoop", sa.r_hoop, "Hoop radius");
    scan->add_option("--tube", sa.tube, "Tube radius");
    scan->add_option("--max-depth", sa.max_depth, "Search depth bound per length");
    scan->add_option("--max-states", sa.max_states, "Search state bound per length");
    scan->add_option("-o,--out", sa.out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*scene) return cmd_scene(sc);
        if (*invariant) return cmd_invariant(inv);
        if (*fuzz_cmd) return cmd_fuzz(fz);
        if (*search_cmd) return cmd_search(se);
        if (*replay_cmd) return cmd_replay(rp_scene, rp_script);
        if (*export_cmd) return cmd_export(ex);
        if (*scan) return cmd_length_scan(sa);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kUsage;
    } catch (const GenericityError& e) {
        std::cerr << "genericity error: " << e.what() << "\n";
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
