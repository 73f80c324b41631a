// JSON strings cross the boundary; the Python package decodes them.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "untangle/export.hpp"
#include "untangle/invariants.hpp"
#include "untangle/search.hpp"

namespace py = pybind11;
using namespace untangle;

namespace {

Diagram project(const std::vector<Curve3>& curves, uint64_t seed) {
    ProjectOptions o;
    o.auto_direction = true;
    o.seed = seed;
    return project_diagram(curves, o);
}

}  // namespace

PYBIND11_MODULE(_untangle, m) {
    m.doc() = "Rigid-piece and rope puzzle engine";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InvariantUndefined>(m, "InvariantUndefined", PyExc_RuntimeError);
    py::register_exception<GenericityError>(m, "GenericityError", PyExc_RuntimeError);
    py::register_exception<MoveError>(m, "MoveError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("model_a", [](double r) { return serialize(build_model_a(r)); }, py::arg("r"));
    m.def("model_b", [](double rl, double rr, double rh, double slack) { return serialize(build_model_b(rl, rr, rh, slack)); },
          py::arg("r_left") = 1.0, py::arg("r_right") = 1.0, py::arg("r_hoop") = 1.0, py::arg("slack") = 0.5);
    m.def("model_c", [](double rh, double tube, double len) { return serialize(build_model_c(rh, tube, len)); },
          py::arg("r_hoop") = 1.0, py::arg("tube") = 0.05, py::arg("rope_length") = 1.0);

    m.def("scene_hash", [](const std::string& s) { return scene_hash(parse_scene(s)); });
    m.def("is_legal", [](const std::string& s) {
        LegalityReport r = is_legal(parse_scene(s));
        std::vector<std::string> msgs;
        for (const Violation& v : r.violations) msgs.push_back(v.message());
        return py::make_tuple(r.ok, msgs);
    });
    m.def("goal_reached", [](const std::string& s) { return goal_reached(parse_scene(s)); });

    m.def("word", [](const std::string& s) { return model_a_word(parse_scene(s)).str(); });
    m.def("index", [](const std::string& s) { return model_b_index(parse_scene(s)); });
    m.def("linking", [](const std::string& s, uint64_t seed) {
        std::vector<Curve3> c = scene_curves(parse_scene(s));
        Diagram d = project(c, seed);
        std::vector<std::tuple<std::string, std::string, int>> out;
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = i + 1; j < c.size(); ++j)
                out.emplace_back(c[i].id, c[j].id, linking_number(d, static_cast<int>(i), static_cast<int>(j)));
        return out;
    }, py::arg("scene"), py::arg("seed") = 0);
    m.def("tricolor", [](const std::string& s, bool band_sum, uint64_t seed) {
        Scene sc = parse_scene(s);
        return tricolor_count(project(band_sum ? model_c_band_curves(sc) : scene_curves(sc), seed));
    }, py::arg("scene"), py::arg("band_sum") = false, py::arg("seed") = 0);

    m.def("fuzz", [](const std::string& s, uint64_t seed, size_t steps, const std::vector<std::string>& audits) {
        Scene sc = parse_scene(s);
        FuzzConfig cfg;
        cfg.seed = seed;
        cfg.steps = steps;
        cfg.audits = audits;
        cfg.discretization = default_discretization(sc);
        py::gil_scoped_release nogil;
        return to_json(fuzz(sc, cfg)).dump();
    }, py::arg("scene"), py::arg("seed") = 0, py::arg("steps") = 100, py::arg("audits") = std::vector<std::string>{"legal"});

    m.def("search", [](const std::string& s, int max_depth, size_t max_states) {
        Scene sc = parse_scene(s);
        SearchConfig cfg;
        cfg.max_depth = max_depth;
        cfg.max_states = max_states;
        cfg.discretization = default_discretization(sc);
        SearchResult r;
        {
            py::gil_scoped_release nogil;
            r = search(sc, cfg);
        }
        nlohmann::json j{{"found", r.found}, {"states", r.states}, {"depth", r.depth}, {"state_limit", r.state_limit}};
        j["script"] = r.found ? to_json(r.script) : nlohmann::json(nullptr);
        return j.dump();
    }, py::arg("scene"), py::arg("max_depth") = 12, py::arg("max_states") = 2000);

    m.def("replay", [](const std::string& s, const std::string& script) {
        ReplayResult r = replay(parse_scene(s), script_from_json(nlohmann::json::parse(script)));
        nlohmann::json j{{"ok", r.ok}, {"goal", r.goal}, {"message", r.message}, {"hash_mismatch", r.hash_mismatch}};
        j["failed_step"] = r.failed_step ? nlohmann::json(*r.failed_step) : nlohmann::json(nullptr);
        if (r.ok) j["final_scene"] = to_json(r.final_scene);
        return j.dump();
    });

    m.def("export_svg", [](const std::string& s, uint64_t seed) {
        ExportOptions o;
        o.seed = seed;
        return export_svg(parse_scene(s), o);
    }, py::arg("scene"), py::arg("seed") = 0);
    m.def("export_obj", [](const std::string& s) { return export_obj(parse_scene(s)); });
}
