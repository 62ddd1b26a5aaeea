#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "itolab/energy.hpp"
#include "itolab/error.hpp"
#include "itolab/io.hpp"
#include "itolab/random.hpp"
#include "itolab/spaces.hpp"
#include "itolab/spde.hpp"

namespace py = pybind11;
using namespace itolab;

namespace {

// Structured results cross the boundary as JSON text; the Python wrapper decodes them.
std::string dump(const Json& j) { return j.dump(); }

Json ledger_list(const std::vector<EnergyLedger>& ledgers) {
    Json out = Json::array();
    for (const auto& L : ledgers) out.push_back(to_json(L));
    return out;
}

PartitionHierarchy partitions(const Scenario& S, int level) {
    if (S.driver().total_mass() > 1.0 + 1e-12) {
        throw Error(ErrorCode::invalid_argument, "driver mass exceeds 1; call normalized() first");
    }
    return PartitionHierarchy(TimeChange(S.driver()), level);
}

Json run_json(const SpdeRun& run) {
    Json states = Json::array();
    for (const auto& u : run.states) states.push_back(u.values());
    return Json{{"config", to_json(run.config)},
                {"times", run.times},
                {"states", std::move(states)},
                {"norm_w1p", run.norm_w1p},
                {"norm_lp", run.norm_lp}};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the itolab package.";

    py::register_exception<Error>(m, "ItolabError", PyExc_ValueError);

    py::class_<SpaceFamily>(m, "SpaceFamily")
        .def_static("from_json", [](const std::string& text) { return space_family_from_json(Json::parse(text)); })
        .def("to_json", [](const SpaceFamily& S) { return dump(to_json(S)); })
        .def_property_readonly("dim", &SpaceFamily::dim)
        .def_property_readonly("count", &SpaceFamily::count)
        .def("v_norm", [](const SpaceFamily& S, const std::vector<double>& x, std::size_t i) {
            return v_norm(HVector(x), i, S);
        })
        .def("dual_norm_lp", [](const SpaceFamily& S, const std::vector<double>& w, std::size_t i) {
            return dual_norm_lp(HVector(w), i, S);
        })
        .def(
            "dual_norm_intersection",
            [](const SpaceFamily& S, const std::vector<double>& w, int resolution) {
                return dual_norm_intersection(HVector(w), S, IntersectionSearch{.resolution = resolution});
            },
            py::arg("w"), py::arg("resolution") = 40);

    py::class_<Scenario>(m, "Scenario")
        .def_static("from_json", [](const std::string& text) { return scenario_from_json(Json::parse(text)); })
        .def_static(
            "random",
            [](std::uint64_t seed, std::size_t max_jumps, bool with_density) {
                return random_scenario(
                    RandomScenarioSpec{.seed = seed, .max_jumps = max_jumps, .with_density = with_density});
            },
            py::arg("seed"), py::arg("max_jumps") = 50, py::arg("with_density") = false)
        .def_static("one_jump", &one_jump_scenario)
        .def_static("mixed_driver", &mixed_driver_scenario)
        .def("to_json", [](const Scenario& S) { return dump(to_json(S)); })
        .def("normalized", &normalize_mass)
        .def("scaled", &scaling_reduce, py::arg("n"))
        .def_property_readonly("horizon", &Scenario::horizon)
        .def_property_readonly("spaces", &Scenario::spaces)
        .def("state", [](const Scenario& S, double t) { return S.state(t).values(); })
        .def("state_left", [](const Scenario& S, double t) { return S.state_left(t).values(); })
        .def("event_times", &Scenario::event_times);

    m.def("energy_ledger", [](const Scenario& S, double t) { return dump(to_json(energy_ledger(S, t))); });
    m.def("energy_ledgers",
          [](const Scenario& S, const std::vector<double>& times) { return dump(ledger_list(energy_ledgers(S, times))); });
    m.def("event_ledgers", [](const Scenario& S) { return dump(ledger_list(event_ledgers(S))); });

    m.def("telescoping_defect", [](const Scenario& S, int level) {
        return telescoping_check(S, partitions(S, level), level).max_relative_defect;
    });
    m.def("correction_study", [](const Scenario& S, double t, int max_level) {
        auto c = correction_study(S, partitions(S, max_level), t, max_level);
        return dump(Json{{"t", c.t}, {"target", c.target}, {"sums", c.sums}, {"gaps", c.gaps}});
    });
    m.def("homogeneity_deviation",
          [](const Scenario& S, double n, double t) { return homogeneity_check(S, n, t).max_ratio_deviation; });

    m.def("euler_run", [](const std::string& config) {
        return dump(run_json(euler_run(spde_config_from_json(Json::parse(config)))));
    });
    m.def("run_ledgers", [](const std::string& config) {
        auto run = euler_run(spde_config_from_json(Json::parse(config)));
        std::vector<double> times(run.times.begin() + 1, run.times.end());
        return dump(ledger_list(energy_ledgers(run.scenario, times)));
    });
    m.def("integrability_report", [](const std::string& config, int first_mode, int last_mode) {
        auto cfg = spde_config_from_json(Json::parse(config));
        auto r = integrability_report(amplitude_ramp_run(cfg, first_mode, last_mode));
        Json j = to_json(r);
        j["times"] = r.times;
        j["cross"] = r.cross;
        j["hypothesis"] = r.hypothesis;
        j["ratio"] = r.ratio;
        return dump(j);
    });
}
