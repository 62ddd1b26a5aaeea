#include "itolab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <type_traits>

#include "itolab/error.hpp"
#include "itolab/random.hpp"

namespace itolab {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed_config, what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) malformed(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) malformed(std::string("missing key '") + key + "'");
    return *it;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) malformed(std::string(where) + " must be an object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) malformed(std::string("unknown key '") + key + "' in " + where);
    }
}

// Converts nlohmann type errors into malformed_config with the key path.
template <class T>
T get_as(const Json& j, const std::string& what) {
    // nlohmann converts -3 or 2.5 to an unsigned count without complaint.
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!j.is_number_integer()) malformed(what + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (!j.is_number_unsigned()) malformed(what + ": expected a non-negative integer");
        }
    }
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        malformed(what + ": " + e.what());
    }
}

template <class T>
void read_optional(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = get_as<T>(*it, key);
}

HVector vector_from(const Json& j, const std::string& what) { return HVector(get_as<std::vector<double>>(j, what)); }

Json vector_json(const HVector& x) { return Json(x.values()); }

// Construction errors inside a config are reported as malformed input.
template <class F>
auto building(const char* what, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::malformed_config) throw;
        malformed(std::string(what) + ": " + e.what());
    }
}

} // namespace

SpaceFamily space_family_from_json(const Json& j) {
    reject_unknown(j, {"h_weights", "spaces"}, "space family");
    auto h = get_as<std::vector<double>>(field(j, "h_weights"), "h_weights");
    std::vector<SpaceDescriptor> spaces;
    const Json& list = field(j, "spaces");
    if (!list.is_array()) malformed("'spaces' must be an array");
    for (const auto& s : list) {
        reject_unknown(s, {"kind", "exponent", "weights", "spacing", "edge_weights"}, "space");
        auto kind = get_as<std::string>(field(s, "kind"), "kind");
        double p = get_as<double>(field(s, "exponent"), "exponent");
        auto w = get_as<std::vector<double>>(field(s, "weights"), "weights");
        if (kind == "lp") {
            spaces.push_back(lp_space(p, std::move(w)));
        } else if (kind == "w1p") {
            spaces.push_back(w1p_space(p, std::move(w), get_as<double>(field(s, "spacing"), "spacing"),
                                       get_as<std::vector<double>>(field(s, "edge_weights"), "edge_weights")));
        } else {
            malformed("space kind must be 'lp' or 'w1p', got '" + kind + "'");
        }
    }
    return building("space family", [&] { return SpaceFamily(std::move(h), std::move(spaces)); });
}

Json to_json(const SpaceFamily& S) {
    Json list = Json::array();
    for (const auto& s : S.spaces()) {
        Json e{{"kind", s.kind == SpaceKind::lp ? "lp" : "w1p"}, {"exponent", s.exponent}, {"weights", s.weights}};
        if (s.kind == SpaceKind::w1p) {
            e["spacing"] = s.spacing;
            e["edge_weights"] = s.edge_weights;
        }
        list.push_back(std::move(e));
    }
    return Json{{"h_weights", S.h_weights()}, {"spaces", std::move(list)}};
}

Scenario scenario_from_json(const Json& j) {
    if (j.is_object() && j.contains("random")) {
        reject_unknown(j, {"random"}, "scenario");
        const Json& r = j["random"];
        reject_unknown(r, {"seed", "max_jumps", "max_spaces", "max_dim", "exponents", "min_jump", "with_density",
                           "with_sobolev"},
                       "random scenario");
        RandomScenarioSpec spec;
        read_optional(r, "seed", spec.seed);
        read_optional(r, "max_jumps", spec.max_jumps);
        read_optional(r, "max_spaces", spec.max_spaces);
        read_optional(r, "max_dim", spec.max_dim);
        read_optional(r, "exponents", spec.exponents);
        read_optional(r, "min_jump", spec.min_jump);
        read_optional(r, "with_density", spec.with_density);
        read_optional(r, "with_sobolev", spec.with_sobolev);
        return building("random scenario", [&] { return random_scenario(spec); });
    }
    reject_unknown(j, {"spaces", "driver", "noise", "drifts", "horizon"}, "scenario");
    SpaceFamily spaces = space_family_from_json(field(j, "spaces"));

    const Json& dj = field(j, "driver");
    reject_unknown(dj, {"jumps", "density"}, "driver");
    std::vector<DriverJump> jumps;
    std::vector<DensitySegment> density;
    if (auto it = dj.find("jumps"); it != dj.end()) {
        for (const auto& e : *it) {
            reject_unknown(e, {"time", "size"}, "driver jump");
            jumps.push_back({get_as<double>(field(e, "time"), "time"), get_as<double>(field(e, "size"), "size")});
        }
    }
    if (auto it = dj.find("density"); it != dj.end()) {
        for (const auto& e : *it) {
            reject_unknown(e, {"start", "end", "slope"}, "density segment");
            density.push_back({get_as<double>(field(e, "start"), "start"), get_as<double>(field(e, "end"), "end"),
                               get_as<double>(field(e, "slope"), "slope")});
        }
    }
    auto driver = building("driver", [&] { return IncreasingDriver(std::move(jumps), std::move(density)); });

    const Json& nj = field(j, "noise");
    reject_unknown(nj, {"initial", "events"}, "noise");
    HVector h0 = vector_from(field(nj, "initial"), "noise initial");
    std::vector<double> times;
    std::vector<HVector> values;
    if (auto it = nj.find("events"); it != nj.end()) {
        for (const auto& e : *it) {
            reject_unknown(e, {"time", "value"}, "noise event");
            times.push_back(get_as<double>(field(e, "time"), "time"));
            values.push_back(vector_from(field(e, "value"), "noise value"));
        }
    }
    auto noise = building("noise", [&] { return MartingalePath(std::move(h0), std::move(times), std::move(values)); });

    std::vector<DualStepProcess> drifts;
    const Json& list = field(j, "drifts");
    if (!list.is_array()) malformed("'drifts' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Json& e = list[i];
        reject_unknown(e, {"breaks", "values", "dominators"}, "drift");
        std::vector<double> breaks;
        read_optional(e, "breaks", breaks);
        std::vector<HVector> values;
        for (const auto& v : field(e, "values")) values.push_back(vector_from(v, "drift value"));
        if (auto it = e.find("dominators"); it != e.end()) {
            auto eta = get_as<std::vector<double>>(*it, "dominators");
            drifts.push_back(building("drift", [&] {
                return DualStepProcess(i, std::move(breaks), std::move(values), std::move(eta), spaces);
            }));
        } else {
            drifts.push_back(building("drift", [&] {
                return DualStepProcess::with_default_dominator(i, std::move(breaks), std::move(values), spaces);
            }));
        }
    }
    double horizon = get_as<double>(field(j, "horizon"), "horizon");
    return building("scenario", [&] {
        return Scenario(std::move(spaces), std::move(driver), std::move(noise), std::move(drifts), horizon);
    });
}

Json to_json(const Scenario& S) {
    Json jumps = Json::array();
    for (const auto& jp : S.driver().jumps()) jumps.push_back({{"time", jp.time}, {"size", jp.size}});
    Json density = Json::array();
    for (const auto& seg : S.driver().density()) {
        density.push_back({{"start", seg.start}, {"end", seg.end}, {"slope", seg.slope}});
    }
    Json events = Json::array();
    for (double t : S.noise().event_times()) events.push_back({{"time", t}, {"value", vector_json(S.noise()(t))}});
    Json drifts = Json::array();
    for (const auto& d : S.drifts()) {
        Json values = Json::array();
        for (const auto& v : d.value().values()) values.push_back(vector_json(v));
        auto breaks = d.value().breaks();
        auto eta = d.dominator().values();
        drifts.push_back({{"breaks", std::vector<double>(breaks.begin(), breaks.end())},
                          {"values", std::move(values)},
                          {"dominators", std::vector<double>(eta.begin(), eta.end())}});
    }
    return Json{{"spaces", to_json(S.spaces())},
                {"driver", {{"jumps", std::move(jumps)}, {"density", std::move(density)}}},
                {"noise", {{"initial", vector_json(S.noise().initial())}, {"events", std::move(events)}}},
                {"drifts", std::move(drifts)},
                {"horizon", S.horizon()}};
}

SpdeConfig spde_config_from_json(const Json& j) {
    reject_unknown(j,
                   {"grid", "length", "p1", "p2", "dt", "horizon", "amplitude", "mode", "wiener", "sigma", "jumps",
                    "jump_rate", "marks", "gamma", "blowup_cap", "seed"},
                   "spde config");
    SpdeConfig c;
    read_optional(j, "grid", c.grid);
    read_optional(j, "length", c.length);
    read_optional(j, "p1", c.p1);
    read_optional(j, "p2", c.p2);
    read_optional(j, "dt", c.dt);
    read_optional(j, "horizon", c.horizon);
    read_optional(j, "amplitude", c.amplitude);
    read_optional(j, "mode", c.mode);
    read_optional(j, "wiener", c.wiener);
    read_optional(j, "sigma", c.sigma);
    read_optional(j, "jumps", c.jumps);
    read_optional(j, "jump_rate", c.jump_rate);
    read_optional(j, "marks", c.marks);
    read_optional(j, "gamma", c.gamma);
    read_optional(j, "blowup_cap", c.blowup_cap);
    read_optional(j, "seed", c.seed);
    building("spde config", [&] {
        c.validate();
        return 0;
    });
    return c;
}

Json to_json(const SpdeConfig& c) {
    return Json{{"grid", c.grid},       {"length", c.length},       {"p1", c.p1},         {"p2", c.p2},
                {"dt", c.dt},           {"horizon", c.horizon},     {"amplitude", c.amplitude},
                {"mode", c.mode},       {"wiener", c.wiener},       {"sigma", c.sigma},   {"jumps", c.jumps},
                {"jump_rate", c.jump_rate}, {"marks", c.marks},     {"gamma", c.gamma},
                {"blowup_cap", c.blowup_cap}, {"seed", c.seed}};
}

Json to_json(const EnergyLedger& L) {
    return Json{{"t", L.t},
                {"lhs", L.lhs},
                {"term_h0", L.term_h0},
                {"term_drift", L.term_drift},
                {"term_stoch", L.term_stoch},
                {"term_correction", L.term_correction},
                {"term_qv", L.term_qv},
                {"residual", L.residual}};
}

Json to_json(const IntegrabilityReport& r) {
    return Json{{"state_integral_w1p", r.state_integral_w1p},
                {"state_integral_lp", r.state_integral_lp},
                {"dual_bound_w1p", r.dual_bound_w1p},
                {"dual_bound_lp", r.dual_bound_lp},
                {"cross_integral", r.cross_integral},
                {"ratio_first", r.ratio.empty() ? 0.0 : r.ratio.front()},
                {"ratio_last", r.ratio.empty() ? 0.0 : r.ratio.back()},
                {"hypotheses_finite", r.hypotheses_finite},
                {"gap", r.gap}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) malformed("cannot open config '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        malformed("config '" + path + "' is not valid JSON: " + e.what());
    }
}

std::string format_number(double x) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

void write_ledger_header(std::ostream& os, bool with_seed) {
    if (with_seed) os << "seed,";
    os << "t,lhs,term_h0,term_drift,term_stoch,term_correction,term_qv,residual\n";
}

void write_ledger_row(std::ostream& os, const EnergyLedger& L, const std::string* seed) {
    if (seed) os << *seed << ',';
    os << format_number(L.t) << ',' << format_number(L.lhs) << ',' << format_number(L.term_h0) << ','
       << format_number(L.term_drift) << ',' << format_number(L.term_stoch) << ','
       << format_number(L.term_correction) << ',' << format_number(L.term_qv) << ',' << format_number(L.residual)
       << '\n';
}

void write_correction_csv(std::ostream& os, const CorrectionStudy& study) {
    os << "level,K_n,gap\n";
    for (std::size_t n = 0; n < study.sums.size(); ++n) {
        os << n << ',' << format_number(study.sums[n]) << ',' << format_number(study.gaps[n]) << '\n';
    }
}

void write_step_error_csv(std::ostream& os, std::span<const StepApproximationError> rows) {
    os << "level,i,error,target\n";
    for (const auto& r : rows) os << r.level << ',' << r.space << ',' << format_number(r.error) << ",0\n";
}

void write_spde_csv(std::ostream& os, const SpdeRun& run, std::span<const EnergyLedger> ledgers) {
    os << "t,norm_w1p,norm_lp,lhs,term_h0,term_drift,term_stoch,term_correction,term_qv,residual\n";
    for (std::size_t k = 0; k < ledgers.size() && k < run.times.size(); ++k) {
        const auto& L = ledgers[k];
        os << format_number(run.times[k]) << ',' << format_number(run.norm_w1p[k]) << ','
           << format_number(run.norm_lp[k]) << ',' << format_number(L.lhs) << ',' << format_number(L.term_h0) << ','
           << format_number(L.term_drift) << ',' << format_number(L.term_stoch) << ','
           << format_number(L.term_correction) << ',' << format_number(L.term_qv) << ','
           << format_number(L.residual) << '\n';
    }
}

} // namespace itolab
