#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcplab/instance.hpp"
#include "bcplab/instance_gen.hpp"
#include "bcplab/param_plan.hpp"
#include "bcplab/reductions.hpp"

namespace bcplab {

using Json = nlohmann::json;

namespace detail {
/// Parsers are strict: a serialized set must already satisfy the SparseSet
/// invariants (ascending, duplicate-free, inside the universe).
inline SparseSet set_from_ids(const std::vector<std::uint64_t>& ids, std::uint64_t d) {
    for (std::size_t t = 1; t < ids.size(); ++t)
        if (ids[t] <= ids[t - 1])
            throw ValidationError("set elements must be strictly increasing");
    return make_sparse_set(ids, d);
}
}  // namespace detail

// ---- instance ----

inline Json instance_to_json(const BcpInstance& inst) {
    Json j;
    j["universe"] = inst.universe_size;
    j["red"] = Json::array();
    j["blue"] = Json::array();
    for (const auto& s : inst.red) j["red"].push_back(s.elements);
    for (const auto& s : inst.blue) j["blue"].push_back(s.elements);
    return j;
}

inline BcpInstance instance_from_json(const Json& j) {
    BcpInstance inst;
    inst.universe_size = j.at("universe").get<std::uint64_t>();
    for (const auto& arr : j.at("red"))
        inst.red.push_back(detail::set_from_ids(arr.get<std::vector<std::uint64_t>>(),
                                                inst.universe_size));
    for (const auto& arr : j.at("blue"))
        inst.blue.push_back(detail::set_from_ids(arr.get<std::vector<std::uint64_t>>(),
                                                 inst.universe_size));
    inst.validate();
    return inst;
}

/// Line-text format: header "d n_red n_blue", then one set per line as
/// space-separated ids, red sets first.
inline std::string instance_to_text(const BcpInstance& inst) {
    std::ostringstream out;
    out << inst.universe_size << ' ' << inst.red.size() << ' ' << inst.blue.size() << '\n';
    auto emit = [&](const SparseSet& s) {
        for (std::size_t t = 0; t < s.elements.size(); ++t) {
            if (t) out << ' ';
            out << s.elements[t];
        }
        out << '\n';
    };
    for (const auto& s : inst.red) emit(s);
    for (const auto& s : inst.blue) emit(s);
    return out.str();
}

inline BcpInstance instance_from_text(std::istream& in) {
    std::uint64_t d = 0, nr = 0, nb = 0;
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("missing instance header line");
    {
        std::istringstream hs(header);
        if (!(hs >> d >> nr >> nb)) throw ValidationError("malformed instance header line");
    }
    BcpInstance inst;
    inst.universe_size = d;
    auto read_set = [&]() {
        std::string line;
        if (!std::getline(in, line)) throw ValidationError("truncated instance file");
        std::istringstream ls(line);
        std::vector<std::uint64_t> ids;
        std::uint64_t v;
        while (ls >> v) ids.push_back(v);
        return detail::set_from_ids(ids, d);
    };
    for (std::uint64_t r = 0; r < nr; ++r) inst.red.push_back(read_set());
    for (std::uint64_t b = 0; b < nb; ++b) inst.blue.push_back(read_set());
    inst.validate();
    return inst;
}

// ---- plan ----

inline Json plan_to_json(const ParamPlan& p) {
    Json j;
    j["delta"] = p.delta;
    j["T"] = p.T;
    j["m"] = p.m;
    j["n"] = p.n;
    j["j1"] = p.j1;
    j["j2"] = p.j2;
    j["gamma"] = p.gamma;
    j["gamma_overridden"] = p.gamma_overridden;
    j["i"] = p.i;
    j["alpha"] = p.alpha;
    if (std::isnan(p.epsilon_bound)) j["epsilon_bound"] = nullptr;
    else j["epsilon_bound"] = p.epsilon_bound;
    j["hardness_applies"] = p.hardness_applies;
    j["x2"] = {{"num", numerator(p.x2).str()}, {"den", denominator(p.x2).str()}};
    j["universe_after_g"] = p.universe_after_g;
    j["sample_sizes"] = p.sample_sizes;
    j["sample_cap"] = p.sample_cap;
    j["sample_size_formula"] = p.sample_size_formula;
    j["stage_thresholds"] = {{"j1d", p.stage_thresholds.j1d}, {"j2d", p.stage_thresholds.j2d},
                             {"j1s", p.stage_thresholds.j1s}, {"j2s", p.stage_thresholds.j2s},
                             {"j1a", p.stage_thresholds.j1a}, {"j2a", p.stage_thresholds.j2a},
                             {"j2star", p.stage_thresholds.j2star}};
    j["universe_bound"] = p.universe_bound;
    return j;
}

inline ParamPlan plan_from_json(const Json& j) {
    ParamPlan p;
    p.delta = j.at("delta").get<double>();
    p.T = j.at("T").get<std::uint64_t>();
    p.m = j.at("m").get<std::uint64_t>();
    p.n = j.at("n").get<std::uint64_t>();
    p.j1 = j.at("j1").get<double>();
    p.j2 = j.at("j2").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.gamma_overridden = j.at("gamma_overridden").get<bool>();
    p.i = j.at("i").get<std::uint32_t>();
    p.alpha = j.at("alpha").get<double>();
    p.epsilon_bound = j.at("epsilon_bound").is_null()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : j.at("epsilon_bound").get<double>();
    p.hardness_applies = j.at("hardness_applies").get<bool>();
    p.x2 = Rational(BigInt(j.at("x2").at("num").get<std::string>()),
                    BigInt(j.at("x2").at("den").get<std::string>()));
    p.universe_after_g = j.at("universe_after_g").get<std::uint64_t>();
    p.sample_sizes = j.at("sample_sizes").get<std::vector<std::uint64_t>>();
    p.sample_cap = j.at("sample_cap").get<std::uint64_t>();
    p.sample_size_formula = j.at("sample_size_formula").get<std::string>();
    const Json& st = j.at("stage_thresholds");
    p.stage_thresholds = {st.at("j1d").get<double>(), st.at("j2d").get<double>(),
                          st.at("j1s").get<double>(), st.at("j2s").get<double>(),
                          st.at("j1a").get<double>(), st.at("j2a").get<double>(),
                          st.at("j2star").get<double>()};
    p.universe_bound = j.at("universe_bound").get<double>();
    return p;
}

// ---- trace ----

inline Json trace_to_json(const ReductionTrace& trace) {
    Json stages = Json::array();
    for (const auto& s : trace.stages) {
        Json js;
        js["op_name"] = s.op_name;
        js["params"] = s.params;
        js["universe_before"] = s.universe_before;
        js["universe_after"] = s.universe_after;
        auto put = [&](const char* key, const std::optional<std::pair<double, double>>& th) {
            if (th) js[key] = {{"upper", th->first}, {"lower", th->second}};
            else js[key] = nullptr;
        };
        put("thresholds_before", s.thresholds_before);
        put("thresholds_after", s.thresholds_after);
        stages.push_back(std::move(js));
    }
    return Json{{"stages", std::move(stages)}};
}

// ---- outcome ----

inline Json outcome_to_json(const DecisionOutcome& o) {
    Json j;
    if (o.found) {
        j["found"] = {{"red", o.found->first}, {"blue", o.found->second}};
        j["similarity"] = {{"num", numerator(*o.achieved_similarity).str()},
                           {"den", denominator(*o.achieved_similarity).str()},
                           {"value", to_double(*o.achieved_similarity)}};
    } else {
        j["found"] = nullptr;
    }
    return j;
}

// ---- generator spec ----

inline GenSpec genspec_from_json(const Json& j) {
    GenSpec g;
    std::string kind = j.at("kind").get<std::string>();
    g.n = j.at("n").get<std::uint64_t>();
    g.seed = j.value("seed", 0ULL);
    if (kind == "ov") {
        g.kind = GenSpec::Kind::ov;
        g.m_ov = j.at("m_ov").get<std::uint64_t>();
    } else if (kind == "rubinstein_shape") {
        g.kind = GenSpec::Kind::rubinstein_shape;
        g.T = j.at("T").get<std::uint64_t>();
        g.m = j.at("m").get<std::uint64_t>();
        g.plant = j.value("plant", false);
    } else if (kind == "random") {
        g.kind = GenSpec::Kind::random;
        g.d = j.at("d").get<std::uint64_t>();
        g.size_lo = j.at("size_lo").get<std::uint64_t>();
        g.size_hi = j.at("size_hi").get<std::uint64_t>();
    } else {
        throw ValidationError("unknown generator kind: " + kind);
    }
    return g;
}

// ---- files ----

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

inline void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace bcplab
