#include "divopt/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace divopt {

namespace {

using nlohmann::json;

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        raise(Errc::ConfigError, std::string("missing or non-numeric key '") + key + "'");
    return j[key].get<double>();
}

ClaimDist parse_claim(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        raise(Errc::ConfigError, "claim must be an object with a 'kind' string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "exponential") return ClaimDist::exponential(need_number(j, "rate"));
    if (kind == "piecewise_uniform")
        return ClaimDist::piecewise_uniform(need_number(j, "lo"), need_number(j, "hi"));
    if (kind == "tabulated") {
        if (!j.contains("density") || !j["density"].is_array())
            raise(Errc::ConfigError, "tabulated claim needs a 'density' array");
        std::vector<double> samples;
        for (const auto& v : j["density"]) {
            if (!v.is_number()) raise(Errc::ConfigError, "density samples must be numbers");
            samples.push_back(v.get<double>());
        }
        return ClaimDist::tabulated(need_number(j, "step"), std::move(samples));
    }
    raise(Errc::ConfigError, "unknown claim kind '" + kind + "'");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        raise(Errc::ConfigError, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) raise(Errc::ConfigError, "config root must be an object");

    RunConfig cfg;
    cfg.params.p = need_number(j, "p");
    cfg.params.beta = need_number(j, "beta");
    cfg.params.c = need_number(j, "c");
    cfg.params.r = need_number(j, "r");
    cfg.params.sigma = need_number(j, "sigma");
    validate(cfg.params);

    if (!j.contains("claim")) raise(Errc::ConfigError, "missing 'claim' object");
    cfg.claim = parse_claim(j["claim"]);

    double x_max = 1.5 * cfg.params.p / (cfg.params.c - cfg.params.r);
    double h = 1e-3;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) raise(Errc::ConfigError, "'grid' must be an object");
        if (g.contains("x_max")) x_max = need_number(g, "x_max");
        if (g.contains("h")) h = need_number(g, "h");
    }
    cfg.grid = Grid::make(x_max, h);

    if (j.contains("tol")) {
        const auto& t = j["tol"];
        if (!t.is_object()) raise(Errc::ConfigError, "'tol' must be an object");
        if (t.contains("resid_factor")) cfg.tol.resid_factor = need_number(t, "resid_factor");
        if (t.contains("certify")) cfg.tol.certify = need_number(t, "certify");
        if (t.contains("lambda")) cfg.tol.lambda = need_number(t, "lambda");
        if (t.contains("deriv")) cfg.tol.deriv = need_number(t, "deriv");
    }

    if (j.contains("sim")) {
        const auto& s = j["sim"];
        if (!s.is_object()) raise(Errc::ConfigError, "'sim' must be an object");
        if (s.contains("paths")) cfg.sim.n_paths = (long)need_number(s, "paths");
        if (s.contains("dt")) cfg.sim.dt = need_number(s, "dt");
        if (s.contains("t_max")) cfg.sim.t_max = need_number(s, "t_max");
        if (s.contains("seed")) cfg.sim.seed = (std::uint64_t)need_number(s, "seed");
        if (s.contains("threads")) cfg.sim.threads = (int)need_number(s, "threads");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace divopt
