#include "batsv2x/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace batsv2x::harness {

void SimConfig::validate() const {
    if (f < 1) throw ValidationError("F must be at least 1");
    if (ell < 1) throw ValidationError("ell_bytes must be positive");
    if (!(rate_bps > 0)) throw ValidationError("rate_bps must be positive");
    if (m < 1 || m > 32) throw ValidationError("M must lie in 1..32");
    if (!(dt_max_us > 0)) throw ValidationError("dt_max_us must be positive");
    if (trials < 1) throw ValidationError("trials must be positive");
    chan.validate();
    geo.validate();
    group.validate();
}

namespace {

using Setter = std::function<void(SimConfig&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("field '" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    long l = (long)d;
    if ((double)l != d) throw ValidationError("field '" + key + "' expects an integer, got '" + v + "'");
    return l;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> s = {
        {"F", [](SimConfig& c, const std::string& v) { c.f = to_long("F", v); }},
        {"ell_bytes", [](SimConfig& c, const std::string& v) { c.ell = (int)to_long("ell_bytes", v); }},
        {"rate_bps", [](SimConfig& c, const std::string& v) { c.rate_bps = to_double("rate_bps", v); }},
        {"M", [](SimConfig& c, const std::string& v) { c.m = (int)to_long("M", v); }},
        {"dt_max_us", [](SimConfig& c, const std::string& v) { c.dt_max_us = to_double("dt_max_us", v); }},
        {"pt_dbm", [](SimConfig& c, const std::string& v) { c.chan.pt_dbm = to_double("pt_dbm", v); }},
        {"pt_v2v_dbm", [](SimConfig& c, const std::string& v) { c.chan.pt_v2v_dbm = to_double("pt_v2v_dbm", v); }},
        {"pn_dbm", [](SimConfig& c, const std::string& v) { c.chan.pn_dbm = to_double("pn_dbm", v); }},
        {"gamma_th_db", [](SimConfig& c, const std::string& v) { c.chan.gamma_th_db = to_double("gamma_th_db", v); }},
        {"freq_hz", [](SimConfig& c, const std::string& v) { c.chan.freq_hz = to_double("freq_hz", v); }},
        {"d0_m", [](SimConfig& c, const std::string& v) { c.chan.d0_m = to_double("d0_m", v); }},
        {"dc_m", [](SimConfig& c, const std::string& v) { c.chan.dc_m = to_double("dc_m", v); }},
        {"beta1", [](SimConfig& c, const std::string& v) { c.chan.beta1 = to_double("beta1", v); }},
        {"beta2", [](SimConfig& c, const std::string& v) { c.chan.beta2 = to_double("beta2", v); }},
        {"m1", [](SimConfig& c, const std::string& v) { c.chan.m1 = to_double("m1", v); }},
        {"m2_near", [](SimConfig& c, const std::string& v) { c.chan.m2_near = to_double("m2_near", v); }},
        {"m2_far", [](SimConfig& c, const std::string& v) { c.chan.m2_far = to_double("m2_far", v); }},
        {"m2_switch_m", [](SimConfig& c, const std::string& v) { c.chan.v2v_m2_switch_m = to_double("m2_switch_m", v); }},
        {"omega", [](SimConfig& c, const std::string& v) { c.chan.omega = to_double("omega", v); }},
        {"rsu_lateral_m", [](SimConfig& c, const std::string& v) { c.geo.rsu_lateral_m = to_double("rsu_lateral_m", v); }},
        {"rsu_height_m", [](SimConfig& c, const std::string& v) { c.geo.rsu_height_m = to_double("rsu_height_m", v); }},
        {"veh_height_m", [](SimConfig& c, const std::string& v) { c.geo.veh_height_m = to_double("veh_height_m", v); }},
        {"lane_width_m", [](SimConfig& c, const std::string& v) { c.geo.lane_width_m = to_double("lane_width_m", v); }},
        {"comm_range_m", [](SimConfig& c, const std::string& v) { c.geo.comm_range_m = to_double("comm_range_m", v); }},
        {"k", [](SimConfig& c, const std::string& v) { c.group.k = (int)to_long("k", v); }},
        {"v_mean_kmh", [](SimConfig& c, const std::string& v) { c.group.v_mean_kmh = to_double("v_mean_kmh", v); }},
        {"v_jitter_kmh", [](SimConfig& c, const std::string& v) { c.group.v_jitter_kmh = to_double("v_jitter_kmh", v); }},
        {"gap_min_m", [](SimConfig& c, const std::string& v) { c.group.gap_min_m = to_double("gap_min_m", v); }},
        {"gap_max_m", [](SimConfig& c, const std::string& v) { c.group.gap_max_m = to_double("gap_max_m", v); }},
        {"seed", [](SimConfig& c, const std::string& v) { c.seed = (uint64_t)to_long("seed", v); }},
        {"trials", [](SimConfig& c, const std::string& v) { c.trials = (int)to_long("trials", v); }},
        {"experiment", [](SimConfig& c, const std::string& v) { c.experiment = v; }},
        {"trace", [](SimConfig& c, const std::string& v) {
             if (v == "true" || v == "1") c.trace = true;
             else if (v == "false" || v == "0") c.trace = false;
             else throw ValidationError("field 'trace' expects true/false");
         }},
    };
    return s;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end())
            throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, val);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace batsv2x::harness
