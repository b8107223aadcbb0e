#include "rsb/cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rsb/core/disorder.hpp"
#include "rsb/core/error.hpp"

namespace rsb::cli {

namespace {

const std::set<std::string> kCommands = {"ed-check", "trotter-scan", "mc-run", "fkg-check",
                                         "bound-check", "gg-check", "scan"};

const std::map<std::string, std::set<std::string>> kSchema = {
    {"run", {"command", "out", "workers"}},
    {"model", {"beta", "J1", "J3", "c", "b1", "b3", "d", "L", "M"}},
    {"ensemble", {"count", "master_seed"}},
    {"mc", {"replicas", "sweeps", "thermalization", "interval"}},
    {"caps", {"dim_cap", "enum_bits"}},
    {"trotter", {"m_list"}},
    {"scan", {"target", "l_list"}},
    {"gg", {"n", "component", "trivial"}},
    {"fkg", {"modes"}},
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected unsigned integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_csv(v)) out.push_back(static_cast<int>(to_int(key, s)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

} // namespace

void RunConfig::validate() const {
    if (!kCommands.count(command)) throw ConfigError("unknown command '" + command + "'");
    params.validate();
    if (ensemble.count < 1) throw ConfigError("ensemble count must be >= 1");
    if (mc.replicas < 2) throw ConfigError("mc replicas must be >= 2");
    if (mc.sweeps < 1) throw ConfigError("mc sweeps must be >= 1");
    if (mc.interval < 1) throw ConfigError("mc interval must be >= 1");
    if (caps.dim_cap < 2) throw ConfigError("dim_cap must be >= 2");
    if (caps.enum_bits < 1 || caps.enum_bits > 30) throw ConfigError("enum_bits out of range");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (out_dir.empty()) throw ConfigError("output directory must not be empty");
    if (command == "scan") scan_target_check();
    if (gg_n != 2 && gg_n != 3) throw ConfigError("gg n must be 2 or 3");
    if (gg_component != 1 && gg_component != 3) throw ConfigError("gg component must be 1 or 3");
    for (const auto& m : fkg_modes)
        if (m != "truncated_pair" && m != "monotonicity_classical" && m != "monotonicity_spectral")
            throw ConfigError("unknown fkg mode '" + m + "'");
    for (int m : m_list)
        if (m < 1) throw ConfigError("trotter m_list entries must be >= 1");
    for (int l : l_list)
        if (l < 1) throw ConfigError("scan l_list entries must be >= 1");
}

void RunConfig::scan_target_check() const {
    if (scan_target != "psi" && scan_target != "mu3" && scan_target != "overlap_total" &&
        scan_target != "overlap_gibbs_part")
        throw ConfigError("unknown scan target '" + scan_target + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (!kSchema.count(section))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": key outside any section");
        if (!kSchema.at(section).count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "' in section [" + section + "]");
        const std::string qual = section + "." + key;

        if (section == "run") {
            if (key == "command") cfg.command = val;
            else if (key == "out") cfg.out_dir = val;
            else cfg.workers = static_cast<int>(to_int(qual, val));
        } else if (section == "model") {
            if (key == "beta") cfg.params.beta = to_double(qual, val);
            else if (key == "J1") cfg.params.J1 = to_double(qual, val);
            else if (key == "J3") cfg.params.J3 = to_double(qual, val);
            else if (key == "c") cfg.params.c = to_double(qual, val);
            else if (key == "b1") cfg.params.b1 = to_double(qual, val);
            else if (key == "b3") cfg.params.b3 = to_double(qual, val);
            else if (key == "d") cfg.params.d = static_cast<int>(to_int(qual, val));
            else if (key == "L") cfg.params.L = static_cast<int>(to_int(qual, val));
            else cfg.params.M = static_cast<int>(to_int(qual, val));
        } else if (section == "ensemble") {
            if (key == "count") cfg.ensemble.count = static_cast<int>(to_int(qual, val));
            else cfg.ensemble.master_seed = to_u64(qual, val);
        } else if (section == "mc") {
            if (key == "replicas") cfg.mc.replicas = static_cast<int>(to_int(qual, val));
            else if (key == "sweeps") cfg.mc.sweeps = to_int(qual, val);
            else if (key == "thermalization") cfg.mc.thermalization = to_int(qual, val);
            else cfg.mc.interval = static_cast<int>(to_int(qual, val));
        } else if (section == "caps") {
            if (key == "dim_cap") cfg.caps.dim_cap = to_int(qual, val);
            else cfg.caps.enum_bits = static_cast<int>(to_int(qual, val));
        } else if (section == "trotter") {
            cfg.m_list = to_int_list(qual, val);
        } else if (section == "scan") {
            if (key == "target") cfg.scan_target = val;
            else cfg.l_list = to_int_list(qual, val);
        } else if (section == "gg") {
            if (key == "n") cfg.gg_n = static_cast<int>(to_int(qual, val));
            else if (key == "component") cfg.gg_component = static_cast<int>(to_int(qual, val));
            else cfg.gg_trivial = to_bool(qual, val);
        } else if (section == "fkg") {
            cfg.fkg_modes = split_csv(val);
        }
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.command) cfg.command = *ov.command;
    if (ov.seed) cfg.ensemble.master_seed = *ov.seed;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.workers) cfg.workers = *ov.workers;
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream os;
    auto d17 = [](double v) { return format_double17(v); };
    os << "[run]\n";
    os << "command=" << cfg.command << "\n";
    os << "out=" << cfg.out_dir << "\n";
    os << "workers=" << cfg.workers << "\n";
    os << "\n[model]\n";
    os << "beta=" << d17(cfg.params.beta) << "\n";
    os << "J1=" << d17(cfg.params.J1) << "\n";
    os << "J3=" << d17(cfg.params.J3) << "\n";
    os << "c=" << d17(cfg.params.c) << "\n";
    os << "b1=" << d17(cfg.params.b1) << "\n";
    os << "b3=" << d17(cfg.params.b3) << "\n";
    os << "d=" << cfg.params.d << "\n";
    os << "L=" << cfg.params.L << "\n";
    os << "M=" << cfg.params.M << "\n";
    os << "\n[ensemble]\n";
    os << "count=" << cfg.ensemble.count << "\n";
    os << "master_seed=" << cfg.ensemble.master_seed << "\n";
    os << "\n[mc]\n";
    os << "replicas=" << cfg.mc.replicas << "\n";
    os << "sweeps=" << cfg.mc.sweeps << "\n";
    os << "thermalization=" << cfg.mc.thermalization << "\n";
    os << "interval=" << cfg.mc.interval << "\n";
    os << "\n[caps]\n";
    os << "dim_cap=" << cfg.caps.dim_cap << "\n";
    os << "enum_bits=" << cfg.caps.enum_bits << "\n";
    auto join_ints = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    os << "\n[trotter]\n";
    os << "m_list=" << join_ints(cfg.m_list) << "\n";
    os << "\n[scan]\n";
    os << "target=" << cfg.scan_target << "\n";
    os << "l_list=" << join_ints(cfg.l_list) << "\n";
    os << "\n[gg]\n";
    os << "n=" << cfg.gg_n << "\n";
    os << "component=" << cfg.gg_component << "\n";
    os << "trivial=" << (cfg.gg_trivial ? "true" : "false") << "\n";
    os << "\n[fkg]\n";
    std::string modes;
    for (std::size_t i = 0; i < cfg.fkg_modes.size(); ++i)
        modes += (i ? "," : "") + cfg.fkg_modes[i];
    os << "modes=" << modes << "\n";
    return os.str();
}

void write_resolved(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write resolved config to '" + path + "'");
    out << render_config(cfg);
    if (!out) throw IoError("write failed: '" + path + "'");
}

} // namespace rsb::cli
