#include "rsb/core/disorder.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rsb/core/error.hpp"
#include "rsb/core/rng.hpp"

namespace rsb {

using nlohmann::json;

DisorderRealization sample_disorder(const ModelParams& p, std::uint64_t seed) {
    p.validate();
    DisorderRealization r;
    r.seed = seed;
    r.generator_id = GaussianStream::kGeneratorId;
    r.d = p.d;
    r.L = p.L;
    r.M = p.M;

    const std::size_t nv = static_cast<std::size_t>(p.n_sites());
    const std::size_t nw = static_cast<std::size_t>(p.n_spacetime());
    GaussianStream gs(seed);
    r.g1.resize(nv);
    r.g3.resize(nv);
    r.h1.resize(nw);
    r.h3.resize(nw);
    for (auto& v : r.g1) v = gs.next();
    for (auto& v : r.g3) v = gs.next();
    for (auto& v : r.h1) v = gs.next();
    for (auto& v : r.h3) v = gs.next();
    return r;
}

std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double17(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') throw SchemaError("unparseable double: '" + s + "'");
    return v;
}

namespace {

json doubles_to_json(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(format_double17(x));
    return arr;
}

std::vector<double> doubles_from_json(const json& arr, const char* field, std::size_t expected) {
    if (!arr.is_array()) throw SchemaError(std::string("field '") + field + "' is not an array");
    if (arr.size() != expected)
        throw SchemaError(std::string("field '") + field + "' has length " +
                          std::to_string(arr.size()) + ", expected " + std::to_string(expected));
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_string()) throw SchemaError(std::string("field '") + field + "' holds a non-string entry");
        out.push_back(parse_double17(e.get<std::string>()));
    }
    return out;
}

const json& require_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError(std::string("missing field '") + name + "'");
    return *it;
}

} // namespace

void save_realization(const DisorderRealization& r, const std::string& path) {
    json j;
    j["version"] = 1;
    j["kind"] = "disorder";
    j["seed"] = r.seed;
    j["generator_id"] = r.generator_id;
    j["d"] = r.d;
    j["L"] = r.L;
    j["M"] = r.M;
    j["g1"] = doubles_to_json(r.g1);
    j["g3"] = doubles_to_json(r.g3);
    j["h1"] = doubles_to_json(r.h1);
    j["h3"] = doubles_to_json(r.h3);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
    if (!out) throw IoError("write failed: '" + path + "'");
}

DisorderRealization load_realization(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream buf;
    buf << in.rdbuf();

    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    try {
        if (require_field(j, "version").get<int>() != 1)
            throw SchemaError("unsupported schema version in '" + path + "'");
        if (require_field(j, "kind").get<std::string>() != "disorder")
            throw SchemaError("'" + path + "' is not a disorder realization file");

        DisorderRealization r;
        r.seed = require_field(j, "seed").get<std::uint64_t>();
        r.generator_id = require_field(j, "generator_id").get<std::string>();
        r.d = require_field(j, "d").get<int>();
        r.L = require_field(j, "L").get<int>();
        r.M = require_field(j, "M").get<int>();
        if (r.d < 1 || r.d > 3 || r.L < 1 || r.M < 1)
            throw SchemaError("lattice shape out of range in '" + path + "'");

        std::size_t nv = 1;
        for (int k = 0; k < r.d; ++k) nv *= static_cast<std::size_t>(r.L);
        std::size_t nw = nv * static_cast<std::size_t>(r.M);
        r.g1 = doubles_from_json(require_field(j, "g1"), "g1", nv);
        r.g3 = doubles_from_json(require_field(j, "g3"), "g3", nv);
        r.h1 = doubles_from_json(require_field(j, "h1"), "h1", nw);
        r.h3 = doubles_from_json(require_field(j, "h3"), "h3", nw);
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad field type in '") + path + "': " + e.what());
    }
}

void require_shape(const DisorderRealization& r, const ModelParams& p) {
    if (r.d != p.d || r.L != p.L || r.M != p.M) {
        std::ostringstream os;
        os << "realization shape (d=" << r.d << ",L=" << r.L << ",M=" << r.M
           << ") does not match run shape (d=" << p.d << ",L=" << p.L << ",M=" << p.M << ")";
        throw ShapeMismatch(os.str());
    }
}

} // namespace rsb
