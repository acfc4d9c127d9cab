#include "speckle/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace speckle {
namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& text, const std::string& context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        fail(ErrorKind::invalid_argument, "bad number '" + text + "' in " + context);
    return v;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string to_string(PriorKind kind) {
    switch (kind) {
        case PriorKind::clamp: return "clamp";
        case PriorKind::median: return "median";
        case PriorKind::tv: return "tv";
        case PriorKind::external: return "external";
    }
    return "clamp";
}

PriorKind parse_prior_kind(const std::string& s) {
    if (s == "clamp") return PriorKind::clamp;
    if (s == "median") return PriorKind::median;
    if (s == "tv") return PriorKind::tv;
    if (s == "external") return PriorKind::external;
    fail(ErrorKind::invalid_argument, "unknown prior kind '" + s + "'");
}

/// Reads the keys of one section, rejecting any it does not know.
class Section {
public:
    Section(const json& root, const std::string& name) : name_(name) {
        if (root.contains(name)) {
            node_ = root.at(name);
            if (!node_.is_object()) fail(ErrorKind::format, "config section '" + name + "' must be an object");
        }
    }

    template <typename T>
    void read(const std::string& key, T& target) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        try {
            target = node_.at(key).get<T>();
        } catch (const json::exception& e) {
            fail(ErrorKind::format, "config " + name_ + "." + key + ": " + e.what());
        }
    }

    void read_optional(const std::string& key, std::optional<double>& target) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        if (node_.at(key).is_null()) {
            target.reset();
            return;
        }
        double v = 0.0;
        read(key, v);
        target = v;
    }

    void finish() const {
        if (node_.is_null()) return;
        for (const auto& item : node_.items())
            if (!seen_.count(item.key()))
                fail(ErrorKind::format, "unknown config key " + name_ + "." + item.key());
    }

private:
    std::string name_;
    json node_;
    std::set<std::string> seen_;
};

}  // namespace

Algorithm parse_algorithm(const std::string& text) {
    if (text == "pgd-mc") return Algorithm::pgd_mc;
    if (text == "cpnp-em") return Algorithm::cpnp_em;
    if (text == "crop") return Algorithm::crop;
    if (text == "specklefree") return Algorithm::specklefree;
    fail(ErrorKind::invalid_argument, "unknown algorithm '" + text + "'");
}

std::string to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::pgd_mc: return "pgd-mc";
        case Algorithm::cpnp_em: return "cpnp-em";
        case Algorithm::crop: return "crop";
        case Algorithm::specklefree: return "specklefree";
    }
    return "pgd-mc";
}

ApertureSpec parse_aperture(const std::string& text, int height, int width) {
    const auto parts = split(text, ':');
    if (parts.size() == 1 && parts[0] == "full") return ApertureSpec::full();
    if (parts.size() == 2 && parts[0] == "circ")
        return circular_from_ratio(height, width, parse_number(parts[1], "aperture"));
    if (parts.size() == 3 && parts[0] == "annulus")
        return annular_from_ratio(height, width, parse_number(parts[1], "aperture"),
                                  parse_number(parts[2], "aperture"));
    fail(ErrorKind::invalid_argument,
         "aperture must be circ:<ratio>, annulus:<outer>:<inner> or full, got '" + text + "'");
}

std::string to_json(const RunConfig& c) {
    json j;
    j["algorithm"] = to_string(c.algorithm);
    j["simulate"] = {{"aperture", c.aperture}, {"sigma_z", c.sigma_z}, {"looks", c.looks},
                     {"seed", c.seed}};
    j["pgd_mc"] = {{"step_size", optional_to_json(c.step_size)},
                   {"iterations", c.iterations},
                   {"probes", c.probes},
                   {"probe_kind", c.probe_kind == ProbeKind::gaussian ? "gaussian" : "rademacher"},
                   {"probe_seed", c.probe_seed},
                   {"record_trajectory", c.record_trajectory},
                   {"assumed_sigma_z", optional_to_json(c.assumed_sigma_z)}};
    j["cg"] = {{"tolerance", c.cg.tolerance},
               {"max_iterations", c.cg.max_iterations},
               {"warm_start", c.cg.initial_guess == InitialGuess::warm_start}};
    j["prior"] = {{"kind", to_string(c.prior.kind)},
                  {"upper", optional_to_json(c.prior.upper)},
                  {"median_window", c.prior.median_window},
                  {"tv_lambda", c.prior.tv_lambda},
                  {"tv_iterations", c.prior.tv_iterations},
                  {"external_command", c.prior.external_command},
                  {"external_timeout_s", c.prior.external_timeout_s}};
    j["cpnp_em"] = {{"iterations", c.cpnp_iterations}, {"sigma", c.cpnp_sigma}, {"rho", c.cpnp_rho}};
    j["crop"] = {{"size", c.crop_size}};
    j["specklefree"] = {{"step_size", c.specklefree_step_size}};
    return j.dump(2);
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(ErrorKind::format, "config must be a JSON object");
    static const std::set<std::string> sections = {"algorithm", "simulate", "pgd_mc", "cg", "prior",
                                                   "cpnp_em", "crop", "specklefree"};
    for (const auto& item : root.items())
        if (!sections.count(item.key())) fail(ErrorKind::format, "unknown config section " + item.key());

    RunConfig c;
    if (root.contains("algorithm")) {
        if (!root.at("algorithm").is_string()) fail(ErrorKind::format, "config algorithm must be a string");
        c.algorithm = parse_algorithm(root.at("algorithm").get<std::string>());
    }

    Section sim(root, "simulate");
    sim.read("aperture", c.aperture);
    sim.read("sigma_z", c.sigma_z);
    sim.read("looks", c.looks);
    sim.read("seed", c.seed);
    sim.finish();

    Section pgd(root, "pgd_mc");
    pgd.read_optional("step_size", c.step_size);
    pgd.read("iterations", c.iterations);
    pgd.read("probes", c.probes);
    std::string probe_kind = c.probe_kind == ProbeKind::gaussian ? "gaussian" : "rademacher";
    pgd.read("probe_kind", probe_kind);
    if (probe_kind == "gaussian") c.probe_kind = ProbeKind::gaussian;
    else if (probe_kind == "rademacher") c.probe_kind = ProbeKind::rademacher;
    else fail(ErrorKind::invalid_argument, "probe_kind must be gaussian or rademacher");
    pgd.read("probe_seed", c.probe_seed);
    pgd.read("record_trajectory", c.record_trajectory);
    pgd.read_optional("assumed_sigma_z", c.assumed_sigma_z);
    pgd.finish();

    Section cg(root, "cg");
    cg.read("tolerance", c.cg.tolerance);
    cg.read("max_iterations", c.cg.max_iterations);
    bool warm = c.cg.initial_guess == InitialGuess::warm_start;
    cg.read("warm_start", warm);
    c.cg.initial_guess = warm ? InitialGuess::warm_start : InitialGuess::zero;
    cg.finish();

    Section prior(root, "prior");
    std::string kind = to_string(c.prior.kind);
    prior.read("kind", kind);
    c.prior.kind = parse_prior_kind(kind);
    prior.read_optional("upper", c.prior.upper);
    prior.read("median_window", c.prior.median_window);
    prior.read("tv_lambda", c.prior.tv_lambda);
    prior.read("tv_iterations", c.prior.tv_iterations);
    prior.read("external_command", c.prior.external_command);
    prior.read("external_timeout_s", c.prior.external_timeout_s);
    prior.finish();

    Section cpnp(root, "cpnp_em");
    cpnp.read("iterations", c.cpnp_iterations);
    cpnp.read("sigma", c.cpnp_sigma);
    cpnp.read("rho", c.cpnp_rho);
    cpnp.finish();

    Section crop(root, "crop");
    crop.read("size", c.crop_size);
    crop.finish();

    Section sf(root, "specklefree");
    sf.read("step_size", c.specklefree_step_size);
    sf.finish();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

void save_run_config(const std::filesystem::path& path, const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write config " + path.string());
    out << to_json(cfg) << '\n';
}

PgdConfig make_pgd_config(const RunConfig& c, int height, int width) {
    PgdConfig p;
    p.step_size = c.step_size.value_or(default_step_size(height, width));
    p.iterations = c.iterations;
    p.probes = c.probes;
    p.probe_kind = c.probe_kind;
    p.seed = c.probe_seed;
    p.cg = c.cg;
    p.prior = c.prior;
    p.record_trajectory = c.record_trajectory;
    if (c.assumed_sigma_z) p.assumed_sigma_z = *c.assumed_sigma_z / kDisplayPeak;
    p.validate();
    return p;
}

PgdConfig make_specklefree_config(const RunConfig& c) {
    PgdConfig p = make_pgd_config(c, 1, 1);
    p.step_size = c.specklefree_step_size;
    p.validate();
    return p;
}

CpnpConfig make_cpnp_config(const RunConfig& c) {
    CpnpConfig p;
    p.iterations = c.cpnp_iterations;
    p.sigma = c.cpnp_sigma;
    p.rho = c.cpnp_rho;
    p.denoiser = c.prior;
    p.record_trajectory = c.record_trajectory;
    if (c.assumed_sigma_z) p.assumed_sigma_z = *c.assumed_sigma_z / kDisplayPeak;
    p.validate();
    return p;
}

}  // namespace speckle
