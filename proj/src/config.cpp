#include "delaysync/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace dsync {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model", {"kind", "alpha", "beta", "J", "H", "regime"}},
        {"network", {"generator", "edge_list", "n", "p", "p0", "seed"}},
        {"run", {"kappa", "tau", "h", "t_end", "omega_lo", "omega_hi", "samples", "sigma", "sigma_im", "kappas", "fit_start",
                 "fit_end", "fit_mode", "history_seed", "tol", "storage_cap"}},
        {"map", {"sigma_lo", "sigma_hi", "sigma_points", "tau_lo", "tau_hi", "tau_points"}},
        {"scaling", {"generator", "sizes", "seeds", "seed", "p0"}},
    };
    return keys;
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string text(const std::string& key) const {
        return boost::algorithm::trim_copy(tree_->get<std::string>(key));
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return wrap(key, [&] { return parse_number(text(key)); });
    }

    std::optional<double> maybe(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    long integer(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        return wrap(key, [&] {
            std::size_t used = 0;
            const std::string s = text(key);
            const long v = std::stol(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        });
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        return wrap(key, [&] {
            std::size_t used = 0;
            const std::string s = text(key);
            if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
            const std::uint64_t v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        });
    }

    std::string string(const std::string& key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

    template <typename T, typename Parse>
    std::vector<T> list(const std::string& key, Parse parse) const {
        std::vector<std::string> parts;
        const std::string s = text(key);
        boost::algorithm::split(parts, s, boost::is_any_of(", "), boost::token_compress_on);
        std::vector<T> out;
        for (const auto& part : parts) {
            if (part.empty()) continue;
            out.push_back(wrap(key, [&] { return parse(part); }));
        }
        if (out.empty()) throw InvalidInput("config [" + name_ + "] " + key + ": empty list");
        return out;
    }

private:
    template <typename F>
    std::invoke_result_t<F> wrap(const std::string& key, F&& f) const {
        try {
            return f();
        } catch (const InvalidInput& e) {
            throw InvalidInput("config [" + name_ + "] " + key + ": " + e.what());
        } catch (const std::exception&) {
            throw InvalidInput("config [" + name_ + "] " + key + ": cannot parse '" + text(key) + "'");
        }
    }

    const pt::ptree* tree_;
    std::string name_;
};

std::string resolve(const std::string& base, const std::string& path) {
    fs::path p(path);
    if (p.is_relative()) p = fs::path(base) / p;
    if (!fs::exists(p)) throw InvalidInput("config: referenced file '" + p.string() + "' does not exist");
    return p.string();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidInput("config: " + message);
}

}  // namespace

double parse_number(const std::string& raw) {
    const std::string text = boost::algorithm::trim_copy(raw);
    auto real = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidInput("not a number: '" + s + "'");
        }
        if (used != s.size()) throw InvalidInput("not a number: '" + s + "'");
        return v;
    };
    double v;
    if (text == "pi") {
        v = std::numbers::pi;
    } else if (text == "-pi") {
        v = -std::numbers::pi;
    } else if (boost::algorithm::ends_with(text, "*pi")) {
        v = real(boost::algorithm::trim_copy(text.substr(0, text.size() - 3))) * std::numbers::pi;
    } else {
        v = real(text);
    }
    if (!std::isfinite(v)) throw InvalidInput("non-finite number '" + text + "'");
    return v;
}

ExperimentConfig parse_config(std::istream& is, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw InvalidInput("config: unknown section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw InvalidInput("config: key '" + section + "' outside any section");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw InvalidInput("config [" + section + "]: unknown key '" + key + "'");
    }
    auto section = [&](const std::string& name) {
        const auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name);
    };

    ExperimentConfig cfg;
    cfg.base_dir = base_dir;

    const Section model = section("model");
    cfg.model.kind = model.string("kind", "sl");
    if (cfg.model.kind == "sl") {
        cfg.model.sl.alpha = model.number("alpha", -1.0);
        cfg.model.sl.beta = model.number("beta", std::numbers::pi);
        validate(cfg.model.sl);
        const std::string fallback = cfg.model.sl.alpha < 0.0 ? "equilibrium" : "periodic";
        const std::string regime = model.string("regime", fallback);
        require(regime == "equilibrium" || regime == "periodic", "[model] regime must be equilibrium or periodic");
        cfg.model.regime = regime == "periodic" ? Regime::periodic : Regime::equilibrium;
        require(cfg.model.regime == Regime::equilibrium || cfg.model.sl.alpha > 0.0,
                "[model] the periodic regime needs alpha > 0");
    } else if (cfg.model.kind == "matrices") {
        require(model.has("J") && model.has("H"), "[model] kind = matrices needs J and H file paths");
        cfg.model.j_path = resolve(base_dir, model.text("J"));
        cfg.model.h_path = resolve(base_dir, model.text("H"));
        require(model.string("regime", "equilibrium") == "equilibrium", "[model] matrix models support only the equilibrium regime");
    } else {
        throw InvalidInput("config: [model] kind must be sl or matrices, got '" + cfg.model.kind + "'");
    }

    if (tree.find("network") != tree.not_found()) {
        const Section net = section("network");
        NetworkConfig n;
        require(net.has("generator") != net.has("edge_list"), "[network] needs exactly one of generator or edge_list");
        if (net.has("edge_list")) {
            n.edge_list = resolve(base_dir, net.text("edge_list"));
        } else {
            n.generator = net.text("generator");
            n.n = static_cast<int>(net.integer("n", 0));
            require(n.n >= 2, "[network] n must be >= 2");
        }
        n.p = net.number("p", 0.0);
        n.p0 = net.number("p0", 1.1);
        n.seed = net.unsigned_integer("seed", 1);
        cfg.network = n;
    }

    const Section run = section("run");
    RunConfig& r = cfg.run;
    r.kappa = run.number("kappa", 0.0);
    r.tau = run.number("tau", 1.0);
    require(r.tau > 0.0, "[run] tau must be positive");
    r.h = run.number("h", r.tau / 256.0);
    require(r.h > 0.0, "[run] h must be positive");
    r.t_end = run.number("t_end", 20.0 * r.tau);
    const auto lo = run.maybe("omega_lo"), hi = run.maybe("omega_hi");
    require(lo.has_value() == hi.has_value(), "[run] omega_lo and omega_hi come together");
    if (lo) {
        require(*lo < *hi, "[run] omega_lo must be below omega_hi");
        r.window = OmegaWindow{*lo, *hi};
    }
    r.samples = static_cast<int>(run.integer("samples", 2001));
    require(r.samples >= 2, "[run] samples must be >= 2");
    if (run.has("sigma")) r.sigma = Complex(run.number("sigma", 0.0), run.number("sigma_im", 0.0));
    if (run.has("kappas")) r.kappas = run.list<double>("kappas", [](const std::string& s) { return parse_number(s); });
    r.fit_start = run.maybe("fit_start");
    r.fit_end = run.maybe("fit_end");
    r.fit_mode = run.string("fit_mode", "pointwise");
    require(r.fit_mode == "pointwise" || r.fit_mode == "envelope", "[run] fit_mode must be pointwise or envelope");
    r.history_seed = run.unsigned_integer("history_seed", 1);
    r.tol = run.number("tol", 1e-4);
    require(r.tol > 0.0, "[run] tol must be positive");
    r.storage_cap = static_cast<std::size_t>(run.unsigned_integer("storage_cap", 20'000'000));

    const Section map = section("map");
    cfg.map.sigma_lo = map.number("sigma_lo", -1.0);
    cfg.map.sigma_hi = map.number("sigma_hi", 1.0);
    cfg.map.sigma_points = static_cast<int>(map.integer("sigma_points", 41));
    cfg.map.tau_lo = map.number("tau_lo", 1.0);
    cfg.map.tau_hi = map.number("tau_hi", 3.0);
    cfg.map.tau_points = static_cast<int>(map.integer("tau_points", 41));

    const Section scaling = section("scaling");
    cfg.scaling.generator = scaling.string("generator", "ba");
    require(cfg.scaling.generator == "ba" || cfg.scaling.generator == "er", "[scaling] generator must be ba or er");
    if (scaling.has("sizes"))
        cfg.scaling.sizes = scaling.list<int>("sizes", [](const std::string& s) {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size() || v < 2) throw InvalidInput("sizes must be integers >= 2");
            return v;
        });
    cfg.scaling.seeds = static_cast<int>(scaling.integer("seeds", 20));
    require(cfg.scaling.seeds >= 1, "[scaling] seeds must be >= 1");
    cfg.scaling.seed = scaling.unsigned_integer("seed", 1);
    cfg.scaling.p0 = scaling.number("p0", 1.1);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open config '" + path + "'");
    return parse_config(is, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

Eigen::MatrixXd load_matrix(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        std::string token;
        while (ls >> token) row.push_back(parse_number(token));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput("matrix file '" + path + "' is empty");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw InvalidInput("matrix file '" + path + "' has ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

LocalModel build_model(const ExperimentConfig& cfg) {
    if (cfg.model.kind == "sl") return sl_equilibrium_model(cfg.model.sl);
    return make_linear_model(load_matrix(cfg.model.j_path), load_matrix(cfg.model.h_path), "matrices");
}

Network build_network(const ExperimentConfig& cfg) {
    if (!cfg.network) throw InvalidInput("config: this command needs a [network] section");
    const NetworkConfig& n = *cfg.network;
    if (!n.edge_list.empty()) return load_edge_list(n.edge_list);
    if (n.generator == "directed_ring") return gen_directed_ring(n.n);
    if (n.generator == "ba") return gen_ba(n.n, n.seed);
    if (n.generator == "er") {
        const double p = n.p > 0.0 ? n.p : n.p0 * std::log(static_cast<double>(n.n)) / n.n;
        return gen_er(n.n, p, n.seed);
    }
    return gen_regular(parse_regular_kind(n.generator), n.n);
}

}  // namespace dsync
