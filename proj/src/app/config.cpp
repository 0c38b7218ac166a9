#include "mprb/app/config.hpp"

#include "mprb/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mprb::app {

using nlohmann::json;

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::given: return "given";
    case Mode::picard: return "picard";
    case Mode::mpp_only: return "mpp-only";
    }
    return "given";
}

namespace {

Mode mode_from(const std::string& s, const std::string& field) {
    if (s == "given") return Mode::given;
    if (s == "picard") return Mode::picard;
    if (s == "mpp-only") return Mode::mpp_only;
    throw ConfigInvalid(field, "expected one of given, picard, mpp-only, got '" + s + "'");
}

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

/// Object view that tracks its dotted path and rejects unknown keys.
class Reader {
public:
    Reader(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigInvalid(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [key, value] : j_.items())
            if (!allowed.contains(key))
                throw ConfigInvalid(join(path_, key), "unknown field");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const std::string& key) const { return j_.at(key); }
    std::string field(const std::string& key) const { return join(path_, key); }

    template <class T>
    void read(const std::string& key, T& out) const {
        if (!has(key))
            return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigInvalid(field(key), std::string("wrong type: ") + e.what());
        }
    }

private:
    const json& j_;
    std::string path_;
};

AffineGenerator read_affine(const json& j, const std::string& path) {
    Reader r(j, path, {"a", "b", "c", "d0", "d1", "dw", "dn", "clip"});
    AffineGenerator g;
    r.read("a", g.a);
    r.read("b", g.b);
    r.read("c", g.c);
    r.read("d0", g.d0);
    r.read("d1", g.d1);
    r.read("dw", g.dw);
    r.read("dn", g.dn);
    if (r.has("clip")) {
        const json& clip = r.at("clip");
        if (!clip.is_array() || clip.size() != 2 || !clip[0].is_number() || !clip[1].is_number())
            throw ConfigInvalid(r.field("clip"), "expected [lo, hi]");
        g.clipped = true;
        g.clip_lo = clip[0].get<double>();
        g.clip_hi = clip[1].get<double>();
    }
    return g;
}

json write_affine(const AffineGenerator& g) {
    json j{{"a", g.a}, {"b", g.b}, {"c", g.c}, {"d0", g.d0}, {"d1", g.d1}, {"dw", g.dw}, {"dn", g.dn}};
    if (g.clipped)
        j["clip"] = {g.clip_lo, g.clip_hi};
    return j;
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok)
        throw ConfigInvalid(field, message);
}

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

void check_breakpoints(const std::vector<double>& b, double horizon, bool closed, const std::string& field) {
    require(!b.empty() && b.front() == 0.0, field, "must start at 0");
    for (std::size_t i = 1; i < b.size(); ++i)
        require(b[i] > b[i - 1] && (b[i] < horizon || (closed && b[i] == horizon)), field,
                closed ? "must increase strictly inside [0, T]" : "must increase strictly inside [0, T)");
}

void check_affine(const AffineGenerator& g, std::size_t marks, bool allow_marks, const std::string& field) {
    require(std::isfinite(g.a) && std::isfinite(g.b) && std::isfinite(g.d0) && std::isfinite(g.d1) &&
                std::isfinite(g.dw) && std::isfinite(g.dn) && finite_all(g.c),
            field, "coefficients must be finite");
    if (allow_marks)
        require(g.c.empty() || g.c.size() == marks, field + ".c", "needs one weight per mark");
    else
        require(g.c.empty(), field + ".c", "mark weights apply to f only");
    if (g.clipped)
        require(g.clip_lo <= g.clip_hi, field + ".clip", "lo must not exceed hi");
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("<root>", std::string("malformed JSON: ") + e.what());
    }
    Reader r(root, "", {"grid", "marks", "compensator", "brownian", "generator", "mode", "picard", "stopping",
                        "simulation", "seed", "output", "node_budget"});
    RunConfig c;
    if (r.has("grid")) {
        Reader g(r.at("grid"), "grid", {"steps", "horizon"});
        g.read("steps", c.grid.steps);
        g.read("horizon", c.grid.horizon);
    }
    if (r.has("marks")) {
        const json& m = r.at("marks");
        if (m.is_number_unsigned()) {
            c.marks = MarkSet::numbered(m.get<std::size_t>()).labels();
        } else {
            r.read("marks", c.marks);
        }
    }
    if (r.has("compensator")) {
        Reader g(r.at("compensator"), "compensator", {"breakpoints", "rates", "phis", "count_slope"});
        g.read("breakpoints", c.compensator.breakpoints);
        g.read("rates", c.compensator.rates);
        g.read("phis", c.compensator.phis);
        g.read("count_slope", c.compensator.count_slope);
    }
    r.read("brownian", c.brownian);
    if (r.has("generator")) {
        Reader g(r.at("generator"), "generator", {"f", "g", "terminal", "barrier", "beta", "delta"});
        if (g.has("f"))
            c.generator.f = read_affine(g.at("f"), "generator.f");
        if (g.has("g"))
            c.generator.g = read_affine(g.at("g"), "generator.g");
        if (g.has("terminal")) {
            Reader t(g.at("terminal"), "generator.terminal", {"c0", "w", "n", "wn", "w_pos"});
            t.read("c0", c.generator.terminal.c0);
            t.read("w", c.generator.terminal.w);
            t.read("n", c.generator.terminal.n);
            t.read("wn", c.generator.terminal.wn);
            t.read("w_pos", c.generator.terminal.w_pos);
        }
        if (g.has("barrier")) {
            Reader b(g.at("barrier"), "generator.barrier", {"breakpoints", "values", "w", "n"});
            b.read("breakpoints", c.generator.barrier.breakpoints);
            b.read("values", c.generator.barrier.values);
            b.read("w", c.generator.barrier.w);
            b.read("n", c.generator.barrier.n);
        }
        g.read("beta", c.generator.beta);
        g.read("delta", c.generator.delta);
    }
    if (r.has("mode")) {
        std::string mode;
        r.read("mode", mode);
        c.mode = mode_from(mode, "mode");
    }
    if (r.has("picard")) {
        Reader p(r.at("picard"), "picard", {"max_iter", "tol"});
        p.read("max_iter", c.picard.max_iter);
        p.read("tol", c.picard.tol);
    }
    if (r.has("stopping")) {
        Reader s(r.at("stopping"), "stopping", {"epsilons", "oracle"});
        s.read("epsilons", c.stopping.epsilons);
        s.read("oracle", c.stopping.oracle);
    }
    if (r.has("simulation")) {
        Reader s(r.at("simulation"), "simulation", {"paths"});
        s.read("paths", c.simulation.paths);
    }
    r.read("seed", c.seed);
    r.read("output", c.output);
    r.read("node_budget", c.node_budget);
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigInvalid("<file>", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string RunConfig::dump() const {
    json gen{{"f", write_affine(generator.f)},
             {"terminal",
              {{"c0", generator.terminal.c0},
               {"w", generator.terminal.w},
               {"n", generator.terminal.n},
               {"wn", generator.terminal.wn},
               {"w_pos", generator.terminal.w_pos}}},
             {"barrier",
              {{"breakpoints", generator.barrier.breakpoints},
               {"values", generator.barrier.values},
               {"w", generator.barrier.w},
               {"n", generator.barrier.n}}},
             {"beta", generator.beta},
             {"delta", generator.delta}};
    if (generator.g)
        gen["g"] = write_affine(*generator.g);
    const json j{{"grid", {{"steps", grid.steps}, {"horizon", grid.horizon}}},
                 {"marks", marks},
                 {"compensator",
                  {{"breakpoints", compensator.breakpoints},
                   {"rates", compensator.rates},
                   {"phis", compensator.phis},
                   {"count_slope", compensator.count_slope}}},
                 {"brownian", brownian},
                 {"generator", gen},
                 {"mode", to_string(mode)},
                 {"picard", {{"max_iter", picard.max_iter}, {"tol", picard.tol}}},
                 {"stopping", {{"epsilons", stopping.epsilons}, {"oracle", stopping.oracle}}},
                 {"simulation", {{"paths", simulation.paths}}},
                 {"seed", seed},
                 {"output", output},
                 {"node_budget", node_budget}};
    return j.dump(2);
}

void RunConfig::validate() const {
    require(grid.steps >= 1, "grid.steps", "must be at least 1");
    require(std::isfinite(grid.horizon) && grid.horizon > 0.0, "grid.horizon", "must be positive");

    require(!marks.empty(), "marks", "need at least one mark");
    require(std::set<std::string>(marks.begin(), marks.end()).size() == marks.size(), "marks",
            "labels must be distinct");
    const std::size_t m = marks.size();

    check_breakpoints(compensator.breakpoints, grid.horizon, false, "compensator.breakpoints");
    require(compensator.rates.size() == compensator.breakpoints.size(), "compensator.rates",
            "needs one rate per breakpoint");
    for (double rate : compensator.rates)
        require(std::isfinite(rate) && rate >= 0.0, "compensator.rates", "rates must be finite and >= 0");
    require(compensator.phis.size() == compensator.breakpoints.size(), "compensator.phis",
            "needs one kernel per breakpoint");
    for (const auto& phi : compensator.phis) {
        require(phi.size() == m, "compensator.phis", "each kernel needs one weight per mark");
        double sum = 0.0;
        for (double p : phi) {
            require(std::isfinite(p) && p >= 0.0, "compensator.phis", "weights must be finite and >= 0");
            sum += p;
        }
        require(std::abs(sum - 1.0) <= 1e-9, "compensator.phis", "each kernel must sum to 1");
    }
    require(std::isfinite(compensator.count_slope) && compensator.count_slope >= 0.0, "compensator.count_slope",
            "must be finite and >= 0");

    check_affine(generator.f, m, true, "generator.f");
    if (generator.g)
        check_affine(*generator.g, m, false, "generator.g");
    const auto& t = generator.terminal;
    require(std::isfinite(t.c0) && std::isfinite(t.w) && std::isfinite(t.n) && std::isfinite(t.wn) &&
                std::isfinite(t.w_pos),
            "generator.terminal", "coefficients must be finite");
    const auto& b = generator.barrier;
    check_breakpoints(b.breakpoints, grid.horizon, true, "generator.barrier.breakpoints");
    require(b.values.size() == b.breakpoints.size(), "generator.barrier.values", "needs one value per breakpoint");
    require(finite_all(b.values) && std::isfinite(b.w) && std::isfinite(b.n), "generator.barrier",
            "coefficients must be finite");
    require(std::isfinite(generator.beta) && generator.beta >= 0.0, "generator.beta", "must be finite and >= 0");
    require(std::isfinite(generator.delta) && generator.delta > 0.0, "generator.delta", "must be positive");

    require(picard.max_iter >= 1, "picard.max_iter", "must be at least 1");
    require(std::isfinite(picard.tol) && picard.tol >= 0.0, "picard.tol", "must be finite and >= 0");
    for (double eps : stopping.epsilons)
        require(std::isfinite(eps) && eps >= 0.0, "stopping.epsilons", "must be finite and >= 0");
    require(simulation.paths >= 1, "simulation.paths", "must be at least 1");

    const std::size_t required = ScenarioTree::full_node_count(grid.steps, m, brownian);
    require(required <= node_budget, "grid.steps",
            "tree needs " + std::to_string(required) + " nodes, budget is " + std::to_string(node_budget));

    const AffineGenerator g = generator.g.value_or(AffineGenerator{});
    switch (mode) {
    case Mode::given:
        require(generator.f.state_free(), "generator.f", "given mode needs a state-free f (a = b = 0)");
        require(g.state_free(), "generator.g", "given mode needs a state-free g (a = b = 0)");
        break;
    case Mode::picard: {
        const Lipschitz lip = certify_lipschitz(generator.f, g);
        const double minimal = lip.u * lip.u + 2.0 * lip.f;
        if (!(generator.beta > minimal)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "beta must exceed L_U^2 + 2 L_f = " << minimal << ", got " << generator.beta;
            throw ConfigInvalid("generator.beta", msg.str());
        }
        break;
    }
    case Mode::mpp_only:
        require(!brownian, "brownian", "mpp-only mode needs a tree without Brownian branching");
        require(g == AffineGenerator{}, "generator.g", "mpp-only mode needs g = 0");
        {
            const Lipschitz lip = certify_lipschitz(generator.f, g);
            const double minimal = lip.u * lip.u + 2.0 * lip.f;
            if (!generator.f.state_free() && !(generator.beta > minimal)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "beta must exceed L_U^2 + 2 L_f = " << minimal << ", got " << generator.beta;
                throw ConfigInvalid("generator.beta", msg.str());
            }
        }
        break;
    }
}

TimeGrid RunConfig::time_grid() const { return TimeGrid::uniform(grid.steps, grid.horizon); }

MarkSet RunConfig::mark_set() const { return MarkSet(marks); }

CompensatorSpec RunConfig::compensator_spec() const {
    return CompensatorSpec::piecewise(compensator.breakpoints, compensator.rates, compensator.phis,
                                      compensator.count_slope);
}

ScenarioTree RunConfig::build_tree() const {
    TreeOptions options;
    options.brownian = brownian;
    options.node_budget = node_budget;
    return ScenarioTree::build(time_grid(), mark_set(), compensator_spec(), options);
}

GeneratorSpec RunConfig::generator_spec(const ScenarioTree& tree) const {
    const AffineGenerator g = generator.g.value_or(AffineGenerator{});
    auto spec = make_generator_spec(tree, generator.f, g, generator.terminal, generator.barrier, generator.beta,
                                    generator.delta);
    if (!generator.g)
        spec.g = nullptr;
    return spec;
}

} // namespace mprb::app
