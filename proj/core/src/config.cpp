#include "magnex/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "magnex/error.hpp"
#include "magnex/magf.hpp"

namespace magnex {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Drops a trailing `# ...` or `; ...` comment that is preceded by whitespace and outside quotes.
std::string strip_comment(const std::string& s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if ((c == '#' || c == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
            return trim(s.substr(0, i));
        }
    }
    return trim(s);
}

// Splits on commas outside parentheses and quotes.
std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    char quote = 0;
    std::string cur;
    for (char c : s) {
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            --depth;
        } else if (c == ',' && depth == 0) {
            parts.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur += c;
    }
    parts.push_back(trim(cur));
    return parts;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"grid", {"nx", "ny", "nz", "dx", "dy", "dz", "origin"}},
        {"material", {"Ms", "A", "Ku", "D", "alpha", "easy_axis", "gamma"}},
        {"region", {"region", "Ms", "A", "Ku", "D", "alpha"}},
        {"physics", {"bias", "demag", "anisotropy", "exchange", "dmi", "precession", "damping", "boundary"}},
        {"bias", {"field"}},
        {"initial", {"m", "file"}},
        {"demag", {"backend", "tensor", "far_field_diagonals", "cache_dir", "model"}},
        {"integrator", {"method", "dt", "theta", "renormalize_stages", "fast"}},
        {"stop", {"duration", "max_steps", "equilibrium_tol"}},
        {"output", {"dir", "sample_interval"}},
        {"run", {"seed", "threads"}},
    };
    return k;
}

const std::vector<std::string>& required_keys() {
    static const std::vector<std::string> r = {"grid.nx", "grid.ny", "grid.nz", "grid.dx", "grid.dy",
                                               "grid.dz", "material.Ms", "material.alpha", "integrator.dt"};
    return r;
}

Term parse_term(const std::string& name) {
    for (int i = 0; i < kTermCount; ++i) {
        if (term_name(static_cast<Term>(i)) == name) return static_cast<Term>(i);
    }
    throw Error("unknown field term '" + name + "'");
}

std::int64_t parse_int(const std::string& v, const std::string& what) {
    const double d = parse_number(v, what);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw Error(what + ": expected an integer, got '" + v + "'");
    return static_cast<std::int64_t>(d);
}

}  // namespace

double parse_number(const std::string& value, const std::string& what) {
    const std::string s = trim(unquote(trim(value)));
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size()) return out;
    // Constant expressions such as "2*pi" are accepted too.
    try {
        const Expr e = Expr::parse(s);
        if (!e.depends_on_space() && !e.depends_on_time()) return e.eval(0, 0, 0, 0);
    } catch (const Error&) {
    }
    throw Error(what + ": expected a number, got '" + value + "'");
}

bool parse_bool(const std::string& value, const std::string& what) {
    std::string s = trim(value);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw Error(what + ": expected true/false, got '" + value + "'");
}

std::array<Expr, 3> parse_vector_exprs(const std::string& value) {
    std::string s = trim(value);
    if (s.empty()) throw Error("empty vector value");
    auto as_expr = [](const std::string& item) {
        const std::string body = trim(unquote(item));
        if (body.empty()) throw Error("empty vector entry");
        return Expr::parse(body);
    };
    if (s.front() != '[') {
        const Expr e = as_expr(s);
        return {e, e, e};
    }
    if (s.back() != ']') throw Error("vector '" + s + "' is missing its closing bracket");
    const auto parts = split_top_level(s.substr(1, s.size() - 2));
    if (parts.size() != 3) {
        throw Error("vector '" + s + "' has " + std::to_string(parts.size()) + " entries, expected 3");
    }
    return {as_expr(parts[0]), as_expr(parts[1]), as_expr(parts[2])};
}

Vec3 parse_vector(const std::string& value) {
    const auto e = parse_vector_exprs(value);
    Vec3 v;
    for (int c = 0; c < 3; ++c) {
        if (e[c].depends_on_space() || e[c].depends_on_time()) {
            throw Error("vector '" + value + "' must be constant");
        }
        v[c] = e[c].eval(0, 0, 0, 0);
    }
    return v;
}

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(origin + ": " + e.message(), static_cast<int>(e.line()), 1);
    }
    ConfigDocument doc;
    doc.origin_ = origin;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ParseError(origin + ": key '" + section + "' outside any section");
        auto& entries = doc.data_.emplace_back(section, decltype(data_)::value_type::second_type{}).second;
        for (const auto& [key, value] : body) entries.emplace_back(key, strip_comment(value.data()));
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
    return get(section, key).has_value();
}

std::optional<std::string> ConfigDocument::get(const std::string& section, const std::string& key) const {
    for (const auto& [name, entries] : data_) {
        if (name != section) continue;
        for (const auto& [k, v] : entries) {
            if (k == key) return v;
        }
    }
    return std::nullopt;
}

void ConfigDocument::set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& [name, entries] : data_) {
        if (name != section) continue;
        for (auto& [k, v] : entries) {
            if (k == key) {
                v = value;
                return;
            }
        }
        entries.emplace_back(key, value);
        return;
    }
    data_.push_back({section, {{key, value}}});
}

void ConfigDocument::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.rfind('.', eq);
    if (eq == std::string::npos || dot == std::string::npos || dot == 0) {
        throw Error("override '" + assignment + "' must have the form section.key=value");
    }
    set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
        trim(assignment.substr(eq + 1)));
}

std::vector<std::string> ConfigDocument::sections() const {
    std::vector<std::string> out;
    for (const auto& s : data_) out.push_back(s.first);
    return out;
}

std::vector<std::string> ConfigDocument::keys(const std::string& section) const {
    std::vector<std::string> out;
    for (const auto& [name, entries] : data_) {
        if (name == section) {
            for (const auto& e : entries) out.push_back(e.first);
        }
    }
    return out;
}

std::string ConfigDocument::print() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, entries] : data_) {
        if (!first) os << '\n';
        first = false;
        os << '[' << name << "]\n";
        for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
    }
    return os.str();
}

ScenarioConfig build_scenario(const ConfigDocument& doc) {
    std::vector<std::string> missing;
    for (const auto& key : required_keys()) {
        const auto dot = key.find('.');
        if (!doc.has(key.substr(0, dot), key.substr(dot + 1))) missing.push_back(key);
    }
    if (!missing.empty()) {
        std::string msg = "config is missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw Error(msg);
    }

    ScenarioConfig cfg;
    for (const auto& section : doc.sections()) {
        const bool region = section.rfind("material:", 0) == 0;
        const auto it = known_keys().find(region ? "region" : section);
        if (it == known_keys().end()) {
            cfg.warnings.push_back("unknown section [" + section + "]");
            continue;
        }
        for (const auto& key : doc.keys(section)) {
            if (!it->second.count(key)) cfg.warnings.push_back("unknown key '" + key + "' in [" + section + "]");
        }
    }
    auto num = [&](const char* sec, const char* key, double fallback) {
        const auto v = doc.get(sec, key);
        return v ? parse_number(*v, std::string(sec) + "." + key) : fallback;
    };
    auto flag = [&](const char* sec, const char* key, bool fallback) {
        const auto v = doc.get(sec, key);
        return v ? parse_bool(*v, std::string(sec) + "." + key) : fallback;
    };

    cfg.grid.nx = parse_int(*doc.get("grid", "nx"), "grid.nx");
    cfg.grid.ny = parse_int(*doc.get("grid", "ny"), "grid.ny");
    cfg.grid.nz = parse_int(*doc.get("grid", "nz"), "grid.nz");
    cfg.grid.dx = num("grid", "dx", 0);
    cfg.grid.dy = num("grid", "dy", 0);
    cfg.grid.dz = num("grid", "dz", 0);
    if (const auto o = doc.get("grid", "origin")) cfg.grid.origin = parse_vector(*o);
    cfg.grid.validate();
    for (int a = 0; a < 3; ++a) {
        if (cfg.grid.h(a) > 1e-6) cfg.warnings.push_back("cell size above 1 um; lengths are in metres");
    }

    auto& m = cfg.material;
    m.Ms = num("material", "Ms", 0);
    m.A = num("material", "A", 0);
    m.Ku = num("material", "Ku", 0);
    m.D = num("material", "D", 0);
    m.alpha = num("material", "alpha", 0);
    m.gamma = num("material", "gamma", kGammaElectron);
    if (const auto e = doc.get("material", "easy_axis")) m.easy_axis = parse_vector(*e);
    if (m.Ms > 1e7) cfg.warnings.push_back("material.Ms above 1e7 A/m");
    bool any_ku = m.Ku != 0.0, any_d = m.D != 0.0, any_a = m.A != 0.0;
    for (const auto& section : doc.sections()) {
        if (section.rfind("material:", 0) != 0) continue;
        MaterialRegion r;
        r.name = section.substr(9);
        const auto pred = doc.get(section, "region");
        if (!pred) throw Error("[" + section + "] needs a region expression");
        r.region = Expr::parse(unquote(*pred));
        auto opt = [&](const char* key) -> std::optional<double> {
            const auto v = doc.get(section, key);
            if (!v) return std::nullopt;
            return parse_number(*v, section + "." + key);
        };
        r.Ms = opt("Ms");
        r.A = opt("A");
        r.Ku = opt("Ku");
        r.D = opt("D");
        r.alpha = opt("alpha");
        any_ku |= r.Ku.value_or(0) != 0.0;
        any_d |= r.D.value_or(0) != 0.0;
        any_a |= r.A.value_or(0) != 0.0;
        m.regions.push_back(std::move(r));
    }

    const bool has_bias = doc.has("bias", "field");
    if (has_bias) cfg.bias = parse_vector_exprs(*doc.get("bias", "field"));
    auto& p = cfg.physics;
    p.set(Term::Bias, flag("physics", "bias", has_bias));
    p.set(Term::Demag, flag("physics", "demag", true));
    p.set(Term::Anisotropy, flag("physics", "anisotropy", any_ku));
    p.set(Term::Exchange, flag("physics", "exchange", any_a));
    p.set(Term::Dmi, flag("physics", "dmi", any_d));
    p.llg.precession = flag("physics", "precession", true);
    p.llg.damping = flag("physics", "damping", true);
    if (const auto b = doc.get("physics", "boundary")) {
        if (*b == "zero-flux") p.boundary = BoundaryMode::ZeroFlux;
        else if (*b == "chiral") p.boundary = BoundaryMode::Chiral;
        else if (*b == "periodic") p.boundary = BoundaryMode::Periodic;
        else throw Error("physics.boundary: expected zero-flux, chiral or periodic, got '" + *b + "'");
    }
    if (std::none_of(p.enabled.begin(), p.enabled.end(), [](bool b) { return b; })) {
        throw Error("physics: at least one field term must be enabled");
    }
    if (p.on(Term::Bias) && !has_bias) throw Error("physics.bias is on but [bias] field is missing");

    cfg.initial = {Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0)};
    if (const auto v = doc.get("initial", "m")) cfg.initial = parse_vector_exprs(*v);
    if (const auto f = doc.get("initial", "file")) cfg.initial_file = unquote(*f);

    if (const auto b = doc.get("demag", "backend")) {
        if (*b == "fft") cfg.demag.backend = DemagBackendKind::Fft;
        else if (*b == "nn") cfg.demag.backend = DemagBackendKind::Nn;
        else throw Error("demag.backend: expected fft or nn, got '" + *b + "'");
    }
    if (const auto t = doc.get("demag", "tensor")) {
        if (*t == "newell") cfg.demag.options.flavor = TensorFlavor::Newell;
        else if (*t == "point") cfg.demag.options.flavor = TensorFlavor::Point;
        else throw Error("demag.tensor: expected newell or point, got '" + *t + "'");
    }
    cfg.demag.options.far_field_diagonals = num("demag", "far_field_diagonals", kDefaultFarFieldDiagonals);
    if (const auto c = doc.get("demag", "cache_dir")) cfg.demag.options.cache_dir = unquote(*c);
    if (const auto md = doc.get("demag", "model")) cfg.demag.model = unquote(*md);
    if (cfg.demag.backend == DemagBackendKind::Nn && cfg.demag.model.empty()) {
        throw Error("demag.backend = nn requires demag.model");
    }

    auto& in = cfg.integrator;
    if (const auto meth = doc.get("integrator", "method")) in.method = parse_method(*meth);
    in.dt = num("integrator", "dt", 0);
    in.theta = num("integrator", "theta", 0.1);
    in.renormalize_stages = flag("integrator", "renormalize_stages", true);
    in.validate();
    if (in.dt > 1.0) cfg.warnings.push_back("integrator.dt above 1 s; times are in seconds");
    if (const auto f = doc.get("integrator", "fast")) {
        cfg.fast_terms.clear();
        const std::string list = unquote(*f);
        if (!trim(list).empty() && trim(list) != "none") {
            for (const auto& name : split_top_level(list)) cfg.fast_terms.push_back(parse_term(name));
        }
    }

    if (const auto v = doc.get("stop", "duration")) cfg.stop.duration = parse_number(*v, "stop.duration");
    if (const auto v = doc.get("stop", "max_steps")) cfg.stop.max_steps = parse_int(*v, "stop.max_steps");
    if (const auto v = doc.get("stop", "equilibrium_tol")) {
        cfg.stop.equilibrium_tol = parse_number(*v, "stop.equilibrium_tol");
    }
    if (cfg.stop.duration && *cfg.stop.duration > 1.0) {
        cfg.warnings.push_back("stop.duration above 1 s; times are in seconds");
    }

    cfg.sample_interval = num("output", "sample_interval", 0.0);
    if (const auto d = doc.get("output", "dir")) cfg.output_dir = unquote(*d);
    cfg.seed = static_cast<std::uint64_t>(parse_int(doc.get("run", "seed").value_or("0"), "run.seed"));
    cfg.threads = static_cast<int>(parse_int(doc.get("run", "threads").value_or("0"), "run.threads"));
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    ConfigDocument doc = ConfigDocument::load(path);
    for (const auto& o : overrides) doc.apply_override(o);
    return build_scenario(doc);
}

MaterialMap build_material(const ScenarioConfig& cfg) {
    const auto& mc = cfg.material;
    MaterialMap mat(cfg.grid, mc.Ms, mc.A, mc.alpha, mc.Ku, mc.D);
    mat.easy_axis = mc.easy_axis;
    mat.gamma = mc.gamma;
    const GridSpec& g = cfg.grid;
    for (const auto& r : mc.regions) {
        for (std::int64_t k = 0; k < g.nz; ++k)
            for (std::int64_t j = 0; j < g.ny; ++j)
                for (std::int64_t i = 0; i < g.nx; ++i) {
                    const Vec3 c = g.center(i, j, k);
                    if (r.region.eval(c.x, c.y, c.z, 0.0) == 0.0) continue;
                    const std::size_t idx = g.index(i, j, k);
                    if (r.Ms) mat.Ms[idx] = *r.Ms;
                    if (r.A) mat.A[idx] = *r.A;
                    if (r.Ku) mat.Ku[idx] = *r.Ku;
                    if (r.D) mat.D[idx] = *r.D;
                    if (r.alpha) mat.alpha[idx] = *r.alpha;
                }
    }
    mat.validate();
    return mat;
}

VectorField3 build_initial(const ScenarioConfig& cfg, const MaterialMap& mat) {
    VectorField3 m;
    if (!cfg.initial_file.empty()) {
        m = read_field(cfg.initial_file);
        if (!(m.grid().nx == cfg.grid.nx && m.grid().ny == cfg.grid.ny && m.grid().nz == cfg.grid.nz)) {
            throw Error("initial state file '" + cfg.initial_file.string() + "' has a different grid");
        }
        VectorField3 fixed(cfg.grid);
        std::copy(m.data().begin(), m.data().end(), fixed.data().begin());
        m = std::move(fixed);
    } else {
        m = VectorField3(cfg.grid);
        const GridSpec& g = cfg.grid;
        for (std::int64_t k = 0; k < g.nz; ++k)
            for (std::int64_t j = 0; j < g.ny; ++j)
                for (std::int64_t i = 0; i < g.nx; ++i) {
                    const Vec3 c = g.center(i, j, k);
                    m.set(g.index(i, j, k), {cfg.initial[0].eval(c.x, c.y, c.z, 0.0),
                                             cfg.initial[1].eval(c.x, c.y, c.z, 0.0),
                                             cfg.initial[2].eval(c.x, c.y, c.z, 0.0)});
                }
    }
    renormalize(m, mat);
    return m;
}

BiasSource build_bias(const ScenarioConfig& cfg) {
    if (std::all_of(cfg.bias.begin(), cfg.bias.end(), [](const Expr& e) { return e.is_constant(); })) {
        return BiasSource(Vec3{cfg.bias[0].eval(0, 0, 0, 0), cfg.bias[1].eval(0, 0, 0, 0),
                               cfg.bias[2].eval(0, 0, 0, 0)});
    }
    return BiasSource(cfg.bias);
}

std::unique_ptr<PartitionedRHS> build_rhs(const ScenarioConfig& cfg) {
    PhysicsOptions opt = cfg.physics;
    opt.bias = build_bias(cfg);
    std::unique_ptr<DemagBackend> demag;
    if (opt.on(Term::Demag)) demag = make_demag_backend(cfg);
    auto rhs = std::make_unique<PartitionedRHS>(build_material(cfg), opt, std::move(demag));
    rhs->all_slow();
    if (cfg.integrator.method == Method::MriKw3) {
        for (Term t : cfg.fast_terms) rhs->assign(t, Partition::Fast);
    }
    return rhs;
}

}  // namespace magnex
