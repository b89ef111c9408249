#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magnex/demag.hpp"
#include "magnex/expr.hpp"
#include "magnex/integrator.hpp"
#include "magnex/physics.hpp"
#include "magnex/run.hpp"

namespace magnex {

/// Parameter overrides applied where `region` evaluates non-zero at a cell center.
struct MaterialRegion {
    std::string name;
    Expr region;
    std::optional<double> Ms, A, Ku, D, alpha;
};

struct MaterialConfig {
    double Ms = 0.0, A = 0.0, Ku = 0.0, D = 0.0, alpha = 0.0;
    Vec3 easy_axis{0.0, 0.0, 1.0};
    double gamma = kGammaElectron;
    std::vector<MaterialRegion> regions;
};

enum class DemagBackendKind { Fft, Nn };

struct DemagConfig {
    DemagBackendKind backend = DemagBackendKind::Fft;
    DemagOptions options;
    std::filesystem::path model;
};

/// Fully validated scenario. Every quantity is SI.
///
/// File format: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Vectors are bracketed triples `[a, b, c]` whose entries are numbers or quoted expressions
/// of x, y, z [m] and t [s]. Sections: grid, material, material:<name>, physics, bias,
/// initial, demag, integrator, stop, output, run.
struct ScenarioConfig {
    GridSpec grid;
    MaterialConfig material;
    PhysicsOptions physics;
    std::array<Expr, 3> bias;
    std::array<Expr, 3> initial;
    std::filesystem::path initial_file;
    DemagConfig demag;
    IntegratorSpec integrator;
    /// Terms assigned to the fast partition (MRI only).
    std::vector<Term> fast_terms{Term::Exchange};
    StopCondition stop;
    double sample_interval = 0.0;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    int threads = 0;

    std::vector<std::string> warnings;
};

/// Ordered `[section] key = value` document.
class ConfigDocument {
public:
    static ConfigDocument parse(const std::string& text, const std::string& origin = "<string>");
    static ConfigDocument load(const std::filesystem::path& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Applies `section.key=value`.
    void apply_override(const std::string& assignment);
    std::vector<std::string> sections() const;
    std::vector<std::string> keys(const std::string& section) const;
    std::string print() const;

private:
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> data_;
    std::string origin_;
};

ScenarioConfig build_scenario(const ConfigDocument& doc);
ScenarioConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});

/// Vector value: `[1, 2, 3]`, `["x/1e-9", 0, 0]`, or a single number/expression for all three.
std::array<Expr, 3> parse_vector_exprs(const std::string& value);
Vec3 parse_vector(const std::string& value);
double parse_number(const std::string& value, const std::string& what = "value");
bool parse_bool(const std::string& value, const std::string& what = "value");

/// Per-cell material from the base section plus regions in file order (later wins).
MaterialMap build_material(const ScenarioConfig& cfg);
/// Initial magnetization, scaled to |M| = Ms.
VectorField3 build_initial(const ScenarioConfig& cfg, const MaterialMap& mat);
BiasSource build_bias(const ScenarioConfig& cfg);
std::unique_ptr<DemagBackend> make_demag_backend(const ScenarioConfig& cfg);
/// Right-hand side with partitions and bias configured.
std::unique_ptr<PartitionedRHS> build_rhs(const ScenarioConfig& cfg);

}  // namespace magnex
