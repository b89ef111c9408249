#include "params.hpp"

#include <cmath>
#include <sstream>

#include "magnex/error.hpp"

namespace magnex::cli {

Params::Params(std::string section, const std::string& defaults, const std::string& config_path,
               const std::vector<std::string>& overrides)
    : section_(std::move(section)), doc_(ConfigDocument::parse(defaults, "<defaults>")) {
    if (!config_path.empty()) {
        const ConfigDocument file = ConfigDocument::load(config_path);
        for (const auto& sec : file.sections()) {
            for (const auto& key : file.keys(sec)) {
                if (sec == section_ && !doc_.has(sec, key)) {
                    throw Error(config_path + ": unknown key '" + key + "' in [" + sec + "]");
                }
                doc_.set(sec, key, *file.get(sec, key));
            }
        }
    }
    for (const auto& o : overrides) {
        const auto dot = o.find('.');
        const auto eq = o.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
            throw Error("--set expects section.key=value, got '" + o + "'");
        }
        const std::string sec = o.substr(0, dot), key = o.substr(dot + 1, eq - dot - 1);
        if (sec == section_ && !doc_.has(sec, key)) throw Error("--set: unknown key '" + key + "' in [" + sec + "]");
        doc_.apply_override(o);
    }
}

std::string Params::raw(const std::string& key) const {
    const auto v = doc_.get(section_, key);
    if (!v) throw Error("missing key '" + key + "' in [" + section_ + "]");
    return *v;
}

double Params::num(const std::string& key) const { return parse_number(raw(key), section_ + "." + key); }

int Params::integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) throw Error(section_ + "." + key + " must be an integer");
    return static_cast<int>(v);
}

bool Params::flag(const std::string& key) const { return parse_bool(raw(key), section_ + "." + key); }

std::string Params::str(const std::string& key) const {
    std::string v = raw(key);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return v;
}

std::vector<double> Params::list(const std::string& key) const {
    std::string v = raw(key);
    const auto a = v.find('['), b = v.rfind(']');
    if (a != std::string::npos && b != std::string::npos && b > a) v = v.substr(a + 1, b - a - 1);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_number(item, section_ + "." + key));
    }
    return out;
}

}  // namespace magnex::cli
