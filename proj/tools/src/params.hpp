#pragma once

#include <string>
#include <vector>

#include "magnex/config.hpp"

namespace magnex::cli {

/// One command's parameters: built-in defaults, then a config file, then `--set` overrides.
class Params {
public:
    Params(std::string section, const std::string& defaults, const std::string& config_path,
           const std::vector<std::string>& overrides);

    double num(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::string str(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
    const ConfigDocument& doc() const { return doc_; }

private:
    std::string raw(const std::string& key) const;

    std::string section_;
    ConfigDocument doc_;
};

}  // namespace magnex::cli
