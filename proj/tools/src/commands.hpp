#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace magnex::cli {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out_dir = "out";
    bool out_dir_given = false;
    std::uint64_t seed = 1;
    int threads = 0;
    bool paper_scale = false;
    std::string model;
};

int cmd_run(const Common& c);
int cmd_std2(const Common& c);
int cmd_std3(const Common& c);
int cmd_std4(const Common& c);
int cmd_skyrmion(const Common& c);
int cmd_bench_integrators(const Common& c);
int cmd_gen_dataset(const Common& c);
int cmd_infer_check(const Common& c, const std::string& pairs);
int cmd_plot(const std::string& csv, const std::string& out);

/// Defaults of each command in config-file form.
const char* defaults_for(const std::string& command, bool paper_scale);

}  // namespace magnex::cli
