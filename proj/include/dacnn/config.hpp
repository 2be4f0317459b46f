#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dacnn/rbf.hpp"
#include "dacnn/trainer.hpp"

namespace dacnn {

// Line-oriented key=value configuration with a fixed schema. Precedence:
// command-line override > config file > default. Defaults reproduce the
// reference training settings (K=10, q in [0,4], p_max=0.6, p_min=0.3,
// peak 6, sigma_rbf 0.7, epoch cap 200).
class RunConfig {
public:
    RunConfig();

    void load_file(const std::string& path);
    // Throws ConfigError for keys outside the schema.
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;

    RbfConfig rbf_config() const;
    TrainConfig train_config() const;

    // Fully-resolved key=value dump, defaults included.
    void write_resolved(const std::string& path) const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace dacnn
