#include "dacnn/config.hpp"

#include <fstream>
#include <sstream>

namespace dacnn {

RunConfig::RunConfig() {
    values_ = {
        // paths
        {"images", ""},
        {"labels", ""},
        {"dataset", ""},
        {"model", ""},
        {"field", ""},
        {"out", "out"},
        // augmentation
        {"replicas", "10"},
        {"q_lo", "0"},
        {"q_hi", "4"},
        {"scheme", "grid"},
        {"seed", "5"},
        {"q_min", "0.5"},
        // head
        {"k", "10"},
        {"p_max", "0.6"},
        {"p_min", "0.3"},
        {"a", "0"},
        {"b", "4"},
        {"peak", "6"},
        {"sigma_rbf", "0.7"},
        // training
        {"mode", "baseline"},
        {"epochs", "200"},
        {"batch_size", "64"},
        {"learning_rate", "0.1"},
        {"momentum", "0.0"},
        {"shuffle", "1"},
        // metrics
        {"tau", "0.5"},
        {"bin_width", "0.25"},
        {"error_free_denominator", "all"},
        {"population", "all"},
    };
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second = value;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

int RunConfig::get_int(const std::string& key) const {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(get(key), &pos);
        if (pos != get(key).size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' is not an integer: " + get(key));
    }
}

double RunConfig::get_double(const std::string& key) const {
    try {
        std::size_t pos = 0;
        const double v = std::stod(get(key), &pos);
        if (pos != get(key).size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' is not a number: " + get(key));
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("key '" + key + "' is not a boolean: " + v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    try {
        return std::stoull(get(key));
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' is not an unsigned integer: " + get(key));
    }
}

RbfConfig RunConfig::rbf_config() const {
    RbfConfig cfg;
    cfg.p_max = get_double("p_max");
    cfg.p_min = get_double("p_min");
    cfg.a = get_double("a");
    cfg.b = get_double("b");
    cfg.A = get_double("peak");
    cfg.sigma_rbf = get_double("sigma_rbf");
    cfg.K = get_int("k");
    cfg.validate();
    return cfg;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.mode = mode_from_name(get("mode"));
    cfg.epochs = get_int("epochs");
    cfg.batch_size = get_int("batch_size");
    cfg.learning_rate = get_double("learning_rate");
    cfg.momentum = get_double("momentum");
    cfg.seed = get_u64("seed");
    cfg.shuffle = get_bool("shuffle");
    cfg.validate();
    return cfg;
}

void RunConfig::write_resolved(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
}

}  // namespace dacnn
