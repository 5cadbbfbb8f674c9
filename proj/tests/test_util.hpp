#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "dbf/data.hpp"
#include "dbf/rng.hpp"

namespace testutil {

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path dir;

    explicit TempDir(const std::string& tag) {
        dir = std::filesystem::temp_directory_path() /
              ("dbf_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// 27-year synthetic DALY table: per group, every cause is an affine map of a
// smooth latent trend plus relative noise.
struct SyntheticSpec {
    int firstYear = 1990;
    int years = 27;
    int communicable = 7;
    int noncommunicable = 10;
    int injury = 6;
    double noise = 0.01;
    std::uint64_t seed = 7;
};

inline std::pair<std::string, std::string> synthetic_csv(const SyntheticSpec& spec) {
    dbf::Rng rng(spec.seed);

    std::vector<std::string> causes;
    std::vector<std::string> groupNames;
    auto add_group = [&](const std::string& prefix, int count, const std::string& group) {
        for (int i = 0; i < count; ++i) {
            causes.push_back(prefix + std::to_string(i + 1));
            groupNames.push_back(group);
        }
    };
    add_group("cd", spec.communicable, "communicable");
    add_group("ncd", spec.noncommunicable, "noncommunicable");
    add_group("inj", spec.injury, "injury");

    // latent trend per group, in the model operator vocabulary
    auto latent = [&](const std::string& group, double t) {
        if (group == "communicable") return 40.0 - 1.1 * t + 0.012 * t * t;
        if (group == "noncommunicable") return 12.0 + 0.45 * t + 0.02 * t * t;
        return 5.0 + 0.21 * t - 0.9 * std::log(t);
    };
    // noise is measured against the latent's dynamic range, so "1% noise"
    // perturbs the trend, not the (much larger) baseline level
    auto latent_range = [&](const std::string& group) {
        double lo = 1e300, hi = -1e300;
        for (int i = 1; i <= spec.years; ++i) {
            const double v = latent(group, static_cast<double>(i));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    };

    std::vector<double> scale(causes.size());
    std::vector<double> offset(causes.size());
    for (std::size_t j = 0; j < causes.size(); ++j) {
        scale[j] = rng.uniform(500.0, 5000.0);
        offset[j] = rng.uniform(20000.0, 90000.0);
    }

    std::string csv = "year";
    for (const auto& c : causes) csv += "," + c;
    csv += "\n";
    for (int i = 0; i < spec.years; ++i) {
        const int year = spec.firstYear + i;
        const double t = static_cast<double>(i + 1);
        csv += std::to_string(year);
        for (std::size_t j = 0; j < causes.size(); ++j) {
            const double range = latent_range(groupNames[j]);
            const double noisy = latent(groupNames[j], t) + spec.noise * range * rng.gauss();
            const double value = offset[j] + scale[j] * noisy;
            csv += "," + std::to_string(value < 0.0 ? 0.0 : value);
        }
        csv += "\n";
    }

    std::string groups = "{";
    for (std::size_t j = 0; j < causes.size(); ++j) {
        if (j) groups += ",";
        groups += "\"" + causes[j] + "\":\"" + groupNames[j] + "\"";
    }
    groups += "}";
    return {csv, groups};
}

} // namespace testutil
