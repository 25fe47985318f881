#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace algas {

/// Invalid configuration. Collects every violation found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    explicit ConfigError(std::string issue)
        : ConfigError(std::vector<std::string>{std::move(issue)}) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

/// Ticking a core that has been marked failed.
class FailedCoreError : public std::logic_error {
public:
    explicit FailedCoreError(int core_index)
        : std::logic_error("core " + std::to_string(core_index) + " has failed and cannot tick") {}
};

} // namespace algas
