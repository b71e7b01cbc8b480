#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "settings.hpp"
#include "wheelhouse/data_io.hpp"

namespace wheelhouse::cli {

// One invocation's output directory. The manifest is written by start(),
// before anything else, and rewritten by finish().
class Run {
public:
    Run(std::filesystem::path out, std::string command, const Settings& settings, std::optional<std::uint64_t> seed);

    // Files, or every regular file below a directory.
    void input(const std::filesystem::path& path);
    void start();
    std::filesystem::path path(const std::string& name) const { return out_ / name; }
    void write(const std::string& name, const std::string& content);
    // Records a file something else already wrote under the output directory.
    void record(const std::string& name);
    void finish(bool ok);

    const std::filesystem::path& out() const { return out_; }

private:
    std::filesystem::path out_;
    RunManifest manifest_;
    bool started_ = false;
};

}  // namespace wheelhouse::cli
