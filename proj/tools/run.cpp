#include "run.hpp"

#include <algorithm>
#include <vector>

#include "wheelhouse/hash.hpp"
#include "wheelhouse/version.hpp"

namespace wheelhouse::cli {

namespace fs = std::filesystem;

Run::Run(fs::path out, std::string command, const Settings& settings, std::optional<std::uint64_t> seed)
    : out_(std::move(out)) {
    manifest_.command = std::move(command);
    manifest_.tool_version = kToolVersion;
    manifest_.seed = seed;
    manifest_.config = settings.values();
}

void Run::input(const fs::path& path) {
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) input(f);
        return;
    }
    manifest_.inputs[path.generic_string()] = sha256_hex(read_text_file(path));
}

void Run::start() {
    fs::create_directories(out_);
    manifest_.started_at = utc_timestamp();
    write_manifest(out_ / "manifest.json", manifest_);
    started_ = true;
}

void Run::write(const std::string& name, const std::string& content) {
    const fs::path p = out_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text_file(p, content);
    manifest_.outputs[name] = sha256_hex(content);
}

void Run::record(const std::string& name) { manifest_.outputs[name] = sha256_hex(read_text_file(out_ / name)); }

void Run::finish(bool ok) {
    if (!started_) return;
    manifest_.finished_at = utc_timestamp();
    manifest_.status = ok ? "ok" : "failed";
    write_manifest(out_ / "manifest.json", manifest_);
}

}  // namespace wheelhouse::cli
