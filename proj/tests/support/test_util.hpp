#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace naab::testing {

// Self-deleting scratch directory for test artifacts.
class temp_dir {
public:
    explicit temp_dir(const std::string& tag) {
        std::string templ =
            (std::filesystem::temp_directory_path() / (tag + ".XXXXXX")).string();
        if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
        path_ = templ;
    }

    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    temp_dir(const temp_dir&) = delete;
    temp_dir& operator=(const temp_dir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct command_result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs a shell command capturing stdout/stderr. Used by the CLI tests.
inline command_result run_command(const std::string& command) {
    const temp_dir dir("naab-cmd");
    const auto out_path = dir.path() / "out";
    const auto err_path = dir.path() / "err";
    const std::string full =
        command + " >" + out_path.string() + " 2>" + err_path.string();
    const int status = std::system(full.c_str());
    command_result result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text_file(out_path);
    result.err = read_text_file(err_path);
    return result;
}

// Path of the naab binary under test, from the environment.
inline std::string naab_binary() {
    const char* path = std::getenv("NAAB_BIN");
    if (!path || !*path) throw std::runtime_error("NAAB_BIN is not set");
    return path;
}

} // namespace naab::testing
