// taskc: compile a task program and print its state machines, layouts or CFGs.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sfj/errors.hpp"
#include "sfj/taskc/compiler.hpp"

int main(int argc, char** argv) {
    CLI::App app{"taskc: task DSL compiler"};
    std::string path;
    std::string emit = "ir";
    bool check_only = false;
    bool no_taskwait = false;
    bool block_level = false;
    std::vector<std::string> defines;
    app.add_option("file", path, "source file (.gt)")->required();
    app.add_option("--emit", emit, "ir, layout or cfg")
        ->check(CLI::IsMember({"ir", "layout", "cfg"}));
    app.add_flag("--check", check_only, "only report diagnostics");
    app.add_flag("--assume-no-taskwait", no_taskwait);
    app.add_flag("--block-level", block_level);
    app.add_option("-D,--define", defines, "override a constant: NAME=VALUE");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(path);
    if (!in) {
        std::cerr << "taskc: cannot read '" << path << "'\n";
        return 2;
    }
    std::stringstream src;
    src << in.rdbuf();

    sfj::taskc::CompileOptions opts;
    opts.assume_no_taskwait = no_taskwait;
    opts.block_level = block_level;
    for (const auto& d : defines) {
        const auto eq = d.find('=');
        if (eq == std::string::npos) {
            std::cerr << "taskc: bad define '" << d << "' (want NAME=VALUE)\n";
            return 2;
        }
        try {
            opts.consts[d.substr(0, eq)] = std::stoll(d.substr(eq + 1), nullptr, 0);
        } catch (const std::exception&) {
            std::cerr << "taskc: bad value in define '" << d << "'\n";
            return 2;
        }
    }
    try {
        auto result = sfj::taskc::compile(src.str(), opts);
        if (check_only) return 0;
        if (emit == "ir") {
            std::cout << sfj::taskc::print_program(result.ir);
        } else if (emit == "layout") {
            for (const auto& f : result.ir.functions) {
                if (f.is_task) std::cout << sfj::taskc::print_layout(f);
            }
        } else {
            for (std::size_t i = 0; i < result.cfgs.size(); ++i) {
                std::cout << "function " << result.ir.functions[i].name << "\n"
                          << sfj::taskc::print_cfg(result.cfgs[i], &result.live[i]);
            }
        }
    } catch (const sfj::CompileError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << path << ":" << d.to_string() << "\n";
        return 1;
    }
    return 0;
}
