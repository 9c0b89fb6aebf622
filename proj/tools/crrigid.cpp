// crrigid <command> [options] <file|corpus-id>
#include "crrigid/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"Infinitesimal deformations and rigidity of CR embeddings M in C^2 -> M' in C^3"};
    app.require_subcommand(1);

    crr::RunOptions opt;
    int order = 0, condOrder = 0, window = 0, d = 0;
    std::vector<std::string> sets;
    std::string out;
    bool quiet = false;

    auto common = [&](CLI::App *c) {
        c->add_option("--order", order, "largest condition order");
        c->add_option("--cond-order", condOrder, "first condition order");
        c->add_option("--window", window, "equal dimensions needed without a matching lower bound");
        c->add_option("--d", d, "square-free d of the coefficient field Q(i, sqrt d)");
        c->add_flag("--oracle", opt.oracle, "also run the direct truncation oracle");
        c->add_flag("--timing", opt.timing, "include wall-clock time in the report");
        c->add_option("--set", sets, "override a let-constant, e.g. --set t=1/2");
        c->add_option("--out", out, "write the JSON report to a file instead of stdout");
        c->add_flag("--quiet", quiet, "no summary on stderr");
    };

    std::string input;
    std::vector<std::pair<std::string, CLI::App *>> cmds;
    const std::pair<const char *, const char *> commands[] = {
        {"check", "validate the input: Levi form, target, transversality, k0"},
        {"normal-coords", "normal coordinates of the source"},
        {"deform", "dimension and basis of the infinitesimal deformations"},
        {"rigidity", "dimension, trivial subspaces and rigidity verdict"},
        {"genericity", "full-rank certificate for a map (z, F, w) into a hyperquadric"},
        {"reproduce", "run the input's command and check its expectations"},
    };
    for (auto [name, help] : commands) {
        auto *c = app.add_subcommand(name, help);
        common(c);
        c->add_option("input", input, "input file or corpus id")->required();
        cmds.push_back({name, c});
    }
    auto *self = app.add_subcommand("selftest", "reproduce every corpus entry");
    common(self);
    cmds.push_back({"selftest", self});
    app.add_subcommand("list", "list corpus entries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (app.got_subcommand("list")) {
        for (auto &id : crr::corpusIds()) std::cout << id << "\n";
        return 0;
    }
    std::string command;
    for (auto &[n, c] : cmds)
        if (c->parsed()) command = n;

    if (order) opt.order = order;
    if (condOrder) opt.condOrder = condOrder;
    if (window) opt.window = window;
    if (d) opt.d = d;
    for (auto &s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "--set expects name=value\n";
            return 2;
        }
        opt.set[s.substr(0, eq)] = s.substr(eq + 1);
    }

    crr::RunResult r = crr::runCommand(command, input, opt);
    std::string doc = r.report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << doc;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return 2;
        }
        f << doc;
    }
    if (!quiet) std::cerr << r.summary;
    return r.exitCode;
}
