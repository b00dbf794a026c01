#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cnets/scene_build.hpp"

namespace fs = std::filesystem;
using namespace cnets;

namespace {

enum Exit { kOk = 0, kAuditFail = 1, kUsage = 2 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

json parse_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": not valid JSON: " + e.what());
    }
}

// A scene carries metadata and vertices; anything else is a config.
bool looks_like_scene(const json& j) { return j.is_object() && j.contains("metadata") && j.contains("vertices"); }

fs::path numbered(const fs::path& out, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu", i);
    fs::path p = out;
    p.replace_filename(out.stem().string() + buf + out.extension().string());
    return p;
}

int report(const std::vector<AuditEntry>& audit, std::optional<double> tolerance, const std::string& report_path) {
    std::vector<AuditEntry> a = audit;
    if (tolerance) override_tolerance(a, *tolerance);
    std::cout << audit_report(a);
    if (!report_path.empty()) write_file(report_path, audit_json(a).dump(2) + "\n");
    const bool ok = std::all_of(a.begin(), a.end(), [](const AuditEntry& e) { return e.pass; });
    if (!ok)
        for (const auto& e : a)
            if (!e.pass) std::cerr << "audit failed: " << e.name << "\n";
    return ok ? kOk : kAuditFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build, audit and export discrete confocal nets"};
    app.require_subcommand(1);
    std::optional<double> tolerance;
    app.add_option("--tolerance", tolerance, "override every audit tolerance");

    std::string gen_config, gen_out;
    auto* gen = app.add_subcommand("generate", "build a scene from a config");
    gen->add_option("config", gen_config, "config file (JSON)")->required();
    gen->add_option("-o,--output", gen_out, "scene file; sequences write <stem>_NNN.json")->required();

    std::string audit_in, audit_report_path;
    auto* aud = app.add_subcommand("audit", "run every invariant of a config or scene");
    aud->add_option("input", audit_in, "config or scene file")->required();
    aud->add_option("--report", audit_report_path, "also write the report as JSON");

    std::string exp_in, exp_out, exp_format = "json";
    auto* exp = app.add_subcommand("export", "convert a scene");
    exp->add_option("scene", exp_in, "scene file")->required();
    exp->add_option("--format", exp_format, "json, obj or svg")->check(CLI::IsMember({"json", "obj", "svg"}));
    exp->add_option("-o,--output", exp_out, "output file")->required();

    for (auto* sub : {gen, aud, exp}) sub->add_option("--tolerance", tolerance, "override every audit tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            const json config = parse_json(gen_config);
            const auto scenes = generate_scenes(config);
            std::vector<AuditEntry> all;
            for (std::size_t i = 0; i < scenes.size(); ++i) {
                const fs::path path = scenes.size() == 1 ? fs::path(gen_out) : numbered(gen_out, i);
                write_file(path, serialize(scenes[i]));
                std::cout << "wrote " << path.string() << " (" << scenes[i].vertices.size() << " vertices, "
                          << scenes[i].planes.size() << " planes)\n";
                for (const auto& e : scenes[i].audit) all.push_back(e);
            }
            return report(all, tolerance, "");
        }
        if (*aud) {
            const json j = parse_json(audit_in);
            if (looks_like_scene(j)) return report(audit_scene(scene_from_json(j)), tolerance, audit_report_path);
            std::vector<AuditEntry> all;
            for (const auto& s : generate_scenes(j))
                for (const auto& e : s.audit) all.push_back(e);
            return report(all, tolerance, audit_report_path);
        }
        const Scene s = parse_scene(read_file(exp_in));
        if (exp_format == "json") write_file(exp_out, serialize(s));
        else if (exp_format == "obj") write_file(exp_out, export_obj(s));
        else write_file(exp_out, export_svg(s));
        return kOk;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
