// msdc: command-line front end for the modular sparse distributed memory.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msdc/bench.hpp"
#include "msdc/config.hpp"
#include "msdc/error.hpp"
#include "msdc/experiments.hpp"
#include "msdc/memory.hpp"
#include "msdc/pattern_io.hpp"
#include "msdc/snapshot.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
};

struct GeometryOverrides {
    std::optional<std::uint32_t> width, height, active, cms, units, quantum;
    bool no_ledger = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--width", width, "Input grid width");
        cmd->add_option("--height", height, "Input grid height");
        cmd->add_option("--active", active, "Active pixels per pattern (S)");
        cmd->add_option("--cms", cms, "Competitive modules (Q)");
        cmd->add_option("--units", units, "Units per module (K)");
        cmd->add_option("--quantum", quantum, "Weight quantum (W_MAX)");
        cmd->add_flag("--no-ledger", no_ledger, "Do not keep the stored-item ledger");
    }
    void apply(msdc::ModelConfig& c) const {
        if (width) c.geometry.input_width = *width;
        if (height) c.geometry.input_height = *height;
        if (active) c.geometry.num_active = *active;
        if (cms) c.geometry.num_cms = *cms;
        if (units) c.geometry.units_per_cm = *units;
        if (quantum) c.weight_quantum = *quantum;
        if (no_ledger) c.ledger = false;
    }
};

msdc::ModelConfig resolve_config(const GlobalOptions& g, const GeometryOverrides* overrides) {
    msdc::ModelConfig c;
    if (!g.config_path.empty()) {
        msdc::from_json(msdc::read_json_file(g.config_path), c);
    }
    if (overrides) overrides->apply(c);
    if (g.seed) c.seed = *g.seed;
    c.validate();
    return c;
}

json model_json(const msdc::MemoryModel& m) {
    return {{"geometry", m.geometry()},
            {"params", m.params()},
            {"weight_quantum", m.weights().quantum()},
            {"ledger", m.ledger_enabled()},
            {"stored_count", m.stored_count()}};
}

std::vector<std::uint32_t> to_vec(std::span<const std::uint32_t> s) { return {s.begin(), s.end()}; }

json trace_json(const msdc::Selection& s, const msdc::ModelGeometry& g) {
    const std::size_t K = g.units_per_cm;
    json cms = json::array();
    for (std::size_t q = 0; q < g.num_cms; ++q) {
        auto slice = [&](const auto& v) {
            using T = typename std::decay_t<decltype(v)>::value_type;
            return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(q * K),
                                  v.begin() + static_cast<std::ptrdiff_t>((q + 1) * K));
        };
        cms.push_back({{"cm", q},
                       {"u", slice(s.trace.u)},
                       {"U", slice(s.trace.U)},
                       {"mu", slice(s.trace.mu)},
                       {"rho", slice(s.trace.rho)},
                       {"winner", s.code[q]}});
    }
    return {{"G", s.trace.familiarity}, {"eta", s.trace.eta}, {"code", to_vec(s.code.winners())},
            {"cms", cms}};
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw msdc::IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw msdc::IoError("write failed for " + path);
}

int cmd_init(const GlobalOptions& g, const GeometryOverrides& o, const std::string& out) {
    const auto c = resolve_config(g, &o);
    msdc::MemoryModel model(c.geometry, c.params, c.seed, c.ledger, c.weight_quantum);
    msdc::save_model(model, out);
    json doc = {{"snapshot", out}, {"config", c}};
    std::cout << doc.dump() << '\n';
    return 0;
}

int cmd_store(const GlobalOptions& g, const std::string& model_path,
              const std::string& pattern_path, const std::string& label) {
    auto model = msdc::load_model(model_path);
    const auto pattern = msdc::read_pattern_file(pattern_path, model.geometry());
    if (g.seed) model.reseed(*g.seed);
    const auto sel = model.store(pattern, label);
    msdc::save_model(model, model_path);
    json doc = {{"label", label},
                {"G", sel.trace.familiarity},
                {"eta", sel.trace.eta},
                {"code", to_vec(sel.code.winners())},
                {"model", model_json(model)}};
    if (g.seed) doc["seed"] = *g.seed;
    std::cout << doc.dump() << '\n';
    if (!g.trace_path.empty()) {
        auto t = trace_json(sel, model.geometry());
        t["model"] = model_json(model);
        write_json_file(g.trace_path, t);
    }
    return 0;
}

int cmd_query(const GlobalOptions& g, const std::string& model_path,
              const std::string& pattern_path, const std::string& mode_text) {
    const auto mode = msdc::parse_selection_mode(mode_text);
    auto model = msdc::load_model(model_path);
    const auto pattern = msdc::read_pattern_file(pattern_path, model.geometry());
    msdc::Rng rng = model.rng();
    if (g.seed) rng.seed(*g.seed);

    json doc = {{"mode", mode_text}, {"model", model_json(model)}};
    if (g.seed) doc["seed"] = *g.seed;
    msdc::Selection sel;
    if (model.ledger() && !model.ledger()->empty()) {
        auto report = model.belief_update(pattern, mode, rng);
        sel = report.selection;
        json items = json::array();
        for (const auto& it : report.items) {
            items.push_back({{"label", it.label},
                             {"input_similarity", it.input_similarity},
                             {"code_intersection", it.code_intersection},
                             {"likelihood", it.likelihood}});
        }
        doc["belief"] = items;
    } else {
        sel = model.retrieve(pattern, mode, rng);
    }
    doc["G"] = sel.trace.familiarity;
    doc["code"] = to_vec(sel.code.winners());
    std::cout << doc.dump() << '\n';
    if (!g.trace_path.empty()) {
        auto t = trace_json(sel, model.geometry());
        t["model"] = model_json(model);
        write_json_file(g.trace_path, t);
    }
    return 0;
}

int cmd_experiment(const GlobalOptions& g, const std::string& spec_path,
                   const std::string& out_dir, const std::string& format) {
    auto spec = msdc::experiments::load_scenario_spec(spec_path);
    if (g.seed) {
        const auto n = spec.seeds.size();
        for (std::size_t i = 0; i < n; ++i) spec.seeds[i] = *g.seed + i;
    }
    const auto fmt = msdc::experiments::parse_result_format(format);
    const auto results = msdc::experiments::run_scenario(spec);
    const auto files = msdc::experiments::emit_results(results, fmt, out_dir);
    json summary = json::array();
    for (const auto& s : msdc::experiments::summarize_probes(results)) {
        summary.push_back({{"probe", s.probe}, {"mean_G", s.mean_familiarity},
                           {"spearman", s.spearman}, {"n_seeds", s.n_seeds}});
    }
    json written = json::array();
    for (const auto& f : files) written.push_back(f.string());
    std::cout << json{{"files", written}, {"summary", summary}}.dump() << '\n';
    return 0;
}

int cmd_bench(const GlobalOptions& g, const GeometryOverrides& o, const std::string& out,
              const std::vector<std::uint64_t>& checkpoints, std::uint32_t trials) {
    const auto c = resolve_config(g, &o);
    msdc::bench::BenchConfig bc;
    bc.geometry = c.geometry;
    bc.params = c.params;
    bc.seed = c.seed;
    if (!checkpoints.empty()) bc.checkpoints = checkpoints;
    bc.trials_per_checkpoint = trials;
    const auto report = msdc::bench::run_scaling_bench(bc);
    auto doc = msdc::bench::to_json(report);
    doc["config"]["model"] = c;
    write_json_file(out, doc);
    std::cout << json{{"report", out}, {"op_counts_equal", report.op_counts_equal()}}.dump()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular sparse distributed associative memory"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON model config file");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--trace", g.trace_path, "Write the selection trace as JSON to this file");

    GeometryOverrides init_o;
    std::string init_out;
    auto* init = app.add_subcommand("init", "Create an empty model snapshot");
    init->add_option("snapshot", init_out, "Output snapshot path")->required();
    init_o.add_to(init);

    std::string model_path, pattern_path, label;
    auto* store = app.add_subcommand("store", "Learn a pattern into a model");
    store->add_option("model", model_path, "Model snapshot")->required();
    store->add_option("pattern", pattern_path, "Pattern file (0/1 grid or JSON)")->required();
    store->add_option("--label", label, "Label recorded in the ledger");

    std::string mode = "soft";
    auto* query = app.add_subcommand("query", "Retrieve a code and per-item likelihoods");
    query->add_option("model", model_path, "Model snapshot")->required();
    query->add_option("pattern", pattern_path, "Pattern file (0/1 grid or JSON)")->required();
    query->add_option("--mode", mode, "soft|hard")->check(CLI::IsMember({"soft", "hard"}));

    std::string spec_path, out_dir, format = "csv";
    auto* experiment = app.add_subcommand("experiment", "Run a multi-seed scenario");
    experiment->add_option("spec", spec_path, "Scenario spec (JSON)")->required();
    experiment->add_option("-o,--out", out_dir, "Output directory")->required();
    experiment->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    GeometryOverrides bench_o;
    std::string bench_out;
    std::vector<std::uint64_t> checkpoints;
    std::uint32_t trials = 301;
    auto* bench = app.add_subcommand("bench", "Fixed-time scaling benchmark");
    bench->add_option("-o,--out", bench_out, "Report path (JSON)")->required();
    bench->add_option("--checkpoints", checkpoints, "Stored-item checkpoints")->delimiter(',');
    bench->add_option("--trials", trials, "Timed trials per checkpoint")
        ->check(CLI::PositiveNumber);
    bench_o.add_to(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*init) return cmd_init(g, init_o, init_out);
        if (*store) return cmd_store(g, model_path, pattern_path, label);
        if (*query) return cmd_query(g, model_path, pattern_path, mode);
        if (*experiment) return cmd_experiment(g, spec_path, out_dir, format);
        if (*bench) return cmd_bench(g, bench_o, bench_out, checkpoints, trials);
    } catch (const msdc::IoError& e) {
        std::cerr << "msdc: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const msdc::Error& e) {
        std::cerr << "msdc: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "msdc: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
