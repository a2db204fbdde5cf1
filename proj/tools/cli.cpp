#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "salso/salso.hpp"

namespace salso::cli {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Everything a subcommand reads from the command line.
struct CliConfig {
    std::string draws_path;
    bool header = false;
    std::string loss = "binder";
    std::string base_loss = "binder";
    double a = 1.0;
    double b = 1.0;
    std::string max_clusters = "auto";
    std::size_t runs = 16;
    double p_sa = 0.5;
    std::size_t max_zealous = 10;
    std::size_t max_scans = 1000;
    std::uint64_t seed = 0;
    long long threads = -1;  // -1: not given on the command line
    std::string output = "-";
    std::string format;
    bool no_timing = false;

    // bench
    std::size_t scenarios = 50;
    std::size_t n = 20;
    int k_true = 4;
    std::size_t h = 100;
    double q = 0.3;

    // enumerate
    std::size_t cap = kDefaultEnumerationCap;
};

std::size_t resolve_threads(long long flag) {
    if (flag >= 0) return static_cast<std::size_t>(flag);
    if (const char* env = std::getenv("SALSO_KIT_THREADS")) {
        std::size_t value = 0;
        const std::string s = trim(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw InputError("SALSO_KIT_THREADS must be a nonnegative integer, got '" + s + "'");
        return value;
    }
    return 0;
}

// AUTO -> empty, UNCONSTRAINED -> n, otherwise a positive integer.
std::optional<int> resolve_max_clusters(const std::string& text, std::size_t n) {
    const std::string v = lower(trim(text));
    if (v == "auto") return std::nullopt;
    if (v == "unconstrained") return static_cast<int>(n);
    int k = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
    if (ec != std::errc() || ptr != v.data() + v.size() || k < 1)
        throw InputError("--max-clusters must be auto, unconstrained or a positive integer, got '" + text + "'");
    return k;
}

LossSpec loss_spec(const std::string& name, double a, double b) {
    const std::string key = lower(trim(name));
    const auto kind = parse_loss_kind(key);
    if (!kind || *kind == LossKind::OneZero) throw InputError("unknown loss '" + name + "'");
    LossSpec spec{*kind, a, b};
    spec.validate();
    if (*kind == LossKind::VI) spec.a = spec.b = 1.0;
    return spec;
}

json loss_json(const LossSpec& spec) {
    json j{{"kind", std::string(to_string(spec.kind))}};
    if (spec.weighted() || spec.kind == LossKind::VI) {
        j["a"] = spec.a;
        j["b"] = spec.b;
    }
    return j;
}

// Opens --output; "-" is the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw InputError("cannot open output file '" + path + "' for writing");
        stream_ = file_.get();
    }
    std::ostream& stream() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw InputError("failed writing output");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

std::string output_format(const CliConfig& c) {
    std::string f = lower(c.format);
    if (f.empty()) f = c.output.size() > 4 && lower(c.output.substr(c.output.size() - 4)) == ".csv" ? "csv" : "json";
    if (f != "json" && f != "csv") throw InputError("--format must be json or csv");
    return f;
}

json labels_json(const ClusterLabels& labels) { return json(labels.vector()); }

void write_estimate(const json& result, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << result.dump(2) << '\n';
        return;
    }
    for (int l : result["labels"]) out << l << '\n';
    const json& loss = result["loss"];
    out << "summary," << result["method"].get<std::string>() << ',' << loss["kind"].get<std::string>() << ','
        << (loss.contains("a") ? loss["a"].dump() : "") << ',' << (loss.contains("b") ? loss["b"].dump() : "")
        << ',' << result["expected_loss"].dump() << ',' << result["n_clusters"].dump() << '\n';
}

int estimate_command(const CliConfig& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const std::string format = output_format(c);
    const DrawsMatrix draws = read_draws(c.draws_path, c.header);
    const std::string loss = lower(trim(c.loss));
    json result;

    if (loss == "draws" || loss == "map") {
        LossSpec spec{LossKind::OneZero};
        ClusterLabels estimate;
        double value = 0.0;
        if (loss == "draws") {
            spec = loss_spec(c.base_loss, c.a, c.b);
            const auto d = draws_method(draws, spec);
            estimate = d.estimate;
            value = d.loss;
            result["draw_index"] = d.draw_index;
        } else {
            const auto m = map_estimate(draws);
            estimate = m.estimate;
            value = 1.0 - m.frequency;
            result["frequency"] = m.frequency;
        }
        result["method"] = loss;
        result["labels"] = labels_json(estimate);
        result["n_clusters"] = estimate.num_clusters();
        result["expected_loss"] = value;
        result["loss"] = loss_json(spec);
        result["n_runs"] = 0;
        result["best_run_index"] = nullptr;
        result["seed"] = c.seed;
        result["k_d_resolved"] = nullptr;
        result["runs"] = json::array();
    } else {
        const LossSpec spec = loss_spec(loss, c.a, c.b);
        SalsoConfig config;
        config.n_runs = c.runs;
        config.p_sa = c.p_sa;
        config.max_clusters = resolve_max_clusters(c.max_clusters, draws.num_items());
        config.n_max_zealous = c.max_zealous;
        config.max_scans = c.max_scans;
        config.seed = c.seed;
        config.n_workers = resolve_threads(c.threads);
        const SalsoResult r = salso(draws, spec, config);

        result["method"] = "salso";
        result["labels"] = labels_json(r.estimate);
        result["n_clusters"] = r.estimate.num_clusters();
        result["expected_loss"] = r.expected_loss;
        result["loss"] = loss_json(spec);
        result["n_runs"] = config.n_runs;
        result["best_run_index"] = r.best_run_index;
        result["seed"] = c.seed;
        result["k_d_resolved"] = r.max_clusters;
        json runs = json::array();
        for (const auto& d : r.runs) {
            runs.push_back({{"init", to_string(d.init)},
                            {"seed", d.seed},
                            {"scans", d.scans},
                            {"hit_max_scans", d.hit_max_scans},
                            {"zealous_attempts", d.zealous_attempts},
                            {"zealous_accepted", d.zealous_accepted},
                            {"wall_ms", d.wall_ms},
                            {"loss", d.loss}});
            if (c.no_timing) runs.back().erase("wall_ms");
        }
        result["runs"] = std::move(runs);
    }
    result["n_items"] = draws.num_items();
    result["n_draws"] = draws.num_draws();
    if (!c.no_timing)
        result["wall_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    Sink sink(c.output, out);
    write_estimate(result, format, sink.stream());
    sink.finish();
    return 0;
}

int psm_command(const CliConfig& c, std::ostream& out) {
    const DrawsMatrix draws = read_draws(c.draws_path, c.header);
    const SimilarityMatrix psm = build_psm(draws);
    Sink sink(c.output, out);
    char buf[32];
    for (std::size_t i = 0; i < psm.size(); ++i) {
        for (std::size_t j = 0; j < psm.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6f", psm(i, j));
            sink.stream() << (j ? "," : "") << buf;
        }
        sink.stream() << '\n';
    }
    sink.finish();
    return 0;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

// SALSO with the given settings (method A) against the one-at-a-time greedy
// preset (method B) over a seeded battery of synthetic posteriors.
int bench_command(const CliConfig& c, std::ostream& out) {
    const auto losses = split_list(c.loss);
    std::vector<LossSpec> specs;
    for (const auto& l : losses) specs.push_back(loss_spec(l, c.a, c.b));
    const std::size_t threads = resolve_threads(c.threads);

    Sink sink(c.output, out);
    std::ostream& os = sink.stream();
    os << "loss,method_a,method_b,prop_a_better,prop_b_better,mean_ms_a,mean_ms_b\n";
    if (c.scenarios > 0) {
        for (const auto& spec : specs) {
            std::size_t a_better = 0, b_better = 0;
            double ms_a = 0.0, ms_b = 0.0;
            for (std::size_t s = 0; s < c.scenarios; ++s) {
                const std::uint64_t seed = mix64(c.seed + s);
                const DrawsMatrix draws = synthetic_draws({c.n, c.k_true, c.h, c.q, seed});
                SalsoConfig a;
                a.n_runs = c.runs;
                a.p_sa = c.p_sa;
                a.n_max_zealous = c.max_zealous;
                a.max_scans = c.max_scans;
                a.seed = seed;
                a.n_workers = threads;
                a.max_clusters = resolve_max_clusters(c.max_clusters, draws.num_items());
                SalsoConfig b = rastelli_friel_mode(seed, a.max_clusters);
                b.max_scans = c.max_scans;
                const SalsoResult ra = salso(draws, spec, a);
                const SalsoResult rb = salso(draws, spec, b);
                ms_a += ra.wall_ms;
                ms_b += rb.wall_ms;
                const double tol = 1e-12 * std::max(1.0, std::abs(rb.expected_loss));
                if (ra.expected_loss < rb.expected_loss - tol) ++a_better;
                else if (rb.expected_loss < ra.expected_loss - tol) ++b_better;
            }
            const double m = static_cast<double>(c.scenarios);
            os << spec.describe() << ',' << '"' << "salso(" << c.max_zealous << ',' << c.p_sa << ',' << c.runs
               << " runs)" << '"' << ',' << "rf-mode" << ',' << a_better / m << ',' << b_better / m << ','
               << ms_a / m << ',' << ms_b / m << '\n';
        }
    }
    sink.finish();
    return 0;
}

int enumerate_command(const CliConfig& c, std::ostream& out) {
    Sink sink(c.output, out);
    std::ostream& os = sink.stream();
    if (c.draws_path.empty()) {
        PartitionEnumerator e(c.n, c.cap);
        do {
            const auto& labels = e.current();
            for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
            os << '\n';
        } while (e.advance());
    } else {
        const DrawsMatrix draws = read_draws(c.draws_path, c.header);
        const LossSpec spec = loss_spec(c.loss, c.a, c.b);
        SalsoConfig config;
        config.max_clusters = resolve_max_clusters(c.max_clusters, draws.num_items());
        const int k_d = config.resolve_max_clusters(draws);
        const auto best = brute_force_minimizer(draws, spec, k_d, c.cap);
        json minimizers = json::array();
        for (const auto& m : best.minimizers) minimizers.push_back(labels_json(m));
        json result{{"minimizers", minimizers},
                    {"expected_loss", best.loss},
                    {"loss", loss_json(spec)},
                    {"k_d_resolved", k_d}};
        os << result.dump(2) << '\n';
    }
    sink.finish();
    return 0;
}

} // namespace

DrawsMatrix parse_draws(std::istream& in, bool header, const std::string& source) {
    std::vector<std::vector<long long>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<long long> row;
        std::size_t col = 0;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            ++col;
            const std::string t = trim(cell);
            long long value = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
            if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
                throw InputError(source + ": row " + std::to_string(line_no) + ", column " + std::to_string(col) +
                                 ": '" + t + "' is not an integer label");
            row.push_back(value);
        }
        if (!line.empty() && trim(line).back() == ',')
            throw InputError(source + ": row " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                             ": empty cell");
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError(source + ": row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                             " labels, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(source + ": no draws found");
    return DrawsMatrix::from_raw(rows);
}

DrawsMatrix read_draws(const std::string& path, bool header) {
    if (path.empty()) throw InputError("--draws is required");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open draws file '" + path + "'");
    return parse_draws(in, header, path);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Point estimates of a partition from posterior samples (SALSO search)", "salso"};
    app.require_subcommand(1);
    CliConfig c;

    auto add_draws = [&c](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--draws", c.draws_path, "CSV file: one draw per row, n integer labels");
        if (required) opt->required();
        sub->add_flag("--header", c.header, "Skip the first row of the draws file");
    };
    auto add_loss = [&c](CLI::App* sub) {
        sub->add_option("--loss", c.loss, "binder, omari, vi, gvi, nvi, nid, id, vi-lb (estimate also: draws, map)");
        sub->add_option("--a", c.a, "Cost of splitting items that belong together");
        sub->add_option("--b", c.b, "Cost of merging items that belong apart");
    };
    auto add_search = [&c](CLI::App* sub) {
        sub->add_option("--max-clusters", c.max_clusters, "auto | unconstrained | positive integer");
        sub->add_option("--runs", c.runs, "Number of independent runs");
        sub->add_option("--p-sa", c.p_sa, "Probability of sequential-allocation initialization");
        sub->add_option("--max-zealous", c.max_zealous, "Maximum number of zealous updates per run");
        sub->add_option("--max-scans", c.max_scans, "Cap on sweetening scans");
        sub->add_option("--seed", c.seed, "Master seed");
        sub->add_option("--threads", c.threads, "Worker threads, 0 = all (env SALSO_KIT_THREADS)");
    };
    auto add_output = [&c](CLI::App* sub) { sub->add_option("--output", c.output, "Output path, - for stdout"); };

    auto* estimate = app.add_subcommand("estimate", "Minimize the posterior expected loss");
    add_draws(estimate, true);
    add_loss(estimate);
    add_search(estimate);
    add_output(estimate);
    estimate->add_option("--format", c.format, "json or csv (default from --output extension, else json)");
    estimate->add_option("--base-loss", c.base_loss, "Loss used to rank draws for --loss draws");
    estimate->add_flag("--no-timing", c.no_timing, "Omit wall-clock fields so output is byte-reproducible");

    auto* psm = app.add_subcommand("psm", "Write the posterior similarity matrix as CSV");
    add_draws(psm, true);
    add_output(psm);

    auto* bench = app.add_subcommand("bench", "Compare SALSO with the one-at-a-time greedy preset");
    add_loss(bench);
    add_search(bench);
    add_output(bench);
    bench->add_option("--scenarios", c.scenarios, "Number of synthetic instances");
    bench->add_option("--n", c.n, "Items per instance");
    bench->add_option("--k-true", c.k_true, "Clusters in the base partition");
    bench->add_option("--num-draws", c.h, "Draws per instance");
    bench->add_option("--q", c.q, "Per-item relabeling probability");

    auto* enumerate = app.add_subcommand("enumerate", "List all partitions, or brute-force the optimum for --draws");
    add_draws(enumerate, false);
    add_loss(enumerate);
    add_output(enumerate);
    enumerate->add_option("--n", c.n, "Number of items to enumerate");
    enumerate->add_option("--max-clusters", c.max_clusters, "auto | unconstrained | positive integer");
    enumerate->add_option("--cap", c.cap, "Largest n allowed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (estimate->parsed()) return estimate_command(c, out);
        if (psm->parsed()) return psm_command(c, out);
        if (bench->parsed()) return bench_command(c, out);
        return enumerate_command(c, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace salso::cli
