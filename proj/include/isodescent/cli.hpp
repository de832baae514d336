#pragma once

// Command-line front end. parse_args and execute are separate so the whole
// pipeline can run in-process; tools/isodescent_main.cpp only wires stdio.

#include <algorithm>
#include <atomic>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "isodescent/report.hpp"

namespace isodescent::cli {

enum class Command { classify, selmer, rank, repr, scan, descent };

enum ExitCode : int { exit_ok = 0, exit_inconsistent = 1, exit_usage = 2, exit_io = 3 };

struct RunConfig {
    Command command = Command::classify;
    std::optional<std::uint64_t> p;
    std::optional<std::uint64_t> range_max;
    std::optional<Int> a, b;
    std::int64_t height_bound = default_height_bound;
    OutputFormat format = OutputFormat::json;
    std::optional<std::string> output_path;
    unsigned jobs = 1;
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = exit_ok;
    std::string message;  // help or error text
};

inline unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

namespace detail {

inline const std::map<std::string, OutputFormat>& format_names() {
    static const std::map<std::string, OutputFormat> m{
        {"json", OutputFormat::json}, {"csv", OutputFormat::csv}, {"text", OutputFormat::text}};
    return m;
}

inline bool parse_bigint(const std::string& s, Int& out) {
    try {
        out = isodescent::detail::parse_int(s);
        return true;
    } catch (const FormatError&) {
        return false;
    }
}

}  // namespace detail

inline ParseOutcome parse_args(const std::vector<std::string>& args) {
    CLI::App app{"2-isogeny descent for y^2 = x^3 + a x^2 + b x and the family y^2 = x^3 + 18p^2 x", "isodescent"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.jobs = default_jobs();
    std::uint64_t p = 0, max = 0;
    std::string a_text, b_text, out_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "json, csv or text")
            ->transform(CLI::CheckedTransformer(detail::format_names(), CLI::ignore_case))
            ->default_str("json");
        sub->add_option("--out", out_path, "write to this file instead of stdout");
    };
    auto add_height = [&](CLI::App* sub) {
        sub->add_option("--height-bound", cfg.height_bound, "point search bound on max(|numerator|, denominator)")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 20))
            ->default_str(std::to_string(default_height_bound));
    };
    auto add_p = [&](CLI::App* sub) { sub->add_option("--p", p, "a prime")->required()->check(CLI::PositiveNumber); };

    struct Sub {
        Command cmd;
        CLI::App* app;
    };
    std::vector<Sub> subs;
    {
        auto* s = app.add_subcommand("classify", "residue class, quartic symbol and rank ceiling of p");
        add_p(s);
        add_common(s);
        subs.push_back({Command::classify, s});
    }
    {
        auto* s = app.add_subcommand("selmer", "closed-form and computed Selmer groups for p");
        add_p(s);
        add_common(s);
        subs.push_back({Command::selmer, s});
    }
    {
        auto* s = app.add_subcommand("rank", "rank bounds for y^2 = x^3 + 18p^2 x");
        add_p(s);
        add_height(s);
        add_common(s);
        subs.push_back({Command::rank, s});
    }
    {
        auto* s = app.add_subcommand("repr", "a^4 + 2b^4 = 3p and a^4 + 18b^4 = p");
        add_p(s);
        add_common(s);
        subs.push_back({Command::repr, s});
    }
    {
        auto* s = app.add_subcommand("scan", "one record per prime up to --max");
        s->add_option("--max", max, "largest prime to include")->required()->check(CLI::PositiveNumber);
        s->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
        add_height(s);
        add_common(s);
        subs.push_back({Command::scan, s});
    }
    {
        auto* s = app.add_subcommand("descent", "rank bounds for y^2 = x^3 + a x^2 + b x");
        s->add_option("--a", a_text, "integer a")->required();
        s->add_option("--b", b_text, "integer b")->required();
        add_height(s);
        add_common(s);
        subs.push_back({Command::descent, s});
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    ParseOutcome outcome;
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        outcome.message = app.help();
        for (const auto& s : subs)
            if (s.app->parsed()) outcome.message = s.app->help();
        return outcome;
    } catch (const CLI::ParseError& e) {
        outcome.exit_code = exit_usage;
        outcome.message = std::string("error: ") + e.what() + "\n\n" + app.help();
        return outcome;
    }

    auto usage = [&](const std::string& msg) {
        outcome.exit_code = exit_usage;
        outcome.message = "error: " + msg + "\n";
        return outcome;
    };

    for (const auto& s : subs)
        if (s.app->parsed()) cfg.command = s.cmd;
    switch (cfg.command) {
        case Command::classify:
        case Command::selmer:
        case Command::rank:
        case Command::repr:
            if (!is_prime(p)) return usage("--p " + std::to_string(p) + " is not prime");
            cfg.p = p;
            break;
        case Command::scan: cfg.range_max = max; break;
        case Command::descent: {
            Int a, b;
            if (!detail::parse_bigint(a_text, a)) return usage("--a must be an integer");
            if (!detail::parse_bigint(b_text, b)) return usage("--b must be an integer");
            if (b == 0 || a * a == 4 * b) return usage("the curve y^2 = x^3 + a x^2 + b x is singular");
            cfg.a = a;
            cfg.b = b;
            break;
        }
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    outcome.config = cfg;
    return outcome;
}

struct Execution {
    std::vector<OutputRecord> records;
    const Schema* schema = nullptr;
    int exit_code = exit_ok;
    std::string diagnostics;
};

/// verify_prime over every prime <= max, spread over `jobs` threads. Results
/// land in slots indexed by the prime's position, so order never depends on
/// scheduling.
inline std::vector<FamilyReport> scan_primes(std::uint64_t max, std::int64_t height_bound, unsigned jobs) {
    const std::vector<std::uint64_t> primes = primes_up_to(max);
    std::vector<FamilyReport> out(primes.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < primes.size(); i = next++) out[i] = verify_prime(primes[i], height_bound);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(primes.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

inline Execution execute(const RunConfig& cfg) {
    Execution ex;
    auto note = [&](const FamilyReport& f) {
        if (f.consistent) return;
        ex.exit_code = exit_inconsistent;
        ex.diagnostics += "p = " + std::to_string(f.prime_class.p) + ": " + f.issue + "\n";
    };
    switch (cfg.command) {
        case Command::classify:
            ex.schema = &schemas::classify();
            ex.records.push_back(classify_record(*cfg.p));
            break;
        case Command::selmer: {
            ex.schema = &schemas::selmer();
            const FamilyReport f = verify_prime(*cfg.p, cfg.height_bound);
            note(f);
            ex.records.push_back(selmer_record(f));
            break;
        }
        case Command::rank: {
            ex.schema = &schemas::rank();
            const FamilyReport f = verify_prime(*cfg.p, cfg.height_bound);
            note(f);
            ex.records.push_back(rank_record(f));
            break;
        }
        case Command::repr:
            ex.schema = &schemas::repr();
            ex.records.push_back(repr_record(*cfg.p));
            break;
        case Command::scan:
            ex.schema = &schemas::scan();
            for (const FamilyReport& f : scan_primes(*cfg.range_max, cfg.height_bound, cfg.jobs)) {
                note(f);
                ex.records.push_back(scan_record(f));
            }
            break;
        case Command::descent: {
            ex.schema = &schemas::descent();
            const CurveModel e(*cfg.a, *cfg.b);
            try {
                ex.records.push_back(descent_record(e, descend(e, cfg.height_bound), true));
            } catch (const ConsistencyError& err) {
                ex.exit_code = exit_inconsistent;
                ex.diagnostics += std::string(err.what()) + "\n";
                DescentResult empty;
                empty.height_bound = cfg.height_bound;
                ex.records.push_back(descent_record(e, empty, false));
            }
            break;
        }
    }
    return ex;
}

/// Full pipeline with stdio; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const ParseOutcome parsed = parse_args(args);
    if (!parsed.config) {
        (parsed.exit_code == exit_ok ? out : err) << parsed.message;
        return parsed.exit_code;
    }
    const RunConfig& cfg = *parsed.config;
    Execution ex;
    try {
        ex = execute(cfg);
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    err << ex.diagnostics;
    const std::string bytes = render(ex.records, *ex.schema, cfg.format);
    if (cfg.output_path) {
        try {
            write_file_atomically(*cfg.output_path, bytes);
        } catch (const IoError& e) {
            err << "error: " << e.what() << "\n";
            return exit_io;
        }
    } else {
        out << bytes;
        out.flush();
        if (!out) return exit_io;
    }
    return ex.exit_code;
}

}  // namespace isodescent::cli
