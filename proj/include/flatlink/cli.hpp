#pragma once

// The flatlink command-line front end. Exit codes: 0 success, 1 usage or
// parse error, 2 degenerate input, 3 budget exhausted, 4 centralizer check
// failed.

#include "flatlink/io.hpp"
#include "flatlink/svg.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>

namespace flatlink::cli {

enum ExitCode : int { kOk = 0, kParseError = 1, kDegenerate = 2, kBudget = 3, kCommutant = 4 };

struct RunConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> denoms;
    std::size_t prime_budget = kDefaultPrimeBudget;
    long entry_bound = 30;
    std::string level = "5";
    std::string output_path;
    std::string svg_path;
    std::string thinness = "1/4";
    std::string rotation = "1/8";
    std::size_t retries = kDefaultRetryBudget;
};

namespace detail {

using io::json;

inline json config_json(const RunConfig& c) {
    return {{"seed", c.seed},        {"denoms", c.denoms},       {"primes", c.prime_budget},
            {"bound", c.entry_bound}, {"level", c.level},         {"thinness", c.thinness},
            {"rotation", c.rotation}, {"retries", c.retries}};
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw io::FormatError("cannot write " + path);
    f << text;
}

inline void emit(const json& j, const RunConfig& c, std::ostream& out) { write_text(j.dump(2) + "\n", c.output_path, out); }

inline Rat positive_rat(const std::string& s, const char* what) {
    Rat r;
    try {
        r = parse_rat(s);
    } catch (const std::exception&) {
        throw io::FormatError(std::string("bad ") + what + ": " + s);
    }
    if (r <= 0) throw io::FormatError(std::string(what) + " must be positive");
    return r;
}

inline std::vector<Int> denominator_bounds(const RunConfig& c) {
    if (c.denoms.empty()) return denominator_ladder();
    std::vector<Int> out;
    for (const auto& s : c.denoms) {
        Int q;
        if (q.set_str(s, 10) != 0 || q < 1) throw io::FormatError("bad denominator bound: " + s);
        out.push_back(q);
    }
    return out;
}

/// "p" or "p:n".
inline std::pair<Int, std::optional<unsigned>> parse_level(const std::string& s) {
    auto colon = s.find(':');
    Int p;
    if (p.set_str(s.substr(0, colon), 10) != 0) throw io::FormatError("bad level: " + s);
    if (colon == std::string::npos) return {p, std::nullopt};
    try {
        long n = std::stol(s.substr(colon + 1));
        if (n < 1) throw io::FormatError("level exponent must be positive");
        return {p, static_cast<unsigned>(n)};
    } catch (const std::logic_error&) {
        throw io::FormatError("bad level: " + s);
    }
}

inline QMatrix seeded_conjugator(std::uint64_t seed, std::size_t m) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> d(-3, 3);
    for (;;) {
        QMatrix g(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) g(i, j) = d(rng);
        if (det(g) != 0) return g;
    }
}

}  // namespace detail

inline int cmd_link(const std::string& path, const RunConfig& c, std::ostream& out) {
    auto in = io::read_json_file(path);
    Arrangement arr = io::arrangement_from_json(in);
    LinePlanePair lp = io::pair_from_json(in);
    if (!in_general_position(arr, lp)) throw GeneralPositionError("link: input is not in general position");
    auto r = link_decision(arr, lp);
    io::json v = io::to_json(r);
    v["by_induction"] = link_decision_by_induction(arr, lp) == LinkDecision::Linked;
    io::json out_json = io::to_json(r);
    out_json["certificate"] = io::certificate("Link", {{"input", in}, {"config", detail::config_json(c)}}, v);
    detail::emit(out_json, c, out);
    return kOk;
}

inline int cmd_intersect(const std::string& path, const RunConfig& c, std::ostream& out) {
    auto in = io::read_json_file(path);
    FlatX x = flat_from_tau(io::matrix_from_json(io::field(in, "tau")));
    SubspaceY y = in.contains("rho") ? subspace_from_rho(io::matrix_from_json(in.at("rho")))
                                     : subspace_from_pair(io::pair_from_json(in));
    auto r = intersect(x, y);
    io::json j = io::to_json(r);
    j["certificate"] = io::certificate("Intersect", {{"input", in}, {"config", detail::config_json(c)}}, io::to_json(r));
    detail::emit(j, c, out);
    return r.kind == IntersectionKind::Degenerate ? kDegenerate : kOk;
}

inline int cmd_pattern(std::size_t n, std::size_t m, const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (n < 1 || m < 2) throw io::FormatError("pattern: need N >= 1 and m >= 2");
    Pattern p;
    try {
        p = synthesize_pattern(n, m, detail::positive_rat(c.thinness, "thinness"), detail::positive_rat(c.rotation, "rotation"),
                               c.retries);
    } catch (const BudgetExhausted& e) {
        err << "flatlink: " << e.what() << "\n";
        return kBudget;
    }
    if (c.seed != 0) p = conjugate_pattern(detail::seeded_conjugator(c.seed, m), p);
    io::json j = io::to_json(p);
    j["seed"] = c.seed;
    io::json verdicts{{"matrix", p.matrix}, {"rank", pattern_rank(p)}, {"certified", pattern_is_certified(p)}};
    j["certificate"]["run"] =
        io::certificate("Pattern", {{"N", n}, {"m", m}, {"config", detail::config_json(c)}}, verdicts);
    detail::emit(j, c, out);
    if (!c.svg_path.empty()) {
        if (m != 3) err << "flatlink: no drawing for m != 3, skipping " << c.svg_path << "\n";
        else detail::write_text(svg::render_pattern(p), c.svg_path, out);
    }
    return kOk;
}

inline int cmd_rationalize(const std::string& path, const RunConfig& c, std::ostream& out) {
    auto in = io::read_json_file(path);
    auto bounds = detail::denominator_bounds(c);
    io::json cfg{{"input", in}, {"config", detail::config_json(c)}};
    if (in.contains("matrix")) {
        Pattern p = io::pattern_from_json(in);
        auto r = rationalize_pattern(p, bounds, c.prime_budget);
        io::json j = io::to_json(r.pattern);
        j["stable"] = r.stable;
        j["denom_bound"] = io::to_json(r.denom_bound);
        io::json taus = io::json::array();
        for (const auto& t : r.taus) taus.push_back(io::to_json(t));
        j["taus"] = std::move(taus);
        j["certificate"]["run"] =
            io::certificate("Pattern", cfg, {{"stable", r.stable}, {"matrix", r.pattern.matrix}});
        detail::emit(j, c, out);
        return r.stable ? kOk : kBudget;
    }
    if (in.contains("frame")) {
        FloatFrame f;
        for (const auto& v : io::field(in, "frame")) f.push_back(io::reals_from_json(v));
        const bool irreducible = in.value("require_irreducible", true);
        auto r = rationalize_tau(f, bounds.back(), irreducible, std::nullopt, kDefaultPoolSize, c.prime_budget);
        io::json j = io::to_json(r);
        j["denom_bound"] = io::to_json(bounds.back());
        detail::emit(j, c, out);
        return kOk;
    }
    auto r = rationalize_pair(io::reals_from_json(io::field(in, "line")), io::reals_from_json(io::field(in, "plane")),
                              bounds.front());
    detail::emit({{"line", io::to_json(r.pair.line)},
                  {"plane", io::to_json(r.pair.plane)},
                  {"rho", io::to_json(r.rho)},
                  {"denom_bound", io::to_json(bounds.front())}},
                 c, out);
    return kOk;
}

inline int cmd_descend(const std::string& path, const RunConfig& c, std::ostream& out, std::ostream& err) {
    auto in = io::read_json_file(path);
    QMatrix tau = io::matrix_from_json(io::field(in, "tau"));
    QMatrix rho = in.contains("rho") ? io::matrix_from_json(in.at("rho")) : involution_from_pair(io::pair_from_json(in));
    if (!scalar_commutant_check(tau, rho)) {
        err << "flatlink: tau and rho have a non-scalar common centralizer\n";
        return kCommutant;
    }
    auto [p, n] = detail::parse_level(c.level);
    LevelReport rep;
    if (n) {
        rep.level = CongruenceLevel(p, *n);
        rep.levels_tried = {*n};
        rep.entry_bound = c.entry_bound;
        rep.hits = enumerate_same_sign(tau, rho, rep.level, c.entry_bound);
        rep.all_same_sign = all_same_sign(rep.hits);
        rep.identity_hit = intersect(flat_from_tau(tau), subspace_from_rho(rho)).kind == IntersectionKind::TransversePoint;
    } else {
        rep = find_same_sign_level(tau, rho, p, c.entry_bound);
    }
    std::ostringstream lines;
    for (const auto& h : rep.hits) lines << io::to_json(h).dump() << "\n";
    io::json summary{{"level", {io::to_json(rep.level.p), rep.level.n}},
                     {"bound", rep.entry_bound},
                     {"hits", rep.hits.size()},
                     {"all_same_sign", rep.all_same_sign},
                     {"identity_hit", rep.identity_hit},
                     {"levels_tried", rep.levels_tried}};
    summary["certificate"] = io::certificate("Descent", {{"input", in}, {"config", detail::config_json(c)}},
                                             {{"all_same_sign", rep.all_same_sign}, {"hits", rep.hits.size()}});
    lines << summary.dump() << "\n";
    detail::write_text(lines.str(), c.output_path, out);
    return kOk;
}

inline int cmd_rank(const std::string& path, const RunConfig& c, std::ostream& out) {
    Pattern p = io::pattern_from_json(io::read_json_file(path));
    detail::emit({{"N", p.N}, {"rank", pattern_rank(p)}, {"matrix", p.matrix}}, c, out);
    return kOk;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Exact linking, intersection patterns and congruence descent for flats in SL_m(R)/SO(m)"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string input;
    std::size_t n = 0, m = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.output_path, "Write the result here instead of stdout");
        sub->add_option("--seed", cfg.seed, "Seed for all randomness");
    };
    auto* link = app.add_subcommand("link", "Decide linking for an arrangement and a line-hyperplane pair");
    link->add_option("input", input, "JSON file with points, line, plane")->required();
    add_common(link);
    auto* inter = app.add_subcommand("intersect", "Intersect the flat of tau with the subspace of rho");
    inter->add_option("input", input, "JSON file with tau and rho (or line and plane)")->required();
    add_common(inter);
    auto* pat = app.add_subcommand("pattern", "Synthesize a certified N x N intersection pattern");
    pat->add_option("N", n, "Number of flats and subspaces")->required();
    pat->add_option("m", m, "Matrix size")->required();
    pat->add_option("--thinness", cfg.thinness, "Initial simplex thinness (rational)");
    pat->add_option("--rotation", cfg.rotation, "Initial rotation (rational)");
    pat->add_option("--retries", cfg.retries, "Retry budget for refinement");
    pat->add_option("--svg", cfg.svg_path, "Write an RP^2 drawing (m = 3)");
    add_common(pat);
    auto* rat = app.add_subcommand("rationalize", "Rationalize a pattern, a real frame or a real line-hyperplane pair");
    rat->add_option("input", input, "JSON file")->required();
    rat->add_option("--denoms", cfg.denoms, "Denominator bounds to try, in order")->delimiter(',');
    rat->add_option("--primes", cfg.prime_budget, "Prime budget for irreducibility certificates");
    add_common(rat);
    auto* desc = app.add_subcommand("descend", "Enumerate signed intersections over a congruence subgroup");
    desc->add_option("input", input, "JSON file with tau and rho")->required();
    desc->add_option("--level", cfg.level, "p (level found automatically) or p:n");
    desc->add_option("--bound", cfg.entry_bound, "Entry bound for the enumeration");
    add_common(desc);
    auto* rank_cmd = app.add_subcommand("rank", "Rank of a pattern's sign matrix");
    rank_cmd->add_option("input", input, "Pattern JSON file")->required();
    add_common(rank_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }
    try {
        if (*link) return cmd_link(input, cfg, out);
        if (*inter) return cmd_intersect(input, cfg, out);
        if (*pat) return cmd_pattern(n, m, cfg, out, err);
        if (*rat) return cmd_rationalize(input, cfg, out);
        if (*desc) return cmd_descend(input, cfg, out, err);
        if (*rank_cmd) return cmd_rank(input, cfg, out);
    } catch (const io::FormatError& e) {
        err << "flatlink: " << e.what() << "\n";
        return kParseError;
    } catch (const io::json::exception& e) {
        err << "flatlink: " << e.what() << "\n";
        return kParseError;
    } catch (const std::invalid_argument& e) {
        err << "flatlink: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::domain_error& e) {
        err << "flatlink: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::exception& e) {
        err << "flatlink: " << e.what() << "\n";
        return kParseError;
    }
    return kParseError;
}

}  // namespace flatlink::cli
