// lab-cli: generators, verifiers, entropy/scenery inspection, distance-set
// scans, the headline experiments, and calibration. See README for formats.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "fractlab/entropy.hpp"
#include "fractlab/experiments.hpp"
#include "fractlab/io.hpp"

using namespace fractlab;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    require(out.good(), "cannot open " + out_path + " for writing");
    out << j.dump(2) << '\n';
    require(bool(out.flush()), "write failed: " + out_path);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    require(out.good(), "cannot open " + out_path + " for writing");
    out << text;
    require(bool(out.flush()), "write failed: " + out_path);
}

// "b=2 L=9 keep=(0)(3)" or "b=1 L=14 keep=(0,0)(1,0)(0,1)"
PatternSpec parse_pattern(const std::string& text, int dim) {
    PatternSpec p;
    p.dim = dim;
    bool have_b = false, have_l = false, have_keep = false;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok.rfind("b=", 0) == 0) {
            p.block_depth = std::stoi(tok.substr(2));
            have_b = true;
        } else if (tok.rfind("L=", 0) == 0) {
            p.levels = std::stoi(tok.substr(2));
            have_l = true;
        } else if (tok.rfind("keep=", 0) == 0) {
            const std::string list = tok.substr(5);
            size_t pos = 0;
            while (pos < list.size()) {
                require(list[pos] == '(', "pattern: expected '(' in keep list");
                const size_t close = list.find(')', pos);
                require(close != std::string::npos, "pattern: unclosed '(' in keep list");
                const std::string cell = list.substr(pos + 1, close - pos - 1);
                const size_t comma = cell.find(',');
                std::array<uint32_t, 2> kept{0, 0};
                if (comma == std::string::npos) {
                    kept[0] = uint32_t(std::stoul(cell));
                } else {
                    kept[0] = uint32_t(std::stoul(cell.substr(0, comma)));
                    kept[1] = uint32_t(std::stoul(cell.substr(comma + 1)));
                }
                p.kept.push_back(kept);
                pos = close + 1;
            }
            have_keep = true;
        } else {
            fail("pattern: unrecognized token '" + tok + "'");
        }
    }
    require(have_b && have_l && have_keep, "pattern needs b=, L= and keep=");
    return p;
}

PinPolicy parse_pins(const std::string& pins, uint64_t seed) {
    PinPolicy policy;
    policy.seed = seed;
    if (pins == "all") return policy;
    policy.all = false;
    try {
        policy.sample_n = std::stoull(pins);
    } catch (const std::exception&) {
        fail("--pins expects 'all' or a sample size, got '" + pins + "'");
    }
    require(policy.sample_n > 0, "--pins sample size must be positive");
    return policy;
}

json regularity_json(const RegularityReport& rep) {
    auto per_k = json::array();
    for (const auto& row : rep.per_k)
        per_k.push_back({{"k", row.k},
                         {"min_count", row.min_count},
                         {"max_count", row.max_count},
                         {"C_k", row.C_k}});
    return {{"s", rep.s},
            {"fitted", rep.fitted},
            {"C_star", rep.C_star},
            {"per_k", per_k},
            {"worst_point", {rep.worst_point[0], rep.worst_point[1]}},
            {"worst_k", rep.worst_k},
            {"worst_bound", rep.worst_upper ? "upper" : "lower"},
            {"sampled", rep.sampled},
            {"sample_size", rep.sample_size},
            {"seed", rep.sample_seed}};
}

json scan_json(const GridSet& a, double t, const PinnedScanResult& scan) {
    auto hist = json::array();
    for (const auto& [count, pins] : scan.histogram)
        hist.push_back({{"count", count}, {"pins", pins}});
    return {{"size", a.size()},
            {"scale", a.scale},
            {"t", t},
            {"threshold", scan.threshold},
            {"pins_scanned", scan.pins.size()},
            {"sampled", scan.sampled},
            {"sample_seed", scan.sample_seed},
            {"exceptional", scan.exceptional},
            {"exceptional_fraction",
             double(scan.exceptional) / double(scan.pins.size())},
            {"histogram", hist}};
}

uint64_t view_hash(const DyadicMeasure& view) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](uint64_t v) {
        for (int b = 0; b < 64; b += 8) {
            h ^= (v >> b) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [code, mass] : view.cells) {
        mix(code);
        mix(uint64_t(llround(std::ldexp(mass, 30))));
    }
    return h;
}

int run(int argc, char** argv) {
    CLI::App app{"discrete fractal-geometry laboratory"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: all cores)");

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "write a GridSet file");
    std::string g_type = "random", g_pattern, g_out;
    int g_dim = 2, g_scale = 10;
    double g_s = 1.4, g_C = 4.0;
    uint64_t g_seed = 1;
    gen->add_option("--type", g_type, "uniform | pattern | katz-tao | random")
        ->check(CLI::IsMember({"uniform", "pattern", "katz-tao", "random"}));
    gen->add_option("--dim", g_dim, "ambient dimension (1 or 2)");
    gen->add_option("--scale", g_scale, "grid depth N");
    gen->add_option("--pattern", g_pattern, "e.g. \"b=1 L=6 keep=(0,0)(1,0)(0,1)\"");
    gen->add_option("--s", g_s, "target dimension (random)");
    gen->add_option("--C", g_C, "band constant (random)");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--out", g_out, "output path (default: stdout)");

    // ---- verify-regular ----
    auto* ver = app.add_subcommand("verify-regular", "regularity constants of a set");
    std::string v_in, v_out;
    double v_s = -1.0;
    uint64_t v_sample = 200000, v_seed = 1;
    ver->add_option("--in", v_in, "GridSet file")->required();
    ver->add_option("--s", v_s, "claimed dimension (omit to fit by OLS)");
    ver->add_option("--sample", v_sample, "pin-sampling threshold");
    ver->add_option("--seed", v_seed, "pin-sampling seed");
    ver->add_option("--out", v_out, "report path (default: stdout)");

    // ---- entropy ----
    auto* ent = app.add_subcommand("entropy", "dyadic entropies of a measure");
    std::string e_in, e_out, e_format = "json";
    int e_k = 0, e_k1 = -1;
    ent->add_option("--in", e_in, "DyadicMeasure file")->required();
    ent->add_option("--k", e_k, "partition depth (default: full depth)");
    ent->add_option("--k1", e_k1, "also report H(D_k | D_k1)");
    ent->add_option("--format", e_format)->check(CLI::IsMember({"json", "csv"}));
    ent->add_option("--out", e_out, "output path (default: stdout)");

    // ---- scenery ----
    auto* scn = app.add_subcommand("scenery", "scenery atoms of a measure");
    std::string s_in, s_out, s_proj;
    int s_from = 0, s_to = -1, s_q = 3;
    scn->add_option("--in", s_in, "DyadicMeasure file")->required();
    scn->add_option("--from", s_from, "window start A");
    scn->add_option("--to", s_to, "window end B (default: N - q)");
    scn->add_option("--q", s_q, "view depth");
    scn->add_option("--proj", s_proj, "comma-separated projection angles");
    scn->add_option("--out", s_out, "CSV path (default: stdout)");

    // ---- pinned-scan ----
    auto* pin = app.add_subcommand("pinned-scan", "pinned distance-set counts");
    std::string p_in, p_out, p_csv, p_pins = "all";
    double p_t = 0.8;
    uint64_t p_seed = 1;
    pin->add_option("--in", p_in, "GridSet file")->required();
    pin->add_option("--t", p_t, "threshold exponent: exceptional iff count < 2^(tN)");
    pin->add_option("--pins", p_pins, "all | sample size");
    pin->add_option("--seed", p_seed, "pin-sampling seed");
    pin->add_option("--csv", p_csv, "per-pin CSV path");
    pin->add_option("--out", p_out, "JSON summary path (default: stdout)");

    // ---- dist-count ----
    auto* dst = app.add_subcommand("dist-count", "two-set distance-set count");
    std::string d_in, d_in2, d_out;
    dst->add_option("--in", d_in, "GridSet file A")->required();
    dst->add_option("--in2", d_in2, "GridSet file B (default: A)");
    dst->add_option("--out", d_out, "JSON summary path (default: stdout)");

    // ---- conical ----
    auto* con = app.add_subcommand("conical", "well-surroundedness scan");
    std::string c_in, c_out, c_csv, c_pins = "all";
    double c_beta = 0.03125, c_rmin = 0.125, c_s = -1.0, c_kappa = -1.0;
    uint64_t c_seed = 1;
    con->add_option("--in", c_in, "GridSet file")->required();
    con->add_option("--beta", c_beta, "cone half-opening");
    con->add_option("--rmin", c_rmin, "minimum witness distance");
    con->add_option("--s", c_s, "dimension for the cardinality bound");
    con->add_option("--kappa", c_kappa, "exponent for the cardinality bound");
    con->add_option("--pins", c_pins, "all | sample size");
    con->add_option("--seed", c_seed, "pin-sampling seed");
    con->add_option("--csv", c_csv, "per-point CSV path");
    con->add_option("--out", c_out, "JSON summary path (default: stdout)");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "headline experiments");
    exp->require_subcommand(1);
    auto* t11 = exp->add_subcommand("theorem11", "exceptional-pin scarcity");
    std::string t_type = "random", t_pattern, t_out, t_pins = "all";
    int t_dim = 2, t_scale = 10;
    double t_s = 1.4, t_C = 4.0, t_t = 0.8;
    uint64_t t_seed = 1, t_pin_seed = 1;
    t11->add_option("--type", t_type)
        ->check(CLI::IsMember({"uniform", "pattern", "katz-tao", "random"}));
    t11->add_option("--dim", t_dim);
    t11->add_option("--scale", t_scale);
    t11->add_option("--pattern", t_pattern);
    t11->add_option("--s", t_s);
    t11->add_option("--C", t_C);
    t11->add_option("--seed", t_seed);
    t11->add_option("--t", t_t, "threshold exponent");
    t11->add_option("--pins", t_pins, "all | sample size");
    t11->add_option("--pin-seed", t_pin_seed);
    t11->add_option("--out", t_out, "report path (default: stdout)");

    auto* ktx = exp->add_subcommand("katz-tao", "max pinned-count scaling");
    std::vector<int> k_scales = {4, 6, 8, 10, 12};
    std::string k_out;
    ktx->add_option("--scales", k_scales, "even N values");
    ktx->add_option("--out", k_out, "report path (default: stdout)");

    auto* inq = exp->add_subcommand("inequalities", "battery inequality sweep");
    std::string i_constants = "constants.json", i_out;
    inq->add_option("--constants", i_constants, "calibration constants file");
    inq->add_option("--out", i_out, "report path (default: stdout)");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "measure and freeze the constants");
    std::string cal_out = "constants.json";
    uint64_t cal_seed = 1;
    cal->add_option("--out", cal_out, "constants path");
    cal->add_option("--seed", cal_seed, "battery seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    set_max_threads(threads);

    if (gen->parsed()) {
        GeneratorSpec g;
        g.kind = g_type;
        g.dim = g_dim;
        g.scale = g_scale;
        g.s = g_s;
        g.C = g_C;
        g.seed = g_seed;
        if (g_type == "pattern") {
            require(!g_pattern.empty(), "generate --type pattern needs --pattern");
            g.pattern = parse_pattern(g_pattern, g_dim);
        }
        const GridSet a = build_generator(g);
        if (g_out.empty()) {
            write_gridset(std::cout, a);
        } else {
            save_gridset(g_out, a);
            std::fprintf(stderr, "wrote %zu points at scale %d to %s\n", a.size(),
                         a.scale, g_out.c_str());
        }
        return 0;
    }

    if (ver->parsed()) {
        const GridSet a = load_gridset(v_in);
        std::optional<double> s;
        if (v_s >= 0.0) s = v_s;
        const auto rep = regularity_constant(a, s, v_sample, v_seed);
        emit(regularity_json(rep), v_out);
        return 0;
    }

    if (ent->parsed()) {
        const DyadicMeasure mu = load_measure(e_in);
        const int k = e_k > 0 ? e_k : mu.depth;
        const auto h = shannon_entropy(mu, k);
        json j = {{"depth", mu.depth},
                  {"k", k},
                  {"H_bits", h.bits},
                  {"normalized", normalized_entropy(mu, k)}};
        if (e_k1 >= 0) {
            j["k1"] = e_k1;
            j["H_conditional_bits"] = conditional_entropy(mu, k, e_k1).bits;
        }
        if (e_format == "csv") {
            std::ostringstream csv;
            csv << "k,H_bits,normalized\n"
                << k << ',' << format_double(h.bits) << ','
                << format_double(normalized_entropy(mu, k)) << '\n';
            emit_text(csv.str(), e_out);
        } else {
            emit(j, e_out);
        }
        return 0;
    }

    if (scn->parsed()) {
        const DyadicMeasure mu = load_measure(s_in);
        const int to = s_to >= 0 ? s_to : mu.depth - s_q;
        const auto scenery = measure_scenery(mu, s_from, to, s_q);
        std::vector<double> angles;
        if (!s_proj.empty()) {
            std::istringstream in(s_proj);
            std::string tok;
            while (std::getline(in, tok, ',')) angles.push_back(std::stod(tok));
        }
        std::ostringstream csv;
        csv << "atom,weight,H_q";
        for (double a : angles) csv << ",H_proj_" << a;
        csv << '\n';
        for (const auto& atom : scenery.atoms) {
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx",
                          (unsigned long long)view_hash(atom.view));
            csv << hex << ',' << format_double(atom.weight) << ','
                << format_double(normalized_entropy(atom.view, s_q));
            for (double a : angles)
                csv << ','
                    << format_double(projected_entropy(
                           atom.view, Direction::from_angle(a), s_q));
            csv << '\n';
        }
        emit_text(csv.str(), s_out);
        return 0;
    }

    if (pin->parsed()) {
        const GridSet a = load_gridset(p_in);
        const auto scan = pinned_scan(a, p_t, parse_pins(p_pins, p_seed));
        if (!p_csv.empty()) {
            std::ostringstream csv;
            csv << "pin,jx,jy,count\n";
            for (size_t i = 0; i < scan.pins.size(); ++i) {
                const auto pt = a.point(scan.pins[i]);
                csv << scan.pins[i] << ',' << pt[0] << ',' << pt[1] << ','
                    << scan.counts[i] << '\n';
            }
            emit_text(csv.str(), p_csv);
        }
        emit(scan_json(a, p_t, scan), p_out);
        return 0;
    }

    if (dst->parsed()) {
        const GridSet a = load_gridset(d_in);
        const GridSet b = d_in2.empty() ? a : load_gridset(d_in2);
        const uint64_t count = distance_set_count(a, b);
        emit({{"count", count},
              {"size_a", a.size()},
              {"size_b", b.size()},
              {"scale", a.scale}},
             d_out);
        return 0;
    }

    if (con->parsed()) {
        const GridSet b = load_gridset(c_in);
        std::vector<size_t> pins(b.size());
        for (size_t i = 0; i < pins.size(); ++i) pins[i] = i;
        bool sampled = false;
        const PinPolicy policy = parse_pins(c_pins, c_seed);
        if (!policy.all && policy.sample_n < b.size()) {
            pins = sample_indices(b.size(), policy.sample_n, policy.seed);
            sampled = true;
        }
        std::vector<uint8_t> flags(pins.size(), 0);
        parallel_for(pins.size(), [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i)
                flags[i] =
                    well_surrounded(b.unit_point(pins[i]), b, c_beta, c_rmin) ? 1 : 0;
        });
        uint64_t surrounded = 0;
        for (uint8_t f : flags) surrounded += f;
        const uint64_t exceptional = pins.size() - surrounded;
        const double fraction = double(exceptional) / double(pins.size());
        if (!c_csv.empty()) {
            std::ostringstream csv;
            csv << "index,jx,jy,well_surrounded\n";
            for (size_t i = 0; i < pins.size(); ++i) {
                const auto pt = b.point(pins[i]);
                csv << pins[i] << ',' << pt[0] << ',' << pt[1] << ','
                    << int(flags[i]) << '\n';
            }
            emit_text(csv.str(), c_csv);
        }
        json j = {{"size", b.size()},        {"beta", c_beta},
                  {"r_min", c_rmin},         {"points_scanned", pins.size()},
                  {"sampled", sampled},      {"exceptional", exceptional},
                  {"exceptional_fraction", fraction},
                  {"well_surrounded_fraction", 1.0 - fraction}};
        bool bound_ok = true;
        if (c_s > 0.0 && c_kappa > 0.0) {
            const double bound = std::exp2((1.0 - c_kappa) * c_s * b.scale);
            j["cardinality_bound"] = bound;
            bound_ok = !sampled ? double(exceptional) <= bound
                                : fraction * double(b.size()) <= bound;
            j["within_bound"] = bound_ok;
        }
        emit(j, c_out);
        return bound_ok ? 0 : 1;
    }

    if (t11->parsed()) {
        GeneratorSpec g;
        g.kind = t_type;
        g.dim = t_dim;
        g.scale = t_scale;
        g.s = t_s;
        g.C = t_C;
        g.seed = t_seed;
        if (t_type == "pattern") {
            require(!t_pattern.empty(), "theorem11 --type pattern needs --pattern");
            g.pattern = parse_pattern(t_pattern, t_dim);
        }
        const auto rep = experiment_theorem11(g, t_t, parse_pins(t_pins, t_pin_seed));
        emit(report_to_json(rep), t_out);
        return rep.all_pass() ? 0 : 1;
    }

    if (ktx->parsed()) {
        const auto rep = experiment_katz_tao(k_scales);
        emit(report_to_json(rep), k_out);
        return rep.all_pass() ? 0 : 1;
    }

    if (inq->parsed()) {
        const auto constants = load_constants(i_constants);
        const auto rep = experiment_inequalities(constants);
        emit(report_to_json(rep), i_out);
        return rep.all_pass() ? 0 : 1;
    }

    if (cal->parsed()) {
        const auto constants = calibrate(cal_seed);
        save_constants(cal_out, constants);
        std::fprintf(stderr, "wrote calibration constants to %s\n", cal_out.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
