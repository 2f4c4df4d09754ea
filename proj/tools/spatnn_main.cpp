// spatnn command-line toolkit: NNCT segregation/association tests,
// Cuzick-Edwards k-NN tests, second-order functions, and the Monte Carlo
// size/power harness.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spatnn/io.hpp"
#include "spatnn/spatnn.hpp"

namespace {

using namespace spatnn;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;         // unexpected failure
constexpr int kExitDegenerate = 2;    // degenerate data (tests undefined)
constexpr int kExitBadInput = 3;      // malformed input or invalid arguments
constexpr int kExitUsage = 64;        // command line usage error

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::pair<int, int> parse_sizes(const std::string& s) {
    const auto parts = split_list(s);
    if (parts.size() != 2) throw invalid_input("--sizes expects `n1,n2`");
    return {std::stoi(parts[0]), std::stoi(parts[1])};
}

int resolve_class(const std::string& token, const std::vector<std::string>& names, int q) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == token) return static_cast<int>(i);
    try {
        const int id = std::stoi(token);
        if (id >= 0 && id < q) return id;
    } catch (const std::exception&) {
    }
    throw invalid_input("unknown class `" + token + "`");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw invalid_input(out_path + ": cannot open for writing");
    out << text;
}

Metric make_metric(const std::string& name, const Rect& region) {
    if (name == "euclidean") return Metric::euclidean();
    if (name == "toroidal") return Metric::toroidal(region);
    throw invalid_input("--metric must be euclidean or toroidal");
}

json nn_stats_json(const PointSet& ps, const NNGraph& g, const Nnct& table,
                   const std::vector<std::string>& names) {
    double mean = 0.0;
    for (double d : g.nn_dist) mean += d;
    mean /= static_cast<double>(g.n());
    double ss = 0.0;
    for (double d : g.nn_dist) ss += (d - mean) * (d - mean);
    const double sd = g.n() > 1 ? std::sqrt(ss / (g.n() - 1)) : 0.0;

    json qk = json::object();
    for (std::size_t k = 1; k < g.qk.size(); ++k)
        if (g.qk[k] > 0) qk["Q" + std::to_string(k)] = g.qk[k];
    return json{{"n", ps.n()},
                {"classes", names},
                {"class_sizes", ps.class_sizes()},
                {"Q", g.Q},
                {"R", g.R},
                {"Qk", qk},
                {"mean_nn_distance", mean},
                {"sd_nn_distance", sd},
                {"nnct", nnct_to_json(table)}};
}

// ---------------------------------------------------------------- nn-stats

struct NnStatsArgs {
    std::string input, metric = "euclidean", format = "json", out;
};

int run_nn_stats(const NnStatsArgs& a) {
    const LoadedPoints lp = read_points_csv_file(a.input);
    const Metric m = make_metric(a.metric, lp.ps.region());
    const NNGraph g = build_nngraph(lp.ps, m);
    const Nnct table = build_nnct(lp.ps, g);
    if (a.format == "json") {
        emit(nn_stats_json(lp.ps, g, table, lp.class_names).dump(2), a.out);
        return kExitOk;
    }
    if (a.format != "csv") throw invalid_input("--format must be json or csv");
    std::ostringstream os;
    const json j = nn_stats_json(lp.ps, g, table, lp.class_names);
    os << "key,value\n";
    os << "n," << j["n"] << "\nQ," << j["Q"] << "\nR," << j["R"] << "\n";
    os << "mean_nn_distance," << j["mean_nn_distance"] << "\n";
    os << "sd_nn_distance," << j["sd_nn_distance"] << "\n";
    for (int i = 0; i < table.q(); ++i)
        for (int jj = 0; jj < table.q(); ++jj)
            os << "N_" << i << jj << "," << table.count(i, jj) << "\n";
    emit(os.str(), a.out);
    return kExitOk;
}

// -------------------------------------------------------------------- test

struct TestArgs {
    std::string input, nnct_path;
    std::string methods = "all";
    std::string null_model = "rl";
    int nperm = 0;
    int cov_nperm = 2000;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::string format = "json", out;
    std::string metric = "euclidean";
    double buffer = 0.0;
    std::string buffer_mode = "inner";
    std::string case_class;
    std::string k_list = "1,2,3,4,5";
    std::string combine;
    double mc_gamma = -0.013, mc_delta = 1.643;
};

std::vector<Method> parse_overall_methods(const std::string& spec, bool& want_ce) {
    std::vector<Method> out;
    want_ce = false;
    for (const auto& tok : split_list(spec)) {
        if (tok == "all") {
            out = {Method::pielou, Method::pielou_mc, Method::dixon_overall,
                   Method::v1, Method::v2, Method::v3};
        } else if (tok == "pielou") out.push_back(Method::pielou);
        else if (tok == "pielou-mc") out.push_back(Method::pielou_mc);
        else if (tok == "dixon") out.push_back(Method::dixon_overall);
        else if (tok == "v1") out.push_back(Method::v1);
        else if (tok == "v2") out.push_back(Method::v2);
        else if (tok == "v3") out.push_back(Method::v3);
        else if (tok == "ce") want_ce = true;
        else throw invalid_input("unknown method `" + tok + "`");
    }
    return out;
}

std::string results_csv(const std::vector<json>& results) {
    std::ostringstream os;
    os << "method,cell_or_k,statistic,df,p_asymptotic,p_permutation,small_cell,error\n";
    for (const auto& r : results) {
        os << r.value("method", "");
        os << ',';
        if (r.contains("cell")) os << r["cell"][0] << '|' << r["cell"][1];
        else if (r.contains("k")) os << r["k"].get<int>();
        os << ',';
        if (r.contains("statistic")) os << r["statistic"].get<double>();
        os << ',';
        if (r.contains("df")) os << r["df"].get<int>();
        os << ',';
        if (r.contains("p_asymptotic")) os << format_pvalue(r["p_asymptotic"].get<double>());
        os << ',';
        if (r.contains("p_permutation")) os << format_pvalue(r["p_permutation"].get<double>());
        os << ',';
        os << (r.value("small_cell", false) ? 1 : 0) << ',';
        if (r.contains("error")) os << r["error"].get<std::string>();
        os << '\n';
    }
    return os.str();
}

int run_test(const TestArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.input.empty() == a.nnct_path.empty())
        throw invalid_input("provide exactly one of --input (points CSV) or --nnct (summary JSON)");

    json report;
    report["config"] = {{"methods", a.methods}, {"null", a.null_model}, {"nperm", a.nperm},
                        {"seed", a.seed},       {"alpha", a.alpha},     {"metric", a.metric},
                        {"buffer", a.buffer}};
    const NullModel nm = a.null_model == "csr" ? NullModel::csr_conditional : NullModel::rl;
    bool want_ce = false;
    const std::vector<Method> methods = parse_overall_methods(a.methods, want_ce);
    const McCorrection corr(a.mc_gamma, a.mc_delta);
    std::vector<json> results;
    bool any_small_cell = false;

    if (!a.nnct_path.empty()) {
        // NNCT-only mode: all analytic tests from (counts, Q, R); no
        // coordinates, so permutation p-values are unavailable.
        const NnctSummary s = read_nnct_summary_file(a.nnct_path);
        report["input"] = {{"nnct", a.nnct_path}, {"Q", s.Q}, {"R", s.R},
                           {"classes", s.class_names}, {"mode", "nnct-only"}};
        if (want_ce)
            throw invalid_input("Cuzick-Edwards tests need point coordinates, not an NNCT summary");
        std::optional<CellMoments> cm;
        if (s.table.q() == 2)
            cm = analytic_moments_2class(s.table.row_sums(), s.Q, s.R);
        for (Method m : methods) {
            json rj;
            try {
                if (m == Method::pielou) rj = test_result_to_json(pielou(s.table));
                else if (m == Method::pielou_mc) rj = test_result_to_json(pielou_mc(s.table, corr));
                else if (!cm)
                    throw moments_unavailable(
                        std::string(method_name(m)) +
                        ": analytic q-class covariances are not available for q > 2; "
                        "this test needs point coordinates (permutation covariance)");
                else rj = test_result_to_json(evaluate_nnct_method(m, s.table, *cm, corr));
                rj["p_permutation_unavailable"] = true;
                any_small_cell = any_small_cell || rj.value("small_cell", false);
            } catch (const error& e) {
                rj["method"] = method_name(m);
                rj["error"] = e.what();
            }
            results.push_back(std::move(rj));
        }
        report["nnct"] = nnct_to_json(s.table);
    } else {
        const LoadedPoints lp = read_points_csv_file(a.input);
        const PointSet& ps = lp.ps;
        const Metric metric = make_metric(a.metric, ps.region());
        const NNGraph g = build_nngraph(ps, metric);
        std::optional<std::vector<bool>> mask;
        if (a.buffer > 0.0)
            mask = buffer_filter(ps, a.buffer,
                                 a.buffer_mode == "outer" ? BufferMode::outer : BufferMode::inner);
        const Nnct table = build_nnct(ps, g, mask ? &*mask : nullptr);
        report["input"] = {{"points", a.input}, {"n", ps.n()}, {"classes", lp.class_names},
                           {"class_sizes", ps.class_sizes()}, {"mode", "points"}};
        report["nn_stats"] = nn_stats_json(ps, g, table, lp.class_names);

        // Buffer masks change the row sums away from the class sizes, which
        // the analytic moments are built on, so masked tables go through the
        // permutation machinery.
        CellMoments cm = (ps.num_classes() == 2 && !mask)
                             ? analytic_moments_2class(table.row_sums(), g.Q, g.R)
                             : permutation_cov(ps, g, std::max(a.cov_nperm, 100), a.seed + 0x9e37);
        if (cm.source == MomentSource::permutation)
            report["moments"] = {{"source", "permutation"}, {"nperm", cm.nperm}};
        else
            report["moments"] = {{"source", "analytic-2class"}};

        for (Method m : methods) {
            json rj;
            try {
                TestResult r = evaluate_nnct_method(m, table, cm, corr);
                r.null_model = nm;
                if (a.nperm > 0 && !mask) {
                    const auto perm = nnct_permutation(m, ps, g, cm, r.statistic, a.nperm,
                                                       a.seed, 0, corr);
                    r.p_permutation = perm.pvalue;
                    r.diagnostics["perm_replicates"] = static_cast<double>(perm.replicates);
                }
                any_small_cell = any_small_cell || r.small_cell;
                rj = test_result_to_json(r);
            } catch (const error& e) {
                rj["method"] = method_name(m);
                rj["error"] = e.what();
            }
            results.push_back(std::move(rj));
        }

        if (want_ce) {
            if (a.case_class.empty())
                throw invalid_input("--case-class is required for Cuzick-Edwards methods");
            const int cc = resolve_class(a.case_class, lp.class_names, ps.num_classes());
            CeOptions opt;
            opt.nperm = a.nperm > 0 ? a.nperm : 999;
            opt.seed = a.seed;
            CaseControlView view(ps, cc);
            for (const auto& ktok : split_list(a.k_list)) {
                TestResult r = ce_tk(view, std::stoi(ktok), metric, opt);
                r.null_model = nm;
                results.push_back(test_result_to_json(r));
            }
            if (!a.combine.empty()) {
                const auto parts = split_list(a.combine, '-');
                if (parts.size() != 2) throw invalid_input("--combine expects `k1-k2`");
                std::vector<int> ks;
                for (int k = std::stoi(parts[0]); k <= std::stoi(parts[1]); ++k) ks.push_back(k);
                TestResult r = ce_combined(view, ks, metric, opt);
                r.null_model = nm;
                results.push_back(test_result_to_json(r));
            }
        }
    }

    report["results"] = results;
    if (any_small_cell)
        report["notes"] = json::array(
            {"some expected cell counts are <= 5; asymptotic p-values are unreliable there - "
             "prefer the permutation p-value (--nperm)"});
    const auto t1 = std::chrono::steady_clock::now();
    report["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    if (a.format == "json") emit(report.dump(2), a.out);
    else if (a.format == "csv") emit(results_csv(results), a.out);
    else throw invalid_input("--format must be json or csv");

    for (const auto& r : results)
        if (r.contains("error")) return kExitDegenerate;
    return kExitOk;
}

// ------------------------------------------------------------------- kfunc

struct KfuncArgs {
    std::string input, which = "Lii", classes, out;
    double tmax = 0.0;
    int nt = 25;
    int nsim = 99;
    double band = 0.95;
    std::uint64_t seed = 1;
    double bandwidth = 0.0;
    std::string null_model;
};

int run_kfunc(const KfuncArgs& a) {
    const LoadedPoints lp = read_points_csv_file(a.input);
    const PointSet& ps = lp.ps;
    const double tmax = a.tmax > 0.0 ? a.tmax : 0.25 * ps.region().min_side();
    const DistanceGrid grid = DistanceGrid::uniform(tmax, a.nt);

    std::vector<int> cls;
    for (const auto& tok : split_list(a.classes))
        cls.push_back(resolve_class(tok, lp.class_names, ps.num_classes()));

    std::string null_model = a.null_model;
    if (null_model.empty()) null_model = (a.which == "D") ? "rl" : "csr";
    auto replicate = [&](RngStream& rng) {
        return null_model == "rl" ? rl_replicate(ps, rng) : csr_replicate(ps, rng);
    };

    FunctionEstimate est;
    if (a.which == "Lii") {
        if (cls.size() != 1) throw invalid_input("Lii needs --classes A");
        est = ripley_l_uni(ps, cls[0], grid);
        const auto env = pointwise_envelope(
            grid.size(), a.nsim, a.band, a.seed, [&](RngStream& rng, std::size_t) {
                return ripley_l_uni(replicate(rng), cls[0], grid).values;
            });
        est.lower = env.lower;
        est.upper = env.upper;
        est.nsim = a.nsim;
        est.band = a.band;
    } else if (a.which == "Lij") {
        if (cls.size() != 2) throw invalid_input("Lij needs --classes A,B");
        est = ripley_l_biv(ps, cls[0], cls[1], grid);
        const auto env = pointwise_envelope(
            grid.size(), a.nsim, a.band, a.seed, [&](RngStream& rng, std::size_t) {
                return ripley_l_biv(replicate(rng), cls[0], cls[1], grid).values;
            });
        est.lower = env.lower;
        est.upper = env.upper;
        est.nsim = a.nsim;
        est.band = a.band;
    } else if (a.which == "g") {
        const double h = a.bandwidth > 0.0 ? a.bandwidth : default_pcf_bandwidth(ps);
        const int ci = cls.size() > 0 ? cls[0] : -1;
        const int cj = cls.size() > 1 ? cls[1] : -1;
        est = pair_correlation(ps, grid, h, ci, cj);
        const auto env = pointwise_envelope(
            grid.size(), a.nsim, a.band, a.seed, [&](RngStream& rng, std::size_t) {
                return pair_correlation(replicate(rng), grid, h, ci, cj).values;
            });
        est.lower = env.lower;
        est.upper = env.upper;
        est.nsim = a.nsim;
        est.band = a.band;
    } else if (a.which == "D") {
        if (cls.size() != 2) throw invalid_input("D needs --classes CASE,CONTROL");
        if (a.nsim < 20)
            std::cerr << "warning: nsim < 20 gives a very rough standard-error band\n";
        est = diggle_d(ps, cls[0], cls[1], grid, a.nsim, a.seed);
    } else {
        throw invalid_input("--which must be one of Lii, Lij, g, D");
    }

    std::ostringstream os;
    os << "t,estimate,lower,upper\n";
    os.precision(10);
    for (std::size_t i = 0; i < est.t.size(); ++i) {
        os << est.t[i] << ',' << est.values[i] << ',';
        if (!est.lower.empty()) os << est.lower[i];
        os << ',';
        if (!est.upper.empty()) os << est.upper[i];
        os << '\n';
    }
    emit(os.str(), a.out);
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string null_model, alt;
    std::string sizes = "50,50";
    std::string tests = "all";
    int nmc = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::string format = "json", out;
};

PatternSpec parse_pattern(const SimulateArgs& a) {
    const auto [n1, n2] = parse_sizes(a.sizes);
    if (!a.null_model.empty() && !a.alt.empty())
        throw invalid_input("choose either --null or --alt");
    if (!a.null_model.empty()) {
        if (a.null_model == "csr") return PatternSpec::csr(n1, n2);
        if (a.null_model == "rl1") return PatternSpec::rl1(n1, n2);
        if (a.null_model == "rl2") return PatternSpec::rl2(n1, n2);
        if (a.null_model == "rl3") return PatternSpec::rl3(n1, n2);
        throw invalid_input("--null must be csr, rl1, rl2, or rl3");
    }
    if (a.alt.empty()) throw invalid_input("one of --null or --alt is required");
    const auto parts = split_list(a.alt, ':');
    if (parts.size() == 2 && parts[0] == "seg") return PatternSpec::seg(std::stod(parts[1]), n1, n2);
    if (parts.size() == 2 && parts[0] == "assoc")
        return PatternSpec::assoc(std::stod(parts[1]), n1, n2);
    throw invalid_input("--alt must be seg:<s> or assoc:<r>");
}

int run_simulate(const SimulateArgs& a) {
    const PatternSpec spec = parse_pattern(a);
    bool want_ce = false;
    const std::vector<Method> methods = parse_overall_methods(a.tests, want_ce);
    if (want_ce) throw invalid_input("the harness covers the overall NNCT tests; run `test` for ce");
    const SizePowerReport rep = spec.is_null()
                                    ? empirical_size(spec, methods, a.nmc, a.alpha, a.seed)
                                    : empirical_power(spec, methods, a.nmc, a.alpha, a.seed);

    json j;
    j["pattern"] = spec.name();
    j["sizes"] = {spec.n1, spec.n2};
    j["nmc"] = rep.nmc;
    j["alpha"] = rep.alpha;
    j["seed"] = rep.seed;
    j["kind"] = spec.is_null() ? "empirical-size" : "empirical-power";
    json tests = json::array();
    for (const auto& t : rep.tests) {
        json tj{{"test", t.name}, {"rejections", t.rejections}, {"rate", t.rate}, {"se", t.se}};
        if (spec.is_null())
            tj["flag"] = t.flag < 0 ? "conservative" : (t.flag > 0 ? "liberal" : "ok");
        tests.push_back(std::move(tj));
    }
    j["tests"] = tests;

    if (a.format == "json") emit(j.dump(2), a.out);
    else if (a.format == "csv") {
        std::ostringstream os;
        os << "test,rejections,rate,se,flag\n";
        for (const auto& t : rep.tests)
            os << t.name << ',' << t.rejections << ',' << t.rate << ',' << t.se << ','
               << (spec.is_null() ? (t.flag < 0 ? "conservative" : (t.flag > 0 ? "liberal" : "ok"))
                                  : "")
               << '\n';
        emit(os.str(), a.out);
    } else throw invalid_input("--format must be json or csv");
    return kExitOk;
}

// ----------------------------------------------------------- fit-correction

struct FitArgs {
    std::string sizes = "100,100";
    int nmc = 10000;
    std::uint64_t seed = 1;
    std::string out;
};

int run_fit_correction(const FitArgs& a) {
    const auto [n1, n2] = parse_sizes(a.sizes);
    const CorrectionFit fit = fit_correction_csr(n1, n2, a.nmc, a.seed);
    const json j{{"sizes", {n1, n2}},      {"nmc", fit.nmc},
                 {"seed", a.seed},         {"mean", fit.mean},
                 {"variance", fit.variance}, {"gamma", fit.corr.gamma},
                 {"delta", fit.corr.delta}};
    emit(j.dump(2), a.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatnn: nearest-neighbor contingency table tests of spatial "
                 "segregation/association, Cuzick-Edwards k-NN tests, and second-order "
                 "point pattern analysis"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: NNCT_THREADS or hardware)");

    NnStatsArgs ns;
    auto* c_ns = app.add_subcommand("nn-stats", "NN digraph summary (Q, R, Q_k) and the NNCT");
    c_ns->add_option("--input", ns.input, "points CSV with header x,y,label")->required();
    c_ns->add_option("--metric", ns.metric, "euclidean | toroidal");
    c_ns->add_option("--format", ns.format, "json | csv");
    c_ns->add_option("--out", ns.out, "output path (default stdout)");

    TestArgs ta;
    auto* c_t = app.add_subcommand("test", "NNCT and Cuzick-Edwards tests");
    c_t->add_option("--input", ta.input, "points CSV");
    c_t->add_option("--nnct", ta.nnct_path, "NNCT summary JSON (counts, Q, R)");
    c_t->add_option("--method", ta.methods,
                    "comma list of pielou, pielou-mc, dixon, v1, v2, v3, ce, all");
    c_t->add_option("--null", ta.null_model, "rl | csr (csr inference is conditional on Q, R)");
    c_t->add_option("--nperm", ta.nperm, "permutation replicates (0 = asymptotic only)");
    c_t->add_option("--cov-nperm", ta.cov_nperm, "replicates for permutation covariance (q > 2)");
    c_t->add_option("--seed", ta.seed, "RNG seed (recorded in the report)");
    c_t->add_option("--alpha", ta.alpha, "significance level echoed in the report");
    c_t->add_option("--format", ta.format, "json | csv");
    c_t->add_option("--out", ta.out, "output path");
    c_t->add_option("--metric", ta.metric, "euclidean | toroidal");
    c_t->add_option("--buffer", ta.buffer, "buffer width for edge correction");
    c_t->add_option("--buffer-mode", ta.buffer_mode, "inner | outer");
    c_t->add_option("--case-class", ta.case_class, "case class for ce methods");
    c_t->add_option("--k", ta.k_list, "comma list of k for ce (default 1..5)");
    c_t->add_option("--combine", ta.combine, "combined ce test over a k range, e.g. 1-5");
    c_t->add_option("--mc-gamma", ta.mc_gamma, "pielou-mc location constant");
    c_t->add_option("--mc-delta", ta.mc_delta, "pielou-mc scale constant");

    KfuncArgs ka;
    auto* c_k = app.add_subcommand("kfunc", "Ripley L, pair correlation g, and Diggle D curves");
    c_k->add_option("--input", ka.input, "points CSV")->required();
    c_k->add_option("--which", ka.which, "Lii | Lij | g | D");
    c_k->add_option("--classes", ka.classes, "class (A) or pair (A,B)");
    c_k->add_option("--tmax", ka.tmax, "grid maximum (default: quarter of the shorter side)");
    c_k->add_option("--nt", ka.nt, "grid size");
    c_k->add_option("--nsim", ka.nsim, "null replicates for the envelope");
    c_k->add_option("--band", ka.band, "pointwise band, e.g. 0.95");
    c_k->add_option("--seed", ka.seed, "RNG seed");
    c_k->add_option("--bandwidth", ka.bandwidth, "kernel bandwidth for g");
    c_k->add_option("--null", ka.null_model, "csr | rl (default: csr; D uses rl)");
    c_k->add_option("--out", ka.out, "output CSV path");

    SimulateArgs sa;
    auto* c_s = app.add_subcommand("simulate", "empirical size / power of the NNCT tests");
    c_s->add_option("--null", sa.null_model, "csr | rl1 | rl2 | rl3");
    c_s->add_option("--alt", sa.alt, "seg:<s> | assoc:<r>");
    c_s->add_option("--sizes", sa.sizes, "class sizes n1,n2");
    c_s->add_option("--tests", sa.tests, "comma list of tests (default all)");
    c_s->add_option("--nmc", sa.nmc, "Monte Carlo replicates");
    c_s->add_option("--alpha", sa.alpha, "significance level");
    c_s->add_option("--seed", sa.seed, "RNG seed");
    c_s->add_option("--format", sa.format, "json | csv");
    c_s->add_option("--out", sa.out, "output path");

    FitArgs fa;
    auto* c_f = app.add_subcommand("fit-correction",
                                   "refit the Monte Carlo correction of Pielou's statistic");
    c_f->add_option("--sizes", fa.sizes, "class sizes n1,n2");
    c_f->add_option("--nmc", fa.nmc, "CSR replicates");
    c_f->add_option("--seed", fa.seed, "RNG seed");
    c_f->add_option("--out", fa.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (threads > 0) thread_count_override() = threads;

    try {
        if (*c_ns) return run_nn_stats(ns);
        if (*c_t) return run_test(ta);
        if (*c_k) return run_kfunc(ka);
        if (*c_s) return run_simulate(sa);
        if (*c_f) return run_fit_correction(fa);
    } catch (const degenerate_table& e) {
        std::cerr << "error (degenerate data): " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitUsage;
}
