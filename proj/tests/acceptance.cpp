// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero iff a criterion fails
// that is not listed in kKnownConflicts. The full JSON of every run goes to the report file.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include "pmlab/experiments.hpp"
#include "pmlab/parallel.hpp"

using namespace pmlab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// criterion -> why it cannot pass as stated; still printed as FAIL
const std::map<int, std::string> kKnownConflicts{
    {4, "fitted-constant tail bound: P(H_n < T) = 1 for n <= T*L1/eps, so c fitted at n = 1 "
        "gives 1/n, violated from n = 2 (see README)"},
};

struct Line {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Line> lines;
Json report = Json::object();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void record(int id, bool pass, const std::string& detail) {
    lines.push_back({id, pass, detail});
    std::cout << "CRITERION " << id << ' ' << (pass ? "PASS" : "FAIL") << "  " << detail;
    if (!pass && kKnownConflicts.count(id)) std::cout << "  [known conflict: " << kKnownConflicts.at(id) << ']';
    std::cout << std::endl;
}

template <class F>
Json timed(const std::string& key, double& secs, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Json j = f();
    secs = seconds_since(t0);
    report[key] = j;
    return j;
}

void criterion1() {
    double secs = 0;
    const Json j = timed("cone_example", secs, [] { return cone_example({}); });
    const bool ok = j["pass"].get<bool>() && secs < 10.0;
    record(1, ok,
           fmt("sup error %.3g <= %.3g, cylinder jump %.4f >= %.4f, ", j["sup_error"].get<double>(),
               j["error_bound"].get<double>(), j["cylinder_jump"].get<double>(), j["jump_bound"].get<double>()) +
               fmt("%.2f s (< 10 s)", secs));
}

void criterion2() {
    double secs = 0;
    RestartParams p;
    p.seed = kSeed;
    const Json j = timed("markov_restart", secs, [&] { return markov_restart_suite(p); });
    record(2, j["pass"].get<bool>(),
           fmt("%.0f cases, %.0f failures", double(j["cases"].get<std::size_t>()),
               double(j["failures"].get<std::size_t>())));
}

void criterion3() {
    double secs = 0;
    RegularityParams p;
    p.seed = kSeed;
    const Json j = timed("regularity", secs, [&] { return hitting_regularity(p); });
    double worst = -1e300;
    for (const auto& r : j["pairs"])
        worst = std::max(worst, r["estimate"].get<double>() - r["bound"].get<double>() - 3.0 * r["stderr"].get<double>());
    record(3, j["pass"].get<bool>() && secs < 60.0,
           fmt("20 pairs, max(estimate - bound - 3se) = %.4f, ", worst) + fmt("%.1f s (< 60 s)", secs));
}

void criterion4() {
    double secs = 0;
    TailParams p;
    p.seed = kSeed;
    const Json j = timed("tails", secs, [&] { return hitting_tails(p); });
    std::string detail;
    for (const auto& e : j["epsilons"]) {
        detail += fmt("eps %.1f: monotone %.0f, terminal %.0f, bound %.0f", e["epsilon"].get<double>(),
                      e["monotone"].get<bool>(), e["all_terminal"].get<bool>(), e["bounded"].get<bool>());
        if (!e["bounded"].get<bool>()) {
            const int n = e["first_violation"].get<int>();
            detail += fmt(" (first violation n = %.0f, P = %.3f > %.3f)", n,
                          e["rows"][std::size_t(n - 1)]["P"].get<double>(),
                          e["rows"][std::size_t(n - 1)]["bound"].get<double>());
        }
        detail += "; ";
    }
    record(4, j["pass"].get<bool>() && j["tail_bound_holds"].get<bool>(), detail);
}

void criterion5() {
    double secs = 0;
    OracleParams p;
    p.seed = kSeed;
    const Json j = timed("oracle_equivalence", secs, [&] { return oracle_equivalence(p); });
    std::string detail;
    for (const auto& c : j["cases"])
        detail += c["boundary"].get<std::string>() +
                  fmt(" pde %.4f mc %.4f; ", c["pde"].get<double>(), c["mc"]["value"].get<double>());
    record(5, j["pass"].get<bool>() && secs < 300.0, detail + fmt("tol 5e-2, %.1f s (< 300 s)", secs));
}

void criterion6() {
    double secs = 0;
    NonlinParams p;
    p.seed = kSeed;
    const Json j = timed("nonlinear_1d", secs, [&] { return nonlinear_1d(p); });
    const auto& a = j["B_T"];
    const auto& b = j["B_T_squared"];
    record(6, j["pass"].get<bool>(),
           fmt("E[B_T] %.4f vs %.1f; ", a["estimate"]["value"].get<double>(), a["target"].get<double>()) +
               fmt("E[B_T^2] %.4f vs hjb oracle %.4f (tol %.4f); ", b["estimate"]["value"].get<double>(),
                   b["hjb_oracle"].get<double>(), b["tolerance"].get<double>()) +
               fmt("open-loop closed form %.1f, oracle exceeds it by %.4f", b["open_loop_closed_form"].get<double>(),
                   b["oracle_minus_closed_form"].get<double>()));
}

void criterion7() {
    double secs = 0;
    CascadeParams p;
    p.seed = kSeed;
    const Json j = timed("cascade_heat", secs, [&] { return cascade_heat(p); });
    std::string detail;
    for (const auto& r : j["levels"])
        detail += fmt("m=%.0f [%.3f, %.3f] ", r["m"].get<int>(), r["lower_root"].get<double>(),
                      r["upper_root"].get<double>());
    record(7, j["pass"].get<bool>() && secs < 600.0,
           detail + fmt("; |root - T| at m=3: %.3f (<= 0.1); %.0f s (< 600 s)",
                        j["root_deviation_m3"].get<double>(), secs));
}

void criterion8() {
    double secs = 0;
    ComparisonParams p;
    p.seed = kSeed;
    const Json j = timed("comparison", secs, [&] { return cascade_comparison(p); });
    record(8, j["pass"].get<bool>(),
           fmt("%.0f violations on %.0f points; root diff upper %.4f lower %.4f", double(j["violations"].get<std::size_t>()),
               double(j["checked"].get<std::size_t>()), j["root_diff_upper"].get<double>(),
               j["root_diff_lower"].get<double>()) +
               fmt(" (1 +- %.4f)", j["tolerance"].get<double>()));
}

void criterion9() {
    double secs = 0;
    ShjbParams p;
    p.seed = kSeed;
    const Json j = timed("shjb", secs, [&] { return shjb_checks(p); });
    std::string gaps;
    for (const auto& r : j["cascade_gap"]["rows"]) gaps += fmt("%.4f ", r["gap"].get<double>());
    record(9, j["pass"].get<bool>(),
           fmt("drift %.4f vs %.1f; ", j["drift"]["value"].get<double>(), j["drift"]["exact"].get<double>()) +
               "discount ok " + (j["discount"][0]["ok"].get<bool>() ? "yes" : "no") +
               "; freezing identical " + (j["freezing_noop"]["identical"].get<bool>() ? "yes" : "no") +
               "; gaps " + gaps);
}

void criterion10() {
    double secs = 0;
    IsaacsParams p;
    p.seed = kSeed;
    const Json j = timed("isaacs", secs, [&] { return isaacs_checks(p); });
    std::size_t violations = 0;
    for (const auto& r : j["frozen"]) violations += r["violations"].get<std::size_t>();
    record(10, j["pass"].get<bool>(),
           fmt("saddle value upper %.4f lower %.4f (exact %.1f); ", j["upper"].get<double>(),
               j["lower"].get<double>(), j["saddle_value"].get<double>()) +
               fmt("freeze violations %.0f of %.0f branches; pennies Isaacs gap %.2f", double(violations),
                   double(j["frozen_branches"].get<std::size_t>()),
                   j["matching_pennies"]["isaacs_gap"].get<double>()));
}

// Every stochastic pipeline at reduced size, twice with identical seeds and different worker
// counts; the JSON text must match byte for byte.
void criterion11() {
    const std::vector<std::pair<std::string, std::function<Json()>>> runs{
        {"markov_restart", [] { RestartParams p; p.cases = 200; p.seed = kSeed; return markov_restart_suite(p); }},
        {"regularity", [] { RegularityParams p; p.pairs = 4; p.samples = 1000; p.seed = kSeed; return hitting_regularity(p); }},
        {"tails", [] { TailParams p; p.samples = 1000; p.seed = kSeed; return hitting_tails(p); }},
        {"oracle", [] { OracleParams p; p.samples = 5000; p.dx = 0.05; p.seed = kSeed; return oracle_equivalence(p); }},
        {"nonlinear", [] { NonlinParams p; p.samples = 2000; p.seed = kSeed; return nonlinear_1d(p); }},
        {"cascade", [] { CascadeParams p; p.levels = {1, 2}; p.samples = 200; p.seed = kSeed; return cascade_heat(p); }},
        {"comparison", [] { ComparisonParams p; p.points = 2; p.samples = 200; p.seed = kSeed; return cascade_comparison(p); }},
        {"shjb", [] { ShjbParams p; p.samples = 500; p.seed = kSeed; return shjb_checks(p); }},
        {"isaacs", [] { IsaacsParams p; p.samples = 16; p.seed = kSeed; return isaacs_checks(p); }},
    };
    const int workers = worker_count();
    std::size_t same = 0;
    std::string differing;
    for (const auto& [name, run] : runs) {
        set_worker_count(1);
        const std::string a = run().dump();
        set_worker_count(3);
        const std::string b = run().dump();
        if (a == b) ++same;
        else differing += name + " ";
    }
    set_worker_count(workers);
    record(11, same == runs.size(),
           fmt("%.0f of %.0f pipelines byte-identical across reruns (workers 1 vs 3)", double(same),
               double(runs.size())) +
               (differing.empty() ? "" : "; differing: " + differing));
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    std::string report_path = "acceptance_report.json";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--report" && i + 1 < argc) report_path = argv[++i];
        else only.insert(std::stoi(a));
    }
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4,
                                                 criterion5, criterion6, criterion7, criterion8,
                                                 criterion9, criterion10, criterion11};
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!only.empty() && !only.count(int(i + 1))) continue;
        try {
            all[i]();
        } catch (const std::exception& e) {
            record(int(i + 1), false, std::string("exception: ") + e.what());
        }
    }
    std::ofstream(report_path) << report.dump(2) << '\n';

    int unexpected = 0, known = 0;
    for (const auto& l : lines) {
        if (l.pass) continue;
        if (kKnownConflicts.count(l.id)) ++known;
        else ++unexpected;
    }
    std::cout << "SUMMARY " << lines.size() - std::size_t(unexpected + known) << " pass, " << known
              << " known-conflict fail, " << unexpected << " unexpected fail" << std::endl;
    return unexpected == 0 ? 0 : 1;
}
