// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every gate criterion end to end against the public
// headers and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "convexity/builtins.hpp"
#include "convexity/canonical.hpp"
#include "convexity/cli.hpp"
#include "convexity/indices.hpp"
#include "convexity/psd_distance.hpp"
#include "convexity/quadrature.hpp"
#include "convexity/risk.hpp"
#include "convexity/rng.hpp"
#include "convexity/verify.hpp"

using namespace convexity;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

HyperRect square(double a) { return HyperRect({-a, -a}, {a, a}); }

// Dense-Simpson oracle for the separable reduction of the cosine surface:
// CONV(a) = (integral of (cos)_+ on [0,a]) / (integral of |cos| on [0,a]).
double conv_reduction_oracle(double a) {
    const int n = 2'000'001;
    const double h = a / (n - 1);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
        const double c = std::cos(k * h);
        const double w = (k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        num += w * std::max(c, 0.0);
        den += w * std::abs(c);
    }
    return num / den;
}

// --- criterion 1: convex regime of the cosine surface ----------------------
void criterion_1() {
    const ScalarField f = builtin("h_cos");
    bool pass = true;
    std::ostringstream detail;
    detail << "h_cos global index over S(a), grid 201^2:";
    for (double a : {0.5, 1.0, 1.5, M_PI_2}) {
        const auto start = std::chrono::steady_clock::now();
        const GlobalIndex g = global_convexity_index(f, square(a), 201);
        const double elapsed = seconds_since(start);
        const bool ok = std::abs(g.value - 1.0) <= 1e-6 && elapsed < 10.0;
        pass = pass && ok;
        detail << " a=" << a << " -> " << g.value << " (" << elapsed << "s)";
    }
    report(1, pass, detail.str());
}

// --- criterion 2: mixed regime tracks the 1-D reduction --------------------
void criterion_2() {
    const ScalarField f = builtin("h_cos");
    bool pass = true;
    std::ostringstream detail;
    const double at_pi = global_convexity_index(f, square(M_PI), 201).value;
    const double at_2pi = global_convexity_index(f, square(2.0 * M_PI), 201).value;
    pass = pass && std::abs(at_pi - 0.5) <= 2e-3 && std::abs(at_2pi - 0.5) <= 2e-3;
    detail << "CONV(pi)=" << at_pi << " CONV(2pi)=" << at_2pi << "; tracking:";
    for (double a : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double computed = global_convexity_index(f, square(a), 201).value;
        const double oracle = conv_reduction_oracle(a);
        const double gap = std::abs(computed - oracle);
        pass = pass && gap <= 2e-3;
        detail << " a=" << a << " gap=" << gap;
    }
    report(2, pass, detail.str());
}

// --- criterion 3: distance oracle equals the negative-part norm ------------
void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240229);
    int pass_count = 0;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> raw(4);
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        const double c = rng.uniform(-1.0, 1.0);
        raw = {a, b, b, c};
        const SymmetricMatrix m(2, raw);
        OracleBudget budget;
        budget.seed = rng.next_bits();
        double gap = 0.0;
        if (oracle_equivalence_trial(m, budget, &gap)) ++pass_count;
        worst = std::max(worst, gap);
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << pass_count << "/200 matrices inside [-1e-3, +1e-12] band, worst gap " << worst
           << ", " << elapsed << "s";
    report(3, pass_count == 200 && elapsed < 60.0, detail.str());
}

// --- criterion 4: trace bound on random PSD pairs --------------------------
void criterion_4() {
    Rng rng(8675309);
    int pass_count = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t dim = 2 + static_cast<std::size_t>(t % 3);  // dims 2..4
        const SymmetricMatrix h1 = convexity::detail::random_gram(dim, rng);
        const SymmetricMatrix h2 = convexity::detail::random_gram(dim, rng);
        if (trace_bound_check(h1, h2)) ++pass_count;
    }
    std::ostringstream detail;
    detail << pass_count << "/1000 PSD pairs satisfy the trace bounds";
    report(4, pass_count == 1000, detail.str());
}

// --- criterion 5: finite differences vs the analytic Hessian ---------------
void criterion_5() {
    const ScalarField f = builtin("h_cos");
    Rng rng(1007);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> p{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        worst = std::max(worst, hessian_fd(f, p).max_abs_diff(analytic_hessian("h_cos", p)));
    }
    std::ostringstream detail;
    detail << "max FD error over 200 points in [-4,4]^2: " << worst;
    report(5, worst <= 1e-5, detail.str());
}

// --- criterion 6: properties of the aggregate loss surface -----------------
ScalarField beta_surface(double beta) {
    BuiltinParams params;
    params.beta = beta;
    return builtin("h_beta", params);
}

void criterion_6a() {
    bool pass = true;
    std::ostringstream detail;
    detail << "CONV(a) >= 0.99 for a <= 0.2 at center (0.25,0.75):";
    for (double beta : {2.0, 1.0}) {
        const ScalarField f = beta_surface(beta);
        const SweepResult s = sweep_conv_a(f, 0.25, 0.75, 0.2, 20, 201);
        double min_conv = 1.0;
        for (const SweepRecord& r : s.records) min_conv = std::min(min_conv, r.conv);
        pass = pass && min_conv >= 0.99;
        detail << " beta=" << beta << " min=" << min_conv;
    }
    report(6, pass, detail.str() + " [6a]");
}

void criterion_6b() {
    const ScalarField f = beta_surface(-1.0);
    const double centers[3] = {0.25, 0.5, 0.75};
    const double a_values[4] = {0.05, 0.10, 0.15, 0.20};
    double conv[3][4];
    double start_value[3];
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 4; ++k) {
            conv[c][k] = global_convexity_index(
                             f, Square{centers[c], centers[c], a_values[k]}.rect(), 201)
                             .value;
        }
        start_value[c] = global_convexity_index(
                             f, Square{centers[c], centers[c], 0.01}.rect(), 201)
                             .value;
    }
    // the three curves must be strictly ordered the same way at every a
    int order[3] = {0, 1, 2};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (conv[order[j]][0] < conv[order[i]][0]) std::swap(order[i], order[j]);
    bool ordered = true;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i + 1 < 3; ++i)
            if (!(conv[order[i]][k] < conv[order[i + 1]][k])) ordered = false;
    bool low_start = true;
    std::ostringstream detail;
    detail << "beta=-1 ridgeline curves ordered=" << (ordered ? "yes" : "no") << ", starts:";
    for (int c = 0; c < 3; ++c) {
        low_start = low_start && start_value[c] < 0.9;
        detail << " CONV(0.01)@" << centers[c] << "=" << start_value[c];
    }
    report(6, ordered && low_start, detail.str() + " [6b]");
}

void criterion_6c() {
    const ScalarField f = beta_surface(-1.0);
    const double early = global_convexity_index(f, Square{0.25, 0.75, 0.05}.rect(), 201).value;
    const double late = global_convexity_index(f, Square{0.25, 0.75, 0.24}.rect(), 201).value;
    std::ostringstream detail;
    detail << "beta=-1 off-ridgeline: CONV(0.05)=" << early << " > CONV(0.24)=" << late
           << " [6c]";
    report(6, early > late, detail.str());
}

// --- criterion 7: pointwise invariant suite ---------------------------------
void criterion_7() {
    Rng rng(555);
    int checked = 0;
    bool pass = true;
    const char* corpus[] = {"h_cos", "cubic_1d", "neg_cos_1d", "g_risk"};
    for (int t = 0; t < 1000 && pass; ++t) {
        ScalarField f = [&]() -> ScalarField {
            const int pick = t % 10;
            if (pick < 6) {  // random quadratic, d in 1..3
                const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform_int(0, 2));
                const SymmetricMatrix a = convexity::detail::random_symmetric(d, rng) * 4.0;
                return ScalarField(d, [a](std::span<const double> x) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i)
                        for (std::size_t j = 0; j < x.size(); ++j) q += x[i] * a(i, j) * x[j];
                    return 0.5 * q;
                });
            }
            if (pick < 7) {
                BuiltinParams params;
                params.beta = (t % 3 == 0) ? -1.0 : (t % 3 == 1 ? 1.0 : 2.0);
                return builtin("h_beta", params);
            }
            return builtin(corpus[pick - 7 + (t % 2 == 0 ? 0 : 1)]);
        }();
        std::vector<double> p(f.dimension());
        const bool unit_box = f.domain_hint().has_value();
        for (double& x : p) x = unit_box ? rng.uniform(0.1, 0.9) : rng.uniform(-2.0, 2.0);
        if (f.name() == "g_risk") p[0] = rng.uniform(0.05, 0.95);

        const ConvexityReport r = pointwise_indices(f, p);
        const ConvexityReport n = pointwise_indices(negated(f), p);
        if (!r.degenerate && std::abs(r.nloc + r.conv - 1.0) > 1e-12) pass = false;
        if (!r.degenerate && std::abs(r.conv - n.nloc) > 1e-10) pass = false;
        bool any_negative = false;
        for (double lambda : r.eigenvalues)
            if (lambda < 0.0) any_negative = true;
        if ((r.loc == 0.0) != !any_negative) pass = false;
        ++checked;
    }
    std::ostringstream detail;
    detail << checked << "/1000 random fields satisfy nloc+conv=1, conv(f)=nloc(-f), loc=0 <=> "
              "all eigenvalues >= 0";
    report(7, pass && checked == 1000, detail.str());
}

// --- criterion 8: one-dimensional index --------------------------------------
void criterion_8() {
    const IncreaseResult cubic = index_of_increase_1d(builtin("cubic_1d"), -1.0, 1.0, 1001);
    const IncreaseResult cosine = index_of_increase_1d(builtin("neg_cos_1d"), 0.0, M_PI, 1001);
    const IncreaseResult parabola =
        index_of_increase_1d(from_expression("x^2", 1), -1.0, 1.0, 1001);
    const bool pass = std::abs(cubic.value - 0.5) <= 1e-6 &&
                      std::abs(cosine.value - 0.5) <= 1e-4 &&
                      std::abs(parabola.value - 1.0) <= 1e-12;
    std::ostringstream detail;
    detail << "x^3 -> " << cubic.value << ", -cos -> " << cosine.value << ", x^2 -> "
           << parabola.value;
    report(8, pass, detail.str());
}

// --- criterion 9: risk-measure closed forms ----------------------------------
void criterion_9() {
    const LossDistribution u = LossDistribution::uniform01();
    const bool var_exact = u.value_at_risk(0.99) == 0.99;
    const bool avar_ok = std::abs(u.average_value_at_risk(0.99) - 0.995) <= 1e-12;

    LineSpec line;
    line.penalty = PenaltyKind::linear;
    double best = 1e300;
    for (int k = 0; k <= 100000; ++k)
        best = std::min(best, line_total_loss(line, k * 1e-5));
    const double target = (1.0 - line.p) * u.average_value_at_risk(line.p);
    const bool min_ok = std::abs(best - target) <= 1e-6;

    std::ostringstream detail;
    detail << "VaR(0.99)=" << u.value_at_risk(0.99) << " AVaR(0.99)="
           << u.average_value_at_risk(0.99) << " grid-min=" << best << " vs (1-p)AVaR=" << target;
    report(9, var_exact && avar_ok && min_ok, detail.str());
}

// --- criterion 10: byte-identical outputs ------------------------------------
std::string run_to_file(const std::vector<std::string>& args, const std::string& tag) {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / ("convexity_acceptance_" + tag);
    std::vector<std::string> full = args;
    full.push_back("--out");
    full.push_back(path.string());
    std::ostringstream out, err;
    const int code = cli::run_cli(full, out, err);
    if (code != 0) return "<<exit " + std::to_string(code) + ": " + err.str() + ">>";
    std::ifstream in(path, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    fs::remove(path);
    return content.str();
}

void criterion_10() {
    namespace fs = std::filesystem;
    const fs::path matrix_path = fs::temp_directory_path() / "convexity_acceptance_matrix.csv";
    {
        std::ofstream f(matrix_path);
        f << "3,0\n0,-1\n";
    }
    struct Case {
        const char* label;
        std::vector<std::string> first;
        std::vector<std::string> second;
    };
    const std::vector<Case> cases = {
        {"pointwise",
         {"pointwise", "--builtin", "h_cos", "--at", "0.3,0.4"},
         {"pointwise", "--builtin", "h_cos", "--at", "0.3,0.4"}},
        {"global",
         {"global", "--builtin", "h_cos", "--center", "0,0", "--a", "2", "--grid", "51",
          "--threads", "1"},
         {"global", "--builtin", "h_cos", "--center", "0,0", "--a", "2", "--grid", "51",
          "--threads", "2"}},
        {"sweep",
         {"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "2", "--steps", "4",
          "--grid", "41", "--threads", "1"},
         {"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "2", "--steps", "4",
          "--grid", "41", "--threads", "3"}},
        {"map",
         {"map", "--builtin", "h_cos", "--lo", "-3,-3", "--hi", "3,3", "--grid", "17",
          "--threads", "1"},
         {"map", "--builtin", "h_cos", "--lo", "-3,-3", "--hi", "3,3", "--grid", "17",
          "--threads", "4"}},
        {"increase",
         {"increase", "--fn", "x^3", "--interval=-1,1"},
         {"increase", "--fn", "x^3", "--interval=-1,1"}},
        {"psd",
         {"psd", "--matrix", matrix_path.string()},
         {"psd", "--matrix", matrix_path.string()}},
        {"verify",
         {"verify", "--trials", "20", "--seed", "11"},
         {"verify", "--trials", "20", "--seed", "11"}},
        {"risk-demo",
         {"risk-demo", "--beta", "-1", "--center", "0.5,0.5", "--amax", "0.2", "--steps", "3",
          "--grid", "41", "--threads", "1"},
         {"risk-demo", "--beta", "-1", "--center", "0.5,0.5", "--amax", "0.2", "--steps", "3",
          "--grid", "41", "--threads", "2"}},
    };
    bool pass = true;
    std::ostringstream detail;
    detail << "byte-identical reruns:";
    for (const Case& c : cases) {
        const std::string first = run_to_file(c.first, std::string(c.label) + "_1");
        const std::string second = run_to_file(c.second, std::string(c.label) + "_2");
        const bool ok = !first.empty() && first == second && first.find("<<exit") != 0;
        pass = pass && ok;
        detail << " " << c.label << "=" << (ok ? "ok" : "MISMATCH");
    }
    fs::remove(matrix_path);
    report(10, pass, detail.str());
}

} // namespace

int main() {
    std::printf("convexity acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6a();
    criterion_6b();
    criterion_6c();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion check(s) FAILED\n", g_failures);
    return g_failures;
}
