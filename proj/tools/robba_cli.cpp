#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "robba/cyclotomic.hpp"
#include "robba/eigen.hpp"
#include "robba/trace.hpp"
#include "robba/verify.hpp"

using namespace robba;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Input {
    std::string path;
    std::string digest;
    Series series;
};

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::optional<long> env_modulus() {
    const char* v = std::getenv("ROBBA_DEFAULT_MODULUS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    long m = std::strtol(v, &end, 10);
    if (*end != '\0' || m < 1) throw UsageError("ROBBA_DEFAULT_MODULUS must be a positive integer");
    return m;
}

Input load(const std::string& path, std::optional<long> default_modulus) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError(path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return {path, fnv1a64(ss.str()), parse_series(ss.str(), default_modulus)};
    } catch (const Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> fields;  // extra key/value lines
    std::vector<Check> checks;
    std::optional<unsigned long long> seed;
    long elapsed_ms = -1;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    std::string text() const {
        std::ostringstream os;
        os << "command " << command << "\n";
        if (seed) os << "seed " << *seed << "\n";
        for (auto& [p, d] : inputs) os << "input " << p << " fnv1a64=" << d << "\n";
        for (auto& [k, v] : fields) os << k << " " << v << "\n";
        long passed = 0;
        for (const auto& c : checks) {
            os << "check " << c.name << " " << (c.pass ? "PASS" : "FAIL");
            if (c.deficiency) os << " deficiency " << format_valuation(*c.deficiency, c.e);
            if (!c.detail.empty()) os << " (" << c.detail << ")";
            os << "\n";
            passed += c.pass;
        }
        if (!checks.empty()) os << "summary " << passed << "/" << checks.size() << " passed\n";
        if (elapsed_ms >= 0) os << "elapsed_ms " << elapsed_ms << "\n";
        os << "exit " << (pass() ? 0 : 1) << "\n";
        return os.str();
    }

    std::string to_json() const {
        json j;
        j["command"] = command;
        if (seed) j["seed"] = *seed;
        j["inputs"] = json::array();
        for (auto& [p, d] : inputs) j["inputs"].push_back({{"path", p}, {"fnv1a64", d}});
        for (auto& [k, v] : fields) j[k] = v;
        j["checks"] = json::array();
        for (const auto& c : checks) {
            json cj{{"name", c.name}, {"verdict", c.pass ? "pass" : "fail"}};
            cj["deficiency"] = c.deficiency ? json(format_valuation(*c.deficiency, c.e)) : json(nullptr);
            if (!c.detail.empty()) cj["detail"] = c.detail;
            j["checks"].push_back(cj);
        }
        if (elapsed_ms >= 0) j["elapsed_ms"] = elapsed_ms;
        j["exit_code"] = pass() ? 0 : 1;
        return j.dump(2) + "\n";
    }
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError(out + ": cannot write");
    f << text;
}

struct ApplyArgs {
    std::string op;
    std::string subst;
    std::vector<std::string> in;
    std::optional<long> modulus;
    std::vector<long> window;
    long cap = 20000;
    std::string out;
    bool json = false;
    bool closed_form = false;
    bool printed_bm = false;
    bool timing = false;
};

Series clip(const Series& s, const ApplyArgs& a) {
    if (a.window.empty()) return s;
    long lo = std::max(s.lo(), a.window[0]), hi = std::min(s.hi(), a.window[1]);
    return s.restricted(lo, std::max(lo, hi));
}

CyclotomicContext context_for(const Field& K, long M) {
    auto ctx = build_cyclotomic(K.p(), M);
    if (ctx.field != K) throw UsageError("input field is not Q_p(zeta_p) with the canonical Eisenstein polynomial");
    return ctx;
}

int run_apply(const ApplyArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    std::optional<long> dm = a.modulus ? a.modulus : env_modulus();
    Report rep;
    rep.command = "apply " + a.op;
    std::optional<Input> S;
    std::vector<Input> ins;
    if (!a.subst.empty()) S = load(a.subst, dm);
    for (const auto& p : a.in) ins.push_back(load(p, dm));
    if (S) rep.inputs.emplace_back(S->path, S->digest);
    for (const auto& i : ins) rep.inputs.emplace_back(i.path, i.digest);

    long M = dm.value_or(1L << 30);
    if (S) M = std::min(M, S->series.modulus());
    for (const auto& i : ins) M = std::min(M, i.series.modulus());
    auto need_subst = [&]() -> FiniteHeightMap {
        if (!S) throw UsageError(a.op + " needs --subst");
        return FiniteHeightMap::validate(S->series);
    };
    auto need_in = [&](size_t n) {
        if (ins.size() < n) throw UsageError(a.op + " needs " + std::to_string(n) + " --in file(s)");
    };
    auto reduce = [&](const Series& s) { return s.with_modulus(std::min(s.modulus(), M)); };

    std::optional<Series> result;
    const std::string& op = a.op;
    if (op == "phi") {
        auto m = need_subst();
        need_in(1);
        result = phi_laurent(m, reduce(ins[0].series), a.cap);
    } else if (op == "psi") {
        auto m = need_subst();
        need_in(1);
        long yw = a.window.empty() ? 32 : std::max(1L, a.window[1]);
        TraceOperator t(m, M, yw);
        result = t.psi_laurent(reduce(ins[0].series));
    } else if (op == "logs") {
        auto m = need_subst();
        long hi = a.window.empty() ? 20 : a.window[1];
        result = log_s(m, hi, a.cap);
    } else if (op == "wronskian") {
        need_in(1);
        std::vector<Series> fs;
        for (const auto& i : ins) fs.push_back(reduce(i.series));
        result = wronskian(fs);
    } else if (op == "twist") {
        need_in(1);
        Series g = reduce(ins[0].series);
        auto ctx = context_for(g.field(), M);
        result = a.closed_form || a.printed_bm ? twist_coefficients(ctx, g, a.printed_bm) : twist_direct(ctx, g, a.cap);
    } else if (op == "trace-oracle") {
        need_in(1);
        Series h = reduce(ins[0].series);
        result = trace_oracle(context_for(h.field(), M), h, a.cap);
    } else if (op == "discriminant") {
        auto m = need_subst();
        long yw = a.window.empty() ? 16 : std::max(1L, a.window[1]);
        result = TraceOperator(m, M, yw).discriminant();
    } else if (op == "newton-polygon") {
        need_in(1);
        NewtonPolygon np = newton_polygon(ins[0].series);
        std::ostringstream v;
        for (size_t i = 0; i < np.vertices.size(); ++i)
            v << (i ? " " : "") << "(" << np.vertices[i].first << "," << np.vertices[i].second.str() << ")";
        rep.fields.emplace_back("vertices", v.str());
        std::ostringstream sl;
        for (size_t i = 0; i < np.slopes.size(); ++i)
            sl << (i ? " " : "") << np.slopes[i].first.str() << "x" << np.slopes[i].second;
        rep.fields.emplace_back("slopes", sl.str());
        rep.fields.emplace_back("provisional", np.provisional ? "true" : "false");
        rep.fields.emplace_back("wideg", std::to_string(wideg(ins[0].series)));
    } else if (op == "fixed-point") {
        Series s = S ? S->series : (need_in(1), ins[0].series);
        auto c = fixed_point_and_conjugate(reduce(s));
        rep.fields.emplace_back("fixed_point", c.a.str());
        rep.fields.emplace_back("wideg", std::to_string(c.map.d()));
        rep.fields.emplace_back("conjugate", format_series(c.s_a));
        emit(format_series(c.s_a), a.out);
        std::cerr << "fixed point " << c.a.str() << "\n";
        return 0;
    } else {
        throw UsageError("unknown operation " + op);
    }
    if (a.timing)
        rep.elapsed_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    if (result) {
        std::string text = format_series(clip(*result, a));
        if (a.json) {
            rep.fields.emplace_back("result", text);
            emit(rep.to_json(), a.out);
        } else {
            emit(text, a.out);
        }
    } else {
        emit(a.json ? rep.to_json() : rep.text(), a.out);
    }
    return 0;
}

struct VerifyArgs {
    std::string suite;
    long p = 0;
    std::optional<long> modulus;
    std::vector<long> window;
    unsigned long long seed = 1;
    long samples = 3;
    std::string out;
    bool json = false;
    bool printed_bm = false;
    bool timing = false;
};

int run_verify(const VerifyArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteOptions o;
    o.p = a.p;
    o.modulus = a.modulus ? *a.modulus : env_modulus().value_or(12);
    if (!a.window.empty()) {
        o.lo = a.window[0];
        o.hi = a.window[1];
    }
    o.seed = a.seed;
    o.samples = a.samples;
    o.printed_bm = a.printed_bm;
    Report rep;
    rep.command = "verify " + a.suite;
    rep.seed = a.seed;
    rep.fields.emplace_back("p", std::to_string(a.p));
    rep.fields.emplace_back("modulus", std::to_string(o.modulus));
    rep.fields.emplace_back("window", std::to_string(o.lo) + " " + std::to_string(o.hi));
    if (a.printed_bm) rep.fields.emplace_back("printed_bm", "true");
    rep.checks = run_suite(a.suite, o);
    if (a.timing)
        rep.elapsed_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    emit(a.json ? rep.to_json() : rep.text(), a.out);
    return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated Robba-ring operators: substitution, trace, eigenfunctions, cyclotomic twists"};
    app.require_subcommand(1);

    ApplyArgs aa;
    auto* apply = app.add_subcommand("apply", "run one operator on series files");
    apply->add_option("op", aa.op, "phi|psi|logs|wronskian|twist|trace-oracle|newton-polygon|fixed-point|discriminant")
        ->required();
    apply->add_option("--subst", aa.subst, "substitution s (series file)");
    apply->add_option("--in", aa.in, "input series file(s)");
    apply->add_option("--modulus", aa.modulus, "working modulus M (pi^M); default ROBBA_DEFAULT_MODULUS")
        ->check(CLI::PositiveNumber);
    apply->add_option("--window", aa.window, "output window LO HI")->expected(2);
    apply->add_option("--cap", aa.cap, "iteration cap")->check(CLI::PositiveNumber);
    apply->add_option("--out", aa.out, "output path (default stdout)");
    apply->add_flag("--json", aa.json, "JSON report");
    apply->add_flag("--closed-form", aa.closed_form, "twist by the b_m closed form");
    apply->add_flag("--printed-bm", aa.printed_bm, "twist by the b_m formula with exponent n - m");
    apply->add_flag("--timing", aa.timing, "include elapsed time in reports");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run a verification suite over the built-in corpus");
    verify->add_option("suite", va.suite, "all|psi-phi|eigen|cyclotomic|valuation")
        ->required()
        ->check(CLI::IsMember({"all", "psi-phi", "eigen", "cyclotomic", "valuation"}));
    verify->add_option("--p", va.p, "restrict to Q_p (2 or 3); 0 = both")->check(CLI::IsMember({0, 2, 3}));
    verify->add_option("--modulus", va.modulus, "modulus pi^M")->check(CLI::PositiveNumber);
    verify->add_option("--window", va.window, "sampling window LO HI")->expected(2);
    verify->add_option("--seed", va.seed, "random seed");
    verify->add_option("--samples", va.samples, "random samples per check")->check(CLI::PositiveNumber);
    verify->add_option("--out", va.out, "report path (default stdout)");
    verify->add_flag("--json", va.json, "JSON report");
    verify->add_flag("--printed-bm", va.printed_bm, "use the printed b_m exponent n - m");
    verify->add_flag("--timing", va.timing, "include elapsed time in reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (aa.window.size() == 2 && aa.window[0] >= aa.window[1]) throw UsageError("--window needs LO < HI");
        if (va.window.size() == 2 && va.window[0] >= va.window[1]) throw UsageError("--window needs LO < HI");
        if (*apply) return run_apply(aa);
        return run_verify(va);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
