#include <set>
#include <sstream>

#include "robba/series.hpp"

namespace robba {

namespace {

[[noreturn]] void fail(long line, const std::string& msg) {
    raise(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::string normalize_minus(const std::string& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x88 &&
            static_cast<unsigned char>(s[i + 2]) == 0x92) {
            out += '-';
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

mpz_class parse_int(const std::string& s, long line) {
    if (s.empty()) fail(line, "missing integer");
    mpz_class z;
    if (z.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0) fail(line, "bad integer '" + s + "'");
    return z;
}

long parse_long(const std::string& s, long line) {
    mpz_class z = parse_int(s, line);
    if (!z.fits_slong_p()) fail(line, "integer out of range '" + s + "'");
    return z.get_si();
}

std::vector<mpz_class> parse_list(const std::string& s, long line) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(line, "expected [..] list, got '" + s + "'");
    std::vector<mpz_class> out;
    std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(item, line));
    return out;
}

std::map<std::string, std::string> parse_keys(const std::vector<std::string>& toks, size_t from,
                                              const std::set<std::string>& allowed, long line) {
    std::map<std::string, std::string> kv;
    for (size_t i = from; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        if (eq == std::string::npos) fail(line, "expected key=value, got '" + toks[i] + "'");
        std::string k = toks[i].substr(0, eq);
        if (!allowed.count(k)) fail(line, "unknown key '" + k + "'");
        if (kv.count(k)) fail(line, "duplicate key '" + k + "'");
        kv[k] = toks[i].substr(eq + 1);
    }
    return kv;
}

struct TermLine {
    long line;
    std::map<std::string, std::string> kv;
};

}  // namespace

std::string format_series(const Series& s) {
    std::ostringstream os;
    os << s.field().describe() << "\n";
    os << "modulus " << s.modulus() << "\n";
    os << "window " << s.lo() << " " << s.hi() << "\n";
    int e = s.field().e();
    for (long n = s.lo(); n < s.hi(); ++n) {
        if (s.coeff_is_zero(n)) continue;
        os << "term " << n << " pi=[";
        const mpz_class* x = s.raw(n);
        for (int i = 0; i < e; ++i) os << (i ? "," : "") << x[i].get_str();
        os << "]";
        if (s.shift() > 0) os << " pow=" << -s.shift();
        os << "\n";
    }
    return os.str();
}

Series parse_series(const std::string& text, std::optional<long> default_modulus) {
    std::istringstream in(normalize_minus(text));
    std::string raw_line;
    long line = 0;
    std::optional<Field> field;
    std::optional<long> modulus, lo, hi;
    std::map<long, TermLine> terms;
    while (std::getline(in, raw_line)) {
        ++line;
        auto hash = raw_line.find('#');
        if (hash != std::string::npos) raw_line = raw_line.substr(0, hash);
        std::istringstream ls(raw_line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "field") {
            if (field) fail(line, "duplicate field line");
            auto kv = parse_keys(toks, 1, {"p", "e", "eisenstein"}, line);
            if (!kv.count("p")) fail(line, "field needs p=");
            long p = parse_long(kv["p"], line);
            long e = kv.count("e") ? parse_long(kv["e"], line) : 1;
            std::vector<mpz_class> eis;
            if (kv.count("eisenstein")) eis = parse_list(kv["eisenstein"], line);
            if (eis.empty() && e != 1) fail(line, "e > 1 needs an eisenstein polynomial");
            if (!eis.empty() && static_cast<long>(eis.size()) != e + 1) fail(line, "eisenstein degree does not match e");
            try {
                field = Field::make(p, eis);
            } catch (const Error& err) {
                fail(line, err.what());
            }
        } else if (head == "modulus") {
            if (modulus) fail(line, "duplicate modulus line");
            if (toks.size() != 2) fail(line, "modulus takes one integer");
            modulus = parse_long(toks[1], line);
            if (*modulus < 1) fail(line, "modulus must be >= 1");
        } else if (head == "window") {
            if (lo) fail(line, "duplicate window line");
            if (toks.size() != 3) fail(line, "window takes two integers");
            lo = parse_long(toks[1], line);
            hi = parse_long(toks[2], line);
            if (*hi < *lo) fail(line, "window end before start");
        } else if (head == "term") {
            if (toks.size() < 3) fail(line, "term needs an exponent and a value");
            long n = parse_long(toks[1], line);
            if (terms.count(n)) fail(line, "duplicate exponent " + std::to_string(n));
            terms[n] = {line, parse_keys(toks, 2, {"num", "den", "pi", "pow"}, line)};
        } else {
            fail(line, "unknown directive '" + head + "'");
        }
    }
    if (!field) fail(line, "missing field line");
    if (!lo) fail(line, "missing window line");
    if (!modulus) {
        if (!default_modulus) fail(line, "missing modulus line and no default modulus");
        modulus = *default_modulus;
    }
    const Field& K = *field;
    std::map<long, FieldElement> coeffs;
    for (auto& [n, t] : terms) {
        if (n < *lo || n >= *hi) fail(t.line, "exponent " + std::to_string(n) + " outside the window");
        auto& kv = t.kv;
        bool rational = kv.count("num") || kv.count("den");
        bool basis = kv.count("pi") || kv.count("pow");
        if (rational == basis) fail(t.line, "term needs either num=/den= or pi=[..]");
        try {
            if (rational) {
                if (!kv.count("num")) fail(t.line, "den= without num=");
                mpz_class num = parse_int(kv["num"], t.line);
                mpz_class den = kv.count("den") ? parse_int(kv["den"], t.line) : mpz_class(1);
                if (den == 0 || den % K.p() == 0) fail(t.line, "denominator must be prime to p");
                coeffs.emplace(n, FieldElement::from_rational(K, num, den, *modulus));
            } else {
                if (!kv.count("pi")) fail(t.line, "pow= without pi=");
                auto c = parse_list(kv["pi"], t.line);
                if (static_cast<long>(c.size()) > K.e()) fail(t.line, "more pi-basis residues than e");
                long pw = kv.count("pow") ? parse_long(kv["pow"], t.line) : 0;
                coeffs.emplace(n, FieldElement::from_coords(K, c, *modulus, pw));
            }
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::ParseError) throw;
            fail(t.line, err.what());
        }
    }
    return Series::from_coefficients(K, *lo, *hi, *modulus, coeffs);
}

}  // namespace robba
