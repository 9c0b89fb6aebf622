#include "crrigid/cli.hpp"
#include "crrigid/solver.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#ifndef CRRIGID_CORPUS_DIR
#define CRRIGID_CORPUS_DIR "corpus"
#endif

namespace crr {

namespace {

// Error::what() repeats the kind as a prefix
std::string message(const Error &e) {
    std::string w = e.what(), p = e.kind() + ": ";
    return w.compare(0, p.size(), p) == 0 ? w.substr(p.size()) : w;
}

using Json = nlohmann::ordered_json;
using Actual = std::map<std::string, std::string>;

constexpr int kShowOrder = 6; // truncation of series printed in reports

struct Settings {
    int d = 2;
    SolveOptions solve;
    bool oracle = false;
    int genericityOrder = 16;
    BuildSettings build;
};

Settings resolve(const ProblemSpec &spec, const RunOptions &opt) {
    auto pick = [&](const std::optional<int> &cli, const char *key, int def) {
        if (cli) return *cli;
        auto it = spec.options.find(key);
        return it == spec.options.end() ? def : it->second;
    };
    Settings s;
    s.d = pick(opt.d, "d", 2);
    s.solve.startOrder = pick(opt.condOrder, "cond-order", 12);
    s.solve.maxOrder = pick(opt.order, "order", std::max(30, s.solve.startOrder));
    s.solve.window = pick(opt.window, "window", 4);
    s.genericityOrder = pick(opt.condOrder, "cond-order", 16);
    s.oracle = opt.oracle || pick(std::nullopt, "oracle", 0) != 0;
    s.build.mapOrder = pick(std::nullopt, "map-order", 4 * s.solve.maxOrder);
    s.build.fieldOrder = pick(std::nullopt, "field-order", s.solve.maxOrder);
    s.build.workOrder = pick(std::nullopt, "work-order", s.solve.maxOrder + 16);
    if (s.d < 2 || !isSquareFree(s.d)) throw ValidationError("d = " + std::to_string(s.d) + " is not a square-free integer > 1");
    if (s.solve.startOrder < 4 || s.solve.maxOrder < s.solve.startOrder)
        throw ValidationError("need 4 <= cond-order <= order");
    if (s.solve.window < 2) throw ValidationError("window must be at least 2");
    if (s.build.mapOrder < s.solve.maxOrder + 8) throw ValidationError("map-order must exceed order by at least 8");
    if (s.build.fieldOrder < s.solve.startOrder) throw ValidationError("field-order must be at least cond-order");
    return s;
}

Json settingsJson(const Settings &s) {
    return Json{{"d", s.d},
                {"condOrder", s.solve.startOrder},
                {"order", s.solve.maxOrder},
                {"window", s.solve.window},
                {"mapOrder", s.build.mapOrder},
                {"fieldOrder", s.build.fieldOrder},
                {"workOrder", s.build.workOrder},
                {"oracle", s.oracle}};
}

std::string realCoordName(int k) { return jetName(k / 2) + (k % 2 ? ".im" : ".re"); }

Json jetJson(const JetVector &J) {
    Json j = Json::object();
    for (int k = 0; k < kJetSize; ++k)
        if (!J.v[k].isZero()) j[jetName(k)] = J.v[k].str();
    return j;
}

Json seriesTriple(const std::array<Series, 3> &a, int order) {
    Json j = Json::array();
    for (auto &s : a) j.push_back(s.truncated(order).str());
    return j;
}

Json traceJson(const DimensionTrace &t) {
    Json dims = Json::array();
    for (auto &[n, d] : t.dims) dims.push_back(Json::array({n, d}));
    Json j{{"dims", dims}, {"lowerBound", t.lowerBound}, {"status", t.status}};
    if (t.accepted()) j["acceptedOrder"] = t.order;
    return j;
}

void require(bool ok, const std::string &what) {
    if (!ok) throw ValidationError(what);
}

Json sourceJson(const Problem &P) {
    const auto &M = P.source;
    return Json{{"leviCoefficient", M.leviCoefficient().str()},
                {"strictlyPseudoconvex", M.strictlyPseudoconvex()},
                {"normalCoordinatesChanged", P.sourceChanged}};
}

Json targetJson(const TargetHypersurface &T) {
    Json j{{"kind", T.kind == TargetHypersurface::Kind::Hyperquadric ? "hyperquadric" : "polynomial"}};
    if (T.kind == TargetHypersurface::Kind::Hyperquadric) j["epsilon"] = T.epsilon;
    j["leviSignature"] = leviSignature(T).str();
    return j;
}

Json mapJson(const Problem &P, int order, Actual &actual) {
    bool transversal = transversalityCheck(P.map);
    auto cert = nondegeneracyCheck(P.map, P.source, P.target, order, false);
    Json j{{"transversal", transversal}, {"mapped", cert.mapped}};
    j["k0"] = cert.k0 >= 0 ? Json(cert.k0) : Json(nullptr);
    j["spanDims"] = cert.spanDims;
    j["s0"] = cert.s0.str();
    // k0 is only a biholomorphic invariant for maps sending M into M'
    if (!cert.mapped) j["k0CoordinateDependent"] = true;
    actual["k0"] = std::to_string(cert.k0);
    return j;
}

void runCheck(const Problem &P, const Settings &s, Json &r, Actual &actual) {
    require(P.hasSource && P.hasTarget && P.hasMap, "check needs source, target and map");
    r["source"] = sourceJson(P);
    r["target"] = targetJson(P.target);
    r["map"] = mapJson(P, s.solve.startOrder, actual);
}

void runNormalCoords(const Problem &P, const Settings &s, Json &r) {
    require(P.hasSource, "normal-coords needs a source");
    const auto &M = P.source;
    Json j{{"Q", M.Q.truncated(kShowOrder).str()},
           {"g", M.g.truncated(kShowOrder).str()},
           {"changed", P.sourceChanged},
           {"exact", M.Q.order() >= kExact},
           {"realityResidualZero", realityResidual(M, std::min(M.order, s.solve.maxOrder)).isZero()}};
    j["shownToOrder"] = kShowOrder;
    r["normalCoordinates"] = j;
    r["source"] = sourceJson(P);
    if (P.hasMap) r["map"] = Json{{"inNormalCoordinates", seriesTriple(P.map.H, kShowOrder)}};
}

void runDeform(const Problem &P, const Settings &s, bool withSeries, Json &r, Actual &actual) {
    runCheck(P, s, r, actual);
    auto S = computeDeformationSpace(P.source, P.target, P.map, P.fields, s.solve);
    actual["status"] = S.trace.status;
    actual["trivial"] = std::to_string(S.trivialDim);
    actual["source-trivial"] = std::to_string(S.sourceTrivialDim);
    actual["automorphisms"] = std::to_string(S.targetAutDim);

    Json d;
    d["dimension"] = S.trace.accepted() ? Json(S.dimension) : Json(nullptr);
    d["trivialDim"] = S.trivialDim;
    d["sourceTrivialDim"] = S.sourceTrivialDim;
    d["targetAutomorphisms"] = S.targetAutDim;
    Json known = Json::array();
    for (auto &f : S.known)
        if (!f.label.empty()) known.push_back(f.label);
    d["verifiedFields"] = known;
    d["rejectedFields"] = S.rejected;
    d["trivialContained"] = S.trivialContained;
    d["basisVerified"] = S.basisVerified;
    r["deformations"] = d;
    if (S.trace.accepted()) {
        actual["dimension"] = std::to_string(S.dimension);
        actual["verdict"] = verdictName(*S.verdict);
        r["verdict"] = verdictName(*S.verdict);
        Json basis = Json::array();
        for (std::size_t k = 0; k < S.jetBasis.size(); ++k) {
            Json b{{"jet", jetJson(S.jetBasis[k])}};
            if (withSeries) b["series"] = seriesTriple(S.fieldBasis[k].alpha, kShowOrder);
            basis.push_back(b);
        }
        r["basis"] = basis;
    }
    Json diag{{"pipeline", traceJson(S.trace)}};
    if (s.oracle) {
        auto O = oracleDimension(P.source, P.target, P.map, S.trace.lowerBound, s.solve);
        Json o = traceJson(O);
        bool agree = O.accepted() && S.trace.accepted() && O.dimension == S.dimension;
        o["dimension"] = O.accepted() ? Json(O.dimension) : Json(nullptr);
        o["agrees"] = agree;
        diag["oracle"] = o;
        actual["oracle-agrees"] = agree ? "true" : "false";
    }
    r["diagnostics"] = diag;
}

void runGenericity(const Problem &P, const Settings &s, Json &r, Actual &actual) {
    require(P.hasMap && P.hasTarget, "genericity needs a map and a hyperquadric target");
    require(P.target.kind == TargetHypersurface::Kind::Hyperquadric, "genericity needs a hyperquadric target");
    const Series z = Series::variable(vs::zw(), 0, kExact), w = Series::variable(vs::zw(), 1, kExact);
    require(P.inputMap[0].sameTerms(z) && P.inputMap[2].sameTerms(w), "genericity takes maps of the form (z, F, w)");
    auto G = genericityCertificate(P.inputMap[1], P.target.epsilon, s.genericityOrder);
    Json mu0 = Json::array();
    for (int k : G.mu0) mu0.push_back(realCoordName(k));
    r["genericity"] = Json{{"F", P.inputMap[1].truncated(kShowOrder).str()},
                           {"epsilon", G.epsilon},
                           {"order", G.order},
                           {"rank", G.rank},
                           {"complementRank", G.complementRank},
                           {"complementSize", kJetReal - static_cast<int>(G.mu0.size())},
                           {"mu0", mu0},
                           {"fullRank", G.fullRank}};
    if (P.hasSource) r["genericity"]["sourceIgnored"] = true;
    actual["full-rank"] = G.fullRank ? "true" : "false";
}

// Runs one engine command; errors propagate.
void execute(const std::string &cmd, const ProblemSpec &spec, const Settings &s,
             const std::map<std::string, std::string> &set, Json &r, Actual &actual) {
    static const std::vector<std::string> known{"check", "normal-coords", "deform", "rigidity", "genericity"};
    if (std::find(known.begin(), known.end(), cmd) == known.end()) throw ValidationError("unknown command '" + cmd + "'");
    Problem P = buildProblem(spec, s.build, set);
    if (cmd == "check") runCheck(P, s, r, actual);
    else if (cmd == "normal-coords") runNormalCoords(P, s, r);
    else if (cmd == "deform") runDeform(P, s, true, r, actual);
    else if (cmd == "rigidity") runDeform(P, s, false, r, actual);
    else runGenericity(P, s, r, actual);
}

std::string summarize(const Json &r) {
    std::ostringstream os;
    os << r.value("command", "") << " " << r.value("input", "");
    if (r.contains("title")) os << " (" << r["title"].get<std::string>() << ")";
    os << "\n";
    if (r.contains("error"))
        os << "  error: " << r["error"]["kind"].get<std::string>() << ": " << r["error"]["message"].get<std::string>() << "\n";
    if (r.contains("map")) {
        auto &m = r["map"];
        if (m.contains("transversal"))
            os << "  transversal " << m["transversal"] << ", k0 " << m["k0"] << ", mapped " << m["mapped"] << "\n";
    }
    if (r.contains("deformations")) {
        auto &d = r["deformations"];
        os << "  dim hol0(H) = " << d["dimension"] << " (trivial " << d["trivialDim"] << ", with source automorphisms "
           << d["sourceTrivialDim"] << "), status " << r["diagnostics"]["pipeline"]["status"].get<std::string>() << "\n";
        if (r["diagnostics"].contains("oracle"))
            os << "  oracle dimension " << r["diagnostics"]["oracle"]["dimension"] << ", agrees "
               << r["diagnostics"]["oracle"]["agrees"] << "\n";
    }
    if (r.contains("verdict")) os << "  verdict " << r["verdict"].get<std::string>() << "\n";
    if (r.contains("genericity"))
        os << "  rank " << r["genericity"]["rank"] << ", complement rank " << r["genericity"]["complementRank"]
           << ", full rank " << r["genericity"]["fullRank"] << "\n";
    if (r.contains("normalCoordinates")) os << "  Q = " << r["normalCoordinates"]["Q"].get<std::string>() << " + ...\n";
    if (r.contains("expectations"))
        for (auto &e : r["expectations"])
            os << "  " << (e["pass"].get<bool>() ? "ok  " : "FAIL") << " " << e["key"].get<std::string>() << ": expected "
               << e["expected"].get<std::string>() << ", got " << e["actual"].get<std::string>() << "\n";
    if (r.contains("entries"))
        for (auto &e : r["entries"])
            os << "  " << (e["pass"].get<bool>() ? "ok  " : "FAIL") << " " << e["id"].get<std::string>() << "\n";
    return os.str();
}

bool inputError(const std::string &kind) {
    return kind == "ParseError" || kind == "ValidationError" || kind == "NonRepresentableParameter";
}

} // namespace

std::string corpusDirectory() {
    if (const char *env = std::getenv("CRRIGID_CORPUS")) return env;
    return CRRIGID_CORPUS_DIR;
}

std::vector<std::string> corpusIds() {
    std::vector<std::string> ids;
    std::error_code ec;
    for (auto &e : std::filesystem::directory_iterator(corpusDirectory(), ec))
        if (e.path().extension() == ".crr") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string resolveInput(const std::string &fileOrId) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(fileOrId)) return fileOrId;
    fs::path p = fs::path(corpusDirectory()) / (fileOrId + ".crr");
    if (fs::is_regular_file(p)) return p.string();
    throw ParseError("no input file or corpus entry named '" + fileOrId + "'");
}

RunResult runSpec(const std::string &command, const ProblemSpec &spec, const std::string &label, const RunOptions &opt) {
    RunResult out;
    Json &r = out.report;
    r["command"] = command;
    r["input"] = label;
    if (!spec.title.empty()) r["title"] = spec.title;
    auto t0 = std::chrono::steady_clock::now();
    Actual actual;
    bool reproduce = command == "reproduce";
    std::string cmd = reproduce ? spec.command : command;
    try {
        if (reproduce && cmd.empty()) throw ValidationError("input has no 'command:' to reproduce");
        if (reproduce) r["runs"] = cmd;
        Settings s = resolve(spec, opt);
        r["settings"] = settingsJson(s);
        FieldScope field(s.d);
        execute(cmd, spec, s, opt.set, r, actual);
    } catch (const Error &e) {
        r["error"] = Json{{"kind", e.kind()}, {"message", message(e)}};
        actual["error"] = e.kind();
        out.exitCode = 2;
    } catch (const std::exception &e) {
        r["error"] = Json{{"kind", "InternalError"}, {"message", e.what()}};
        actual["error"] = "InternalError";
        out.exitCode = 2;
    }
    if (reproduce) {
        if (out.exitCode == 2 && inputError(actual["error"])) {
            // an unusable input is not a failed expectation
        } else {
            bool all = true, errorExpected = false;
            Json ex = Json::array();
            for (auto &[k, v] : spec.expect) {
                errorExpected = errorExpected || k == "error";
                std::string got = actual.count(k) ? actual[k] : "(none)";
                bool pass = got == v;
                all = all && pass;
                ex.push_back(Json{{"key", k}, {"expected", v}, {"actual", got}, {"pass", pass}});
            }
            if (actual.count("error") && !errorExpected) {
                all = false;
                ex.push_back(Json{{"key", "error"}, {"expected", "(none)"}, {"actual", actual["error"]}, {"pass", false}});
            }
            r["expectations"] = ex;
            r["pass"] = all;
            out.exitCode = all ? 0 : 1;
        }
    }
    if (opt.timing)
        r["timing"] = Json{{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    out.summary = summarize(r);
    return out;
}

RunResult runCommand(const std::string &command, const std::string &input, const RunOptions &opt) {
    if (command == "selftest") {
        RunResult out;
        Json &r = out.report;
        r["command"] = "selftest";
        r["input"] = corpusDirectory();
        Json entries = Json::array();
        bool all = true;
        auto ids = corpusIds();
        if (ids.empty()) {
            r["error"] = Json{{"kind", "ValidationError"}, {"message", "empty corpus at " + corpusDirectory()}};
            out.exitCode = 2;
            out.summary = summarize(r);
            return out;
        }
        RunOptions sub = opt;
        sub.set.clear();
        for (auto &id : ids) {
            RunResult one = runCommand("reproduce", id, sub);
            bool roundTrip = false;
            try {
                auto spec = parseProblemFile(resolveInput(id));
                roundTrip = printProblem(parseProblem(printProblem(spec))) == printProblem(spec);
            } catch (const Error &) {
            }
            bool pass = one.exitCode == 0 && roundTrip;
            all = all && pass;
            Json e{{"id", id}, {"pass", pass}, {"exitCode", one.exitCode}, {"roundTrip", roundTrip}};
            if (one.report.contains("expectations")) e["expectations"] = one.report["expectations"];
            if (one.report.contains("error")) e["error"] = one.report["error"];
            entries.push_back(e);
        }
        r["entries"] = entries;
        r["pass"] = all;
        out.exitCode = all ? 0 : 1;
        out.summary = summarize(r);
        return out;
    }
    ProblemSpec spec;
    std::string label = input;
    try {
        spec = parseProblemFile(resolveInput(input));
    } catch (const Error &e) {
        RunResult out;
        out.report = Json{{"command", command}, {"input", input}, {"error", Json{{"kind", e.kind()}, {"message", message(e)}}}};
        out.exitCode = 2;
        out.summary = summarize(out.report);
        return out;
    }
    return runSpec(command, spec, label, opt);
}

} // namespace crr
