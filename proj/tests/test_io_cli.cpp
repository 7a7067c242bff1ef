#include "rf/family_io.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rf/mub.hpp"
#include "rf/sic.hpp"

using namespace rf;
namespace fs = std::filesystem;

namespace {

// --- harness for driving the installed binary ---------------------------

std::string binary_path() {
    if (const char* env = std::getenv("RACAH_FRAMES_BIN"); env && *env) return env;
#ifdef RACAH_FRAMES_BIN_PATH
    return RACAH_FRAMES_BIN_PATH;
#else
    return "racah-frames";
#endif
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    const std::string cmd = binary_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return -1;
    std::string text;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
    const int status = pclose(pipe);
    if (output) *output = std::move(text);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("rf-cli-tests-" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string tmp_file(const std::string& name) {
    return (scratch_dir() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

// --- family schema, library level ----------------------------------------

TEST(FamilyIo, SicByteRoundTrip) {
    sic::SearchConfig cfg;
    cfg.d = 3;
    auto cand = sic::search_fiducial(cfg);
    ASSERT_TRUE(cand.converged);
    auto fam = io::family_from_sic(cand, &cfg);
    io::attach_coefficients(fam, sic::sic_coefficients(cand));
    const std::string s1 = io::family_to_string(fam);
    auto fam2 = io::family_from_string(s1);
    EXPECT_EQ(s1, io::family_to_string(fam2));

    auto cand2 = io::sic_from_family(fam2);
    EXPECT_TRUE(cand2.converged);
    EXPECT_TRUE(cand2.covariant);
    EXPECT_EQ(cand2.fiducial.size(), 3);
    EXPECT_NEAR(cand2.residual, cand.residual, 1e-15);
    EXPECT_TRUE(sic::verify_sic(cand2, 1e-8).all_pass());
}

TEST(FamilyIo, MubByteRoundTrip) {
    auto set = mub::build_prime_mubs(5);
    auto fam = io::family_from_mub(set);
    const std::string s1 = io::family_to_string(fam);
    auto fam2 = io::family_from_string(s1);
    EXPECT_EQ(s1, io::family_to_string(fam2));
    EXPECT_EQ(fam2.members.at(7).label, "a=1 alpha=2");
    EXPECT_EQ(fam2.construction, "explicit-prime");

    auto set2 = io::mub_from_family(fam2);
    EXPECT_EQ(set2.basis_count(), 6);
    EXPECT_TRUE(mub::verify_mubs(set2).all_pass());
}

TEST(FamilyIo, FileRoundTripAndAtomicWrite) {
    auto fam = io::family_from_mub(mub::build_prime_mubs(2));
    const std::string path = tmp_file("m2.json");
    io::write_family(fam, path);
    EXPECT_FALSE(fs::exists(path + ".tmp"));  // temp name cleaned by the rename
    auto fam2 = io::read_family(path);
    EXPECT_EQ(io::family_to_string(fam), io::family_to_string(fam2));
    EXPECT_THROW(io::read_family(tmp_file("does-not-exist.json")), std::runtime_error);
}

TEST(FamilyIo, ExtrasSurviveAndStayStrings) {
    io::FamilyFile fam;
    fam.kind = "generic";
    fam.two_j = 1;
    io::FamilyMember m;
    m.label = "p";
    m.op = Eigen::MatrixXcd::Identity(2, 2);
    fam.members.push_back(m);
    fam.extras["note"] = "hand-built";
    const std::string s1 = io::family_to_string(fam);
    auto fam2 = io::family_from_string(s1);
    EXPECT_EQ(fam2.extras.at("note"), "hand-built");
    EXPECT_EQ(s1, io::family_to_string(fam2));
    EXPECT_EQ(fam2.members.at(0).op.rows(), 2);
}

TEST(FamilyIo, MalformedInputsRejected) {
    const char* cases[] = {
        // wrong schema version
        R"({"schema_version": 2, "kind": "mub", "j": {"two_j": 1}, "members": [], "metadata": {}})",
        // unknown kind
        R"({"schema_version": 1, "kind": "what", "j": {"two_j": 1}, "members": [], "metadata": {}})",
        // missing angular momentum
        R"({"schema_version": 1, "kind": "mub", "members": [], "metadata": {}})",
        // unknown top-level key
        R"({"schema_version": 1, "kind": "mub", "j": {"two_j": 1}, "members": [], "metadata": {}, "zzz": 1})",
        // state length inconsistent with two_j
        R"({"schema_version": 1, "kind": "generic", "j": {"two_j": 1}, "members": [{"label": "", "state": [[1,0]]}], "metadata": {}})",
        // member with neither state nor operator
        R"({"schema_version": 1, "kind": "generic", "j": {"two_j": 0}, "members": [{"label": "x"}], "metadata": {}})",
        // non-string free-form metadata
        R"({"schema_version": 1, "kind": "generic", "j": {"two_j": 0}, "members": [], "metadata": {"extra": 3}})",
        // not JSON at all
        "][",
    };
    for (const char* text : cases)
        EXPECT_THROW(io::family_from_string(text), io::SchemaError) << text;
}

TEST(FamilyIo, KindGuardsOnConverters) {
    auto fam = io::family_from_mub(mub::build_prime_mubs(3));
    EXPECT_THROW(io::sic_from_family(fam), io::SchemaError);
    io::FamilyFile generic;
    generic.kind = "generic";
    EXPECT_THROW(io::mub_from_family(generic), io::SchemaError);
}

TEST(FamilyIo, EditedFileJudgedByContent) {
    sic::SearchConfig cfg;
    cfg.d = 2;
    auto cand = sic::search_fiducial(cfg);
    auto fam = io::family_from_sic(cand, &cfg);
    fam.members[1].state(0) += Complex(1e-3, 0.0);
    auto cand2 = io::sic_from_family(fam);
    EXPECT_FALSE(cand2.converged);   // residual recomputed, not trusted
    EXPECT_GT(cand2.residual, 1e-4);
}

TEST(FamilyIo, AttachCoefficientsValidatesCount) {
    auto fam = io::family_from_mub(mub::build_prime_mubs(2));
    std::vector<TensorCoefficients> wrong(3, TensorCoefficients(1));
    EXPECT_THROW(io::attach_coefficients(fam, wrong), std::invalid_argument);
}

TEST(ReportRendering, FieldsAndVerdict) {
    CheckReport r;
    r.add("alpha", "a = b", 1e-13, 1e-12);
    r.add("beta", "c = d", 0.5, 1e-12, "at x=3");
    const std::string s = io::report_to_string(r, "frame check f.json", 0.25);
    EXPECT_NE(s.find("\"command\": \"frame check f.json\""), std::string::npos);
    EXPECT_NE(s.find("\"relation\": \"a = b\""), std::string::npos);
    EXPECT_NE(s.find("\"overall_pass\": false"), std::string::npos);
    EXPECT_NE(s.find("\"detail\": \"at x=3\""), std::string::npos);
    CheckReport good;
    good.add("alpha", "a = b", 0.0, 1e-12);
    EXPECT_NE(io::report_to_string(good, "x", 0.0).find("\"overall_pass\": true"),
              std::string::npos);
}

// --- command-line driver --------------------------------------------------

TEST(Cli, WignerExactValues) {
    std::string out;
    ASSERT_EQ(run_cli("wigner 3jm --j1 1 --j2 1 --j3 0 --m1 1 --m2 -1 --m3 0", &out), 0);
    EXPECT_EQ(out.substr(0, out.find('\n')), "+sqrt(1/3)");
    ASSERT_EQ(run_cli("wigner 6j --j1 1 --j2 1 --j3 0 --j4 1 --j5 1 --j6 1", &out), 0);
    EXPECT_EQ(out.substr(0, out.find('\n')), "-1/3");
    ASSERT_EQ(run_cli("wigner 3jm --j1 1 --j2 1 --j3 1 --m1 1 --m2 0 --m3 0", &out), 0);
    EXPECT_EQ(out.substr(0, out.find('\n')), "0");  // m-sum != 0
    ASSERT_EQ(run_cli("wigner 3jm --j1 3/2 --j2 1/2 --j3 1 --m1 1/2 --m2 1/2 --m3 -1", &out),
              0);
    EXPECT_EQ(out.substr(0, out.find('\n')), "-sqrt(1/12)");  // -sqrt(3)/6
}

TEST(Cli, WignerParityErrorIsUsage) {
    std::string out;
    EXPECT_EQ(run_cli("wigner 3jm --j1 1 --j2 1 --j3 0 --m1 1/2 --m2 -1/2 --m3 0", &out), 2);
    EXPECT_NE(out.find("error"), std::string::npos);
    EXPECT_EQ(run_cli("wigner 3jm --j1 1 --j2 1 --j3 0 --m1 1.5 --m2 -1 --m3 0", &out), 2);
}

TEST(Cli, MubPipeline) {
    const std::string fam = tmp_file("m5.json");
    ASSERT_EQ(run_cli("mub build -d 5 --out " + fam), 0);
    const std::string vrep = tmp_file("m5-verify.json");
    EXPECT_EQ(run_cli("mub verify " + fam + " --out " + vrep), 0);
    const std::string verify = slurp(vrep);
    EXPECT_NE(verify.find("\"overall_pass\": true"), std::string::npos);
    EXPECT_NE(verify.find("closed form agreement"), std::string::npos);
    const std::string rep = tmp_file("m5-report.json");
    EXPECT_EQ(run_cli("mub coeffs " + fam + " --out " + rep), 0);
    const std::string report = slurp(rep);
    EXPECT_NE(report.find("\"overall_pass\": true"), std::string::npos);
    EXPECT_NE(report.find("rotational invariance"), std::string::npos);
    EXPECT_NE(report.find("sum rule"), std::string::npos);
}

TEST(Cli, MubNonPrimeRejected) {
    std::string out;
    EXPECT_EQ(run_cli("mub build -d 6 --out " + tmp_file("m6.json"), &out), 2);
    EXPECT_NE(out.find("d must be prime"), std::string::npos);
}

TEST(Cli, SicSearchVerifyAndDeterminism) {
    const std::string a = tmp_file("s3a.json");
    const std::string b = tmp_file("s3b.json");
    std::string out;
    ASSERT_EQ(run_cli("sic search -d 3 --seed 42 --out " + a, &out), 0);
    EXPECT_NE(out.find("converged"), std::string::npos);
    ASSERT_EQ(run_cli("sic search -d 3 --seed 42 --out " + b), 0);
    EXPECT_EQ(slurp(a), slurp(b));  // byte-identical reruns
    EXPECT_FALSE(slurp(a).empty());

    EXPECT_EQ(run_cli("sic verify " + a), 0);
    EXPECT_EQ(run_cli("sic coeffs " + a), 0);
    EXPECT_EQ(run_cli("frame check " + a), 0);

    // A different seed still converges but lands elsewhere.
    const std::string c = tmp_file("s3c.json");
    ASSERT_EQ(run_cli("sic search -d 3 --seed 43 --out " + c), 0);
    EXPECT_NE(slurp(a), slurp(c));
}

TEST(Cli, PerturbedFamilyFailsChecksWithExitOne) {
    const std::string good = tmp_file("m3.json");
    ASSERT_EQ(run_cli("mub build -d 3 --out " + good), 0);
    auto fam = io::read_family(good);
    fam.members[4].state(1) *= std::polar(1.0, 1e-3);
    const std::string bad = tmp_file("m3-bent.json");
    io::write_family(fam, bad);
    std::string out;
    EXPECT_EQ(run_cli("mub verify " + bad, &out), 1);
    EXPECT_NE(out.find("\"overall_pass\": false"), std::string::npos);
    EXPECT_EQ(run_cli("mub coeffs " + bad), 1);
}

TEST(Cli, SchemaErrorsAreUsageErrors) {
    const std::string broken = tmp_file("broken.json");
    std::ofstream(broken) << R"({"schema_version": 1, "j": {"two_j": 1}, "members": [], "metadata": {}})";
    std::string out;
    EXPECT_EQ(run_cli("mub verify " + broken, &out), 2);
    EXPECT_NE(out.find("missing kind"), std::string::npos);
    EXPECT_EQ(run_cli("mub verify " + tmp_file("absent.json")), 2);
    // Kind mismatch between file and subcommand.
    const std::string m2 = tmp_file("m2-for-sic.json");
    ASSERT_EQ(run_cli("mub build -d 2 --out " + m2), 0);
    EXPECT_EQ(run_cli("sic verify " + m2), 2);
}

TEST(Cli, IdentitiesSuiteAndInjectedFailure) {
    const std::string rep = tmp_file("ident.json");
    ASSERT_EQ(run_cli("identities --max-two-j 2 --tensor-max-two-j 2 --out " + rep), 0);
    const std::string report = slurp(rep);
    EXPECT_NE(report.find("\"overall_pass\": true"), std::string::npos);
    EXPECT_NE(report.find("3jm x 6j contraction"), std::string::npos);
    EXPECT_NE(report.find("coupling reconstruction two_j=2"), std::string::npos);
    std::string out;
    EXPECT_EQ(run_cli("identities --max-two-j 2 --tensor-max-two-j 0 --inject-failure", &out),
              1);
    EXPECT_NE(out.find("injected failure (test hook)"), std::string::npos);
}

TEST(Cli, TensorDumpEmitsParsableJson) {
    const std::string out_path = tmp_file("u.json");
    ASSERT_EQ(run_cli("tensor dump -j 1 -k 1 -q 1 --out " + out_path), 0);
    const std::string text = slurp(out_path);
    EXPECT_NE(text.find("\"tensors\""), std::string::npos);
    EXPECT_NE(text.find("\"two_j\": 2"), std::string::npos);
    std::string all;
    ASSERT_EQ(run_cli("tensor dump -j 1/2", &all), 0);
    EXPECT_NE(all.find("\"k\": 1"), std::string::npos);
    EXPECT_EQ(run_cli("tensor dump -j 1 -q 1"), 2);  // -q needs -k
}

TEST(Cli, ThreadEnvironmentContract) {
    std::string out;
    EXPECT_EQ(run_cli("identities --max-two-j 0", &out), 0);
    const std::string prefix = "RACAH_FRAMES_THREADS=3 " + binary_path();
    FILE* pipe = popen((prefix + " identities --max-two-j 2 2>&1").c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    char buf[4096];
    while (fread(buf, 1, sizeof buf, pipe) > 0) {
    }
    EXPECT_EQ(WEXITSTATUS(pclose(pipe)), 0);
    FILE* bad = popen((std::string("RACAH_FRAMES_THREADS=zap ") + binary_path() +
                       " identities --max-two-j 0 2>&1")
                          .c_str(),
                      "r");
    ASSERT_NE(bad, nullptr);
    while (fread(buf, 1, sizeof buf, bad) > 0) {
    }
    EXPECT_EQ(WEXITSTATUS(pclose(bad)), 2);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli("no-such-command"), 2);
    EXPECT_EQ(run_cli("sic search --out x.json"), 2);  // missing -d
    EXPECT_EQ(run_cli("mub build -d 5"), 2);           // missing --out
}
