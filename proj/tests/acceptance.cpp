// Acceptance gate: one line per criterion, exit 0 only when every criterion
// holds.  Each criterion pins its own tolerances and runtime budget; the
// numbers printed are measured, never assumed.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rf/family_io.hpp"
#include "rf/frame.hpp"
#include "rf/mub.hpp"
#include "rf/sic.hpp"
#include "rf/tensor.hpp"
#include "rf/wigner.hpp"

namespace fs = std::filesystem;
using rf::Complex;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string note;
};

int g_failures = 0;

void report_line(int id, const std::string& name, const Outcome& o, double seconds) {
    std::printf("criterion %d (%s): %s (%.1f s%s%s)\n", id, name.c_str(),
                o.pass ? "PASS" : "FAIL", seconds, o.note.empty() ? "" : "; ",
                o.note.c_str());
    std::fflush(stdout);
    if (!o.pass) ++g_failures;
}

int suite_threads() {
    if (const char* env = std::getenv("RACAH_FRAMES_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

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

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("rf-acceptance-" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// A random unitary at distance ~eps from the identity (Cayley transform of a
// random Hermitian generator), used to break one family member.
Eigen::MatrixXcd small_random_unitary(int d, double eps, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd h(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) h(r, c) = Complex(g(rng), g(rng));
    h = 0.5 * (h + h.adjoint()).eval();
    h *= eps / h.norm();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Complex half_i(0.0, 0.5);
    return (id + half_i * h) * (id - half_i * h).inverse();
}

// --- criteria -------------------------------------------------------------

Outcome criterion_exact_suite(double budget_s) {
    const double t0 = now_seconds();
    const auto r = rf::wigner::run_identity_suite(16, suite_threads());
    const double dt = now_seconds() - t0;
    std::ostringstream note;
    note << r.checked() << " identities, " << r.failed() << " failed, "
         << (r.all_exact ? "all exact" : "float fallback used");
    Outcome o;
    o.pass = r.failed() == 0 && r.all_exact && r.first_failure.empty() &&
             r.orthogonality_mm.checked == 3186225 &&
             r.orthogonality_kq.checked == 3186225 && r.barycenter.checked == 1785 &&
             r.contraction.checked == 71397705 && dt < budget_s;
    if (dt >= budget_s) note << ", over budget";
    if (!r.first_failure.empty()) note << ", first failure " << r.first_failure;
    o.note = note.str();
    return o;
}

Outcome criterion_tensor_relations(double budget_s) {
    const double t0 = now_seconds();
    double worst = 0.0;
    int worst_two_j = -1;
    bool pass = true;
    for (int two_j = 0; two_j <= 8; ++two_j) {
        for (const auto& rep : {rf::tensor::check_hermitian_conjugation(two_j),
                                rf::tensor::check_trace_orthogonality(two_j),
                                rf::tensor::check_coupling(two_j)}) {
            pass = pass && rep.all_pass();
            if (rep.max_residual() > worst) {
                worst = rep.max_residual();
                worst_two_j = two_j;
            }
        }
    }
    const double dt = now_seconds() - t0;
    Outcome o;
    o.pass = pass && worst < 1e-12 && dt < budget_s;
    std::ostringstream note;
    note << "worst residual " << worst << " at two_j=" << worst_two_j;
    if (dt >= budget_s) note << ", over budget";
    o.note = note.str();
    return o;
}

Outcome criterion_mub(double budget_s, std::vector<rf::mub::MubSet>& sets_out) {
    const double t0 = now_seconds();
    bool pass = true;
    double worst_exact = 0.0, worst_battery = 0.0, worst_dual = 0.0;
    for (int d : {2, 3, 5, 7, 11, 13}) {
        auto set = rf::mub::build_prime_mubs(d);
        const auto verify = rf::mub::verify_mubs(set, 1e-12);
        const auto battery = rf::mub::coefficient_battery(set, 1e-10);
        const auto dual = rf::mub::check_closed_form(set, 1e-12);
        pass = pass && verify.all_pass() && battery.all_pass() && dual.all_pass();
        worst_exact = std::max(worst_exact, verify.max_residual());
        worst_battery = std::max(worst_battery, battery.max_residual());
        worst_dual = std::max(worst_dual, dual.max_residual());
        sets_out.push_back(std::move(set));
    }
    const double dt = now_seconds() - t0;
    Outcome o;
    o.pass = pass && dt < budget_s;
    std::ostringstream note;
    note << "unbiasedness/decomposition " << worst_exact << ", battery "
         << worst_battery << ", dual-route " << worst_dual;
    if (dt >= budget_s) note << ", over budget";
    o.note = note.str();
    return o;
}

Outcome criterion_sic(double budget_s, std::vector<rf::sic::SicCandidate>& cands_out) {
    const double t0 = now_seconds();
    bool pass = true;
    double worst_residual = 0.0, worst_battery = 0.0;
    std::ostringstream missing;
    for (int d = 2; d <= 8; ++d) {
        rf::sic::SearchConfig config;  // documented defaults, seed 42
        config.d = d;
        auto cand = rf::sic::search_fiducial(config);
        if (!cand.converged || cand.residual >= 1e-8) {
            pass = false;
            missing << " d=" << d << " residual " << cand.residual;
        }
        const auto battery = rf::sic::coefficient_battery(cand, 1e-8);
        pass = pass && battery.all_pass();
        worst_residual = std::max(worst_residual, cand.residual);
        worst_battery = std::max(worst_battery, battery.max_residual());
        // The spectrum entry inside the battery is pinned at 1e-6.
        const auto* spectrum = battery.find("gram spectrum");
        pass = pass && spectrum && spectrum->pass && spectrum->tolerance == 1e-6;
        cands_out.push_back(std::move(cand));
    }
    const double dt = now_seconds() - t0;
    Outcome o;
    o.pass = pass && dt < budget_s;
    std::ostringstream note;
    note << "worst search residual " << worst_residual << ", worst battery residual "
         << worst_battery;
    if (!missing.str().empty()) note << ", not converged:" << missing.str();
    if (dt >= budget_s) note << ", over budget";
    o.note = note.str();
    return o;
}

Outcome criterion_equivalence(const std::vector<rf::sic::SicCandidate>& cands) {
    bool pass = true;
    double worst = 0.0;
    for (const auto& cand : cands) {
        if (cand.d() > 3) continue;
        const auto rep = rf::sic::check_state_vector_equivalence(cand, 1e-12);
        pass = pass && rep.all_pass();
        worst = std::max(worst, rep.max_residual());
    }
    Outcome o;
    o.pass = pass;
    std::ostringstream note;
    note << "worst pairwise gap " << worst << " over d in {2,3}";
    o.note = note.str();
    return o;
}

Outcome criterion_completeness(const std::vector<rf::sic::SicCandidate>& cands,
                               const std::vector<rf::mub::MubSet>& sets) {
    bool pass = true;
    std::ostringstream note;
    for (const auto& cand : cands) {
        std::vector<rf::FrameVector> vecs;
        for (const auto& c : rf::sic::sic_coefficients(cand))
            vecs.push_back(rf::frame::vectorize(c));
        const auto rank = rf::frame::check_informational_completeness(vecs);
        if (!rank.complete) {
            pass = false;
            note << " sic d=" << cand.d() << " rank " << rank.rank;
        }
    }
    for (const auto& set : sets) {
        std::vector<rf::FrameVector> vecs;
        for (const auto& c : rf::mub::mub_coefficients(set))
            vecs.push_back(rf::frame::vectorize(c));
        const auto rank = rf::frame::check_informational_completeness(vecs);
        if (!rank.complete) {
            pass = false;
            note << " mub d=" << set.d() << " rank " << rank.rank;
        }
    }
    Outcome o;
    o.pass = pass;
    o.note = pass ? "rank d^2 for 7 SIC families and 6 MUB sets" : note.str();
    return o;
}

Outcome criterion_negative_controls() {
    Outcome o;
    o.pass = true;
    std::ostringstream note;
    const auto fail = [&](const std::string& why) {
        o.pass = false;
        note << (note.str().empty() ? "" : "; ") << why;
    };

    // MUB: one member state rotated by a random unitary at magnitude 1e-3.
    const fs::path mub_good = work_dir() / "nc-m3.json";
    const fs::path mub_bad = work_dir() / "nc-m3-bent.json";
    if (run_cli("mub build -d 3 --out " + mub_good.string()) != 0)
        fail("mub build failed");
    else {
        auto fam = rf::io::read_family(mub_good.string());
        const Eigen::MatrixXcd u = small_random_unitary(3, 1e-3, 424242u);
        fam.members.at(4).state = u * fam.members.at(4).state;  // a=1 alpha=1
        rf::io::write_family(fam, mub_bad.string());
        std::string out;
        if (run_cli("mub verify " + mub_bad.string(), &out) != 1)
            fail("mub verify accepted a bent member");
        else if (out.find("\"overall_pass\": false") == std::string::npos)
            fail("mub verify report missing verdict");
        else if (out.find("a=1") == std::string::npos)
            fail("mub verify report not localized");
        if (run_cli("mub coeffs " + mub_bad.string(), &out) != 1)
            fail("mub coeffs accepted a bent member");
    }

    // SIC: same treatment after a tiny converged search.
    const fs::path sic_good = work_dir() / "nc-s2.json";
    const fs::path sic_bad = work_dir() / "nc-s2-bent.json";
    if (run_cli("sic search -d 2 --seed 42 --out " + sic_good.string()) != 0)
        fail("sic search failed");
    else {
        auto fam = rf::io::read_family(sic_good.string());
        const Eigen::MatrixXcd u = small_random_unitary(2, 1e-3, 77u);
        fam.members.at(1).state = u * fam.members.at(1).state;
        rf::io::write_family(fam, sic_bad.string());
        std::string out;
        if (run_cli("sic verify " + sic_bad.string(), &out) != 1)
            fail("sic verify accepted a bent member");
        else if (out.find("\"overall_pass\": false") == std::string::npos)
            fail("sic verify report missing verdict");
        else if (out.find("x=1") == std::string::npos &&
                 out.find("y=1") == std::string::npos)
            fail("sic verify report not localized");  // bent member may sit on either side of the worst pair
        if (run_cli("sic coeffs " + sic_bad.string(), &out) != 1)
            fail("sic coeffs accepted a bent member");
        if (run_cli("frame check " + sic_bad.string(), &out) != 1)
            fail("frame check accepted a bent member");
    }

    if (o.pass) note << "5 batteries rejected perturbed members with exit 1";
    o.note = note.str();
    return o;
}

Outcome criterion_determinism() {
    const fs::path a = work_dir() / "det-a.json";
    const fs::path b = work_dir() / "det-b.json";
    Outcome o;
    if (run_cli("sic search -d 3 --seed 42 --out " + a.string()) != 0 ||
        run_cli("sic search -d 3 --seed 42 --out " + b.string()) != 0) {
        o.note = "search did not exit 0";
        return o;
    }
    const std::string ta = slurp(a), tb = slurp(b);
    o.pass = !ta.empty() && ta == tb;
    std::ostringstream note;
    note << ta.size() << " bytes, " << (o.pass ? "byte-identical" : "files differ");
    o.note = note.str();
    return o;
}

}  // namespace

int main() {
    std::printf("binary under test: %s\n", binary_path().c_str());

    double t0 = now_seconds();
    auto o1 = criterion_exact_suite(60.0);
    report_line(1, "exact identity suite, two_j <= 16", o1, now_seconds() - t0);

    t0 = now_seconds();
    auto o2 = criterion_tensor_relations(30.0);
    report_line(2, "unit-tensor relations, two_j <= 8", o2, now_seconds() - t0);

    std::vector<rf::mub::MubSet> mub_sets;
    t0 = now_seconds();
    auto o3 = criterion_mub(60.0, mub_sets);
    report_line(3, "unbiased bases for prime d <= 13", o3, now_seconds() - t0);

    std::vector<rf::sic::SicCandidate> sic_cands;
    t0 = now_seconds();
    auto o4 = criterion_sic(300.0, sic_cands);
    report_line(4, "equiangular searches, d = 2..8", o4, now_seconds() - t0);

    t0 = now_seconds();
    auto o5 = criterion_equivalence(sic_cands);
    report_line(5, "state/vector formulation agreement", o5, now_seconds() - t0);

    t0 = now_seconds();
    auto o6 = criterion_completeness(sic_cands, mub_sets);
    report_line(6, "informational completeness", o6, now_seconds() - t0);

    t0 = now_seconds();
    auto o7 = criterion_negative_controls();
    report_line(7, "negative controls", o7, now_seconds() - t0);

    t0 = now_seconds();
    auto o8 = criterion_determinism();
    report_line(8, "seeded search determinism", o8, now_seconds() - t0);

    if (g_failures == 0) {
        std::printf("acceptance: all 8 criteria hold\n");
        return 0;
    }
    std::printf("acceptance: %d criteria failed\n", g_failures);
    return 1;
}
