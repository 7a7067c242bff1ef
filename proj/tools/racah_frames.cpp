// Command-line front end: exact Wigner symbols, identity suites, tensor
// dumps, MUB/SIC construction and verification over the family JSON schema.
// Exit codes: 0 all checks pass; 1 a check failed or the search did not
// converge; 2 usage, IO, or schema errors.

#include "rf/family_io.hpp"
#include "rf/frame.hpp"
#include "rf/half_int.hpp"
#include "rf/mub.hpp"
#include "rf/report.hpp"
#include "rf/sic.hpp"
#include "rf/tensor.hpp"
#include "rf/wigner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

namespace {

using rf::CheckReport;
using rf::HalfInt;
using ordered_json = nlohmann::ordered_json;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// RACAH_FRAMES_THREADS caps parallel sections; 0 or unset means one thread
// per hardware core.
int env_thread_cap() {
    const char* env = std::getenv("RACAH_FRAMES_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0)
        throw std::invalid_argument(
            "RACAH_FRAMES_THREADS must be a nonnegative integer");
    return static_cast<int>(v);
}

int resolve_threads(int requested) {
    if (requested < 0) requested = env_thread_cap();
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
    return requested;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// Prints the report to stdout or writes it to out_path; the exit code is
// carried by the report verdict.
int emit_report(const CheckReport& report, const std::string& command,
                double wall_time_s, const std::string& out_path) {
    const std::string text = rf::io::report_to_string(report, command, wall_time_s);
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        rf::io::write_text(text, out_path);
    return report.all_pass() ? 0 : 1;
}

void print_exact(const rf::SignedSqrtRational& v) {
    std::printf("%s\n%.17g\n", v.str().c_str(), v.to_double());
}

int cmd_wigner_3jm(const std::array<std::string, 6>& args) {
    print_exact(rf::wigner::three_jm(
        rf::parse_half_int(args[0]), rf::parse_half_int(args[1]),
        rf::parse_half_int(args[2]), rf::parse_half_int(args[3]),
        rf::parse_half_int(args[4]), rf::parse_half_int(args[5])));
    return 0;
}

int cmd_wigner_6j(const std::array<std::string, 6>& args) {
    print_exact(rf::wigner::six_j(
        rf::parse_half_int(args[0]), rf::parse_half_int(args[1]),
        rf::parse_half_int(args[2]), rf::parse_half_int(args[3]),
        rf::parse_half_int(args[4]), rf::parse_half_int(args[5])));
    return 0;
}

void add_suite_entry(CheckReport& report, const std::string& name,
                     const std::string& relation, const rf::wigner::SuiteCounts& counts,
                     const std::string& first_failure) {
    std::ostringstream detail;
    detail << "checked " << counts.checked << " (summed termwise " << counts.computed
           << ")";
    if (counts.failed > 0 && !first_failure.empty())
        detail << "; first failure: " << first_failure;
    report.add(name, relation, static_cast<double>(counts.failed), 0.0, detail.str());
}

int cmd_identities(int max_two_j, int tensor_max_two_j, int threads, bool inject_failure,
                   const std::string& command, const std::string& out_path) {
    Timer timer;
    CheckReport report;

    const auto suite = rf::wigner::run_identity_suite(max_two_j, resolve_threads(threads));
    add_suite_entry(report, "3jm orthogonality (magnetic sums)",
                    "sum_{m m'} (j j' k; m m' q)(j j' l; m m' p) = "
                    "delta_kl delta_qp Delta(j j' k)/(2k+1)",
                    suite.orthogonality_mm, suite.first_failure);
    add_suite_entry(report, "3jm orthogonality (k q sums)",
                    "sum_{k q} (2k+1)(j j' k; m m' q)(j j' k; M M' q) = "
                    "delta_mM delta_m'M'",
                    suite.orthogonality_kq, suite.first_failure);
    add_suite_entry(report, "barycenter",
                    "sum_m (-1)^{j-m} (j k j; -m q m) = sqrt(2j+1) delta_k0 delta_q0",
                    suite.barycenter, suite.first_failure);
    add_suite_entry(report, "3jm x 6j contraction",
                    "sum_{m m' M} (-1)^{j-M} (j k j; -m q M)(j l j; -M p m')"
                    "(j K j; -m Q m') = (-1)^{2j-Q} (k l K; -q -p Q) {k l K; j j j}",
                    suite.contraction, suite.first_failure);
    if (!suite.all_exact)
        report.add("exact arithmetic", "every suite comparison stayed rational", 1.0,
                   0.0, "some sums fell back to 256-bit floats");

    for (int two_j = 0; two_j <= tensor_max_two_j; ++two_j) {
        const std::string suffix = " two_j=" + std::to_string(two_j);
        const auto herm = rf::tensor::check_hermitian_conjugation(two_j);
        report.add("hermitian conjugation" + suffix,
                   "u(k,q)^dagger = (-1)^q u(k,-q)", herm.max_residual(),
                   rf::frame::kExactTol);
        const auto trace = rf::tensor::check_trace_orthogonality(two_j);
        report.add("trace orthogonality" + suffix,
                   "Tr(u(k,q)^dagger u(l,p)) = delta_kl delta_qp Delta/(2k+1)",
                   trace.max_residual(), rf::frame::kExactTol);
        const auto coupling = rf::tensor::check_coupling(two_j);
        report.add("coupling reconstruction" + suffix,
                   "u(k,q) u(l,p) = sum_K (-1)^{2j-Q} (2K+1) (3jm)(6j) u(K,Q)",
                   coupling.max_residual(), rf::frame::kExactTol);
    }

    if (inject_failure) {
        const double v = rf::wigner::three_jm(HalfInt::whole(1), HalfInt::whole(1),
                                              HalfInt::whole(0), HalfInt::whole(1),
                                              HalfInt::whole(-1), HalfInt::whole(0))
                             .to_double();
        report.add("injected failure (test hook)",
                   "deliberate sign flip of 3jm(1 1 0; 1 -1 0)", std::abs(v - (-v)),
                   rf::frame::kExactTol, "enabled by --inject-failure");
    }

    return emit_report(report, command, timer.seconds(), out_path);
}

int cmd_tensor_dump(const std::string& j_text, std::optional<int> k, std::optional<int> q,
                    const std::string& out_path) {
    const HalfInt j = rf::parse_half_int(j_text);
    if (j.twice() < 0) throw std::invalid_argument("j must be nonnegative");
    const int two_j = j.twice();

    ordered_json out;
    out["j"] = ordered_json{{"two_j", two_j}};
    ordered_json tensors = ordered_json::array();
    const auto dump_one = [&](int kk, int qq) {
        const auto u = rf::tensor::unit_tensor(two_j, kk, qq);
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < u.matrix.rows(); ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < u.matrix.cols(); ++c)
                row.push_back(ordered_json::array(
                    {u.matrix(r, c).real(), u.matrix(r, c).imag()}));
            rows.push_back(std::move(row));
        }
        tensors.push_back(ordered_json{{"k", kk}, {"q", qq}, {"matrix", std::move(rows)}});
    };
    if (k && q) {
        dump_one(*k, *q);
    } else if (k) {
        for (int qq = -*k; qq <= *k; ++qq) dump_one(*k, qq);
    } else {
        for (int kk = 0; kk <= two_j; ++kk)
            for (int qq = -kk; qq <= kk; ++qq) dump_one(kk, qq);
    }
    out["tensors"] = std::move(tensors);

    const std::string text = out.dump(2) + "\n";
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        rf::io::write_text(text, out_path);
    return 0;
}

// Worst first-component and conjugation deviations across family members,
// plus the completeness rank: the kind-independent portion of frame check.
void add_generic_entries(CheckReport& report,
                         const std::vector<rf::TensorCoefficients>& coeffs, double tol) {
    double worst_first = 0.0, worst_conj = 0.0;
    std::string who_first, who_conj;
    for (const auto& c : coeffs) {
        const double rf_ = rf::frame::check_first_component(c, tol).max_residual();
        if (rf_ > worst_first) {
            worst_first = rf_;
            who_first = c.label();
        }
        const double rc = rf::frame::check_conjugation(c, tol).max_residual();
        if (rc > worst_conj) {
            worst_conj = rc;
            who_conj = c.label();
        }
    }
    report.add("first component", "c(0,0) = 1/sqrt(2j+1) for every member",
               worst_first, tol, who_first);
    report.add("conjugation", "conj(c(k,q)) = (-1)^q c(k,-q) for every member",
               worst_conj, tol, who_conj);
}

void add_rank_entry(CheckReport& report,
                    const std::vector<rf::TensorCoefficients>& coeffs) {
    std::vector<rf::FrameVector> vectors;
    vectors.reserve(coeffs.size());
    for (const auto& c : coeffs) vectors.push_back(rf::frame::vectorize(c));
    const auto rank = rf::frame::check_informational_completeness(vectors);
    report.add("informational completeness", "vectorized family has rank (2j+1)^2",
               static_cast<double>(rank.required - rank.rank), 0.0,
               "rank " + std::to_string(rank.rank) + "/" +
                   std::to_string(rank.required));
}

int cmd_frame_check(const std::string& path, std::optional<double> tol,
                    const std::string& command, const std::string& out_path) {
    Timer timer;
    const auto family = rf::io::read_family(path);
    CheckReport report;
    if (family.kind == "sic") {
        const auto cand = rf::io::sic_from_family(family);
        report = rf::sic::coefficient_battery(cand, tol.value_or(rf::frame::kSearchTol));
        add_rank_entry(report, rf::sic::sic_coefficients(cand));
    } else if (family.kind == "mub") {
        const auto set = rf::io::mub_from_family(family);
        report = rf::mub::coefficient_battery(set, tol.value_or(rf::frame::kNumericTol));
        add_rank_entry(report, rf::mub::mub_coefficients(set));
    } else {
        const double t = tol.value_or(rf::frame::kNumericTol);
        std::vector<rf::TensorCoefficients> coeffs;
        coeffs.reserve(family.members.size());
        for (const auto& member : family.members) {
            const Eigen::MatrixXcd op = member.op.rows() > 0
                                            ? member.op
                                            : Eigen::MatrixXcd(member.state *
                                                               member.state.adjoint());
            coeffs.push_back(rf::frame::expand(op, family.two_j, member.label));
        }
        add_generic_entries(report, coeffs, t);
        add_rank_entry(report, coeffs);
    }
    return emit_report(report, command, timer.seconds(), out_path);
}

int cmd_mub_build(int d, const std::string& out_path) {
    if (!rf::mub::is_prime(d))
        throw std::invalid_argument("d must be prime (got " + std::to_string(d) +
                                    "); the explicit construction covers prime d only");
    rf::io::write_family(rf::io::family_from_mub(rf::mub::build_prime_mubs(d)), out_path);
    std::printf("wrote %d bases of dimension %d to %s\n", d + 1, d, out_path.c_str());
    return 0;
}

int cmd_mub_verify(const std::string& path, std::optional<double> tol,
                   const std::string& command, const std::string& out_path) {
    Timer timer;
    const auto set = rf::io::mub_from_family(rf::io::read_family(path));
    CheckReport report = rf::mub::verify_mubs(set, tol.value_or(rf::frame::kExactTol));
    report.merge(rf::mub::check_closed_form(set));
    return emit_report(report, command, timer.seconds(), out_path);
}

int cmd_mub_coeffs(const std::string& path, std::optional<double> tol,
                   const std::string& command, const std::string& report_path,
                   const std::string& family_out) {
    Timer timer;
    auto family = rf::io::read_family(path);
    const auto set = rf::io::mub_from_family(family);
    if (!family_out.empty()) {
        rf::io::attach_coefficients(family, rf::mub::mub_coefficients(set));
        rf::io::write_family(family, family_out);
    }
    const CheckReport report =
        rf::mub::coefficient_battery(set, tol.value_or(rf::frame::kNumericTol));
    return emit_report(report, command, timer.seconds(), report_path);
}

int cmd_sic_search(const rf::sic::SearchConfig& config, const std::string& out_path) {
    const auto cand = rf::sic::search_fiducial(config);
    rf::io::write_family(rf::io::family_from_sic(cand, &config), out_path);
    if (cand.converged) {
        std::printf("converged: d=%d residual=%.3e -> %s\n", config.d, cand.residual,
                    out_path.c_str());
        return 0;
    }
    std::printf("not converged after %d restarts: d=%d best residual=%.3e -> %s\n",
                config.restarts, config.d, cand.residual, out_path.c_str());
    return 1;
}

int cmd_sic_verify(const std::string& path, std::optional<double> tol,
                   const std::string& command, const std::string& out_path) {
    Timer timer;
    const auto cand = rf::io::sic_from_family(rf::io::read_family(path));
    const CheckReport report =
        rf::sic::verify_sic(cand, tol.value_or(rf::frame::kSearchTol));
    return emit_report(report, command, timer.seconds(), out_path);
}

int cmd_sic_coeffs(const std::string& path, std::optional<double> tol,
                   const std::string& command, const std::string& report_path,
                   const std::string& family_out) {
    Timer timer;
    auto family = rf::io::read_family(path);
    const auto cand = rf::io::sic_from_family(family);
    if (!family_out.empty()) {
        rf::io::attach_coefficients(family, rf::sic::sic_coefficients(cand));
        rf::io::write_family(family, family_out);
    }
    const CheckReport report =
        rf::sic::coefficient_battery(cand, tol.value_or(rf::frame::kSearchTol));
    return emit_report(report, command, timer.seconds(), report_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Wigner symbols, unit-tensor identities, and "
                 "SIC-POVM/MUB frame batteries"};
    app.require_subcommand(1);
    const std::string command = join_args(argc, argv);

    // wigner {3jm,6j}
    auto* wigner = app.add_subcommand("wigner", "Exact 3-jm and 6-j symbols");
    wigner->require_subcommand(1);
    std::array<std::string, 6> wargs;
    auto* w3 = wigner->add_subcommand("3jm", "3-jm symbol (j1 j2 j3; m1 m2 m3)");
    w3->add_option("--j1", wargs[0])->required();
    w3->add_option("--j2", wargs[1])->required();
    w3->add_option("--j3", wargs[2])->required();
    w3->add_option("--m1", wargs[3])->required();
    w3->add_option("--m2", wargs[4])->required();
    w3->add_option("--m3", wargs[5])->required();
    auto* w6 = wigner->add_subcommand("6j", "6-j symbol {j1 j2 j3; j4 j5 j6}");
    w6->add_option("--j1", wargs[0])->required();
    w6->add_option("--j2", wargs[1])->required();
    w6->add_option("--j3", wargs[2])->required();
    w6->add_option("--j4", wargs[3])->required();
    w6->add_option("--j5", wargs[4])->required();
    w6->add_option("--j6", wargs[5])->required();

    // identities
    auto* identities =
        app.add_subcommand("identities", "Exact symbol identity suite plus the "
                                         "numeric unit-tensor batteries");
    int max_two_j = 8;
    int tensor_max_two_j = -1;
    int threads = -1;
    bool inject_failure = false;
    std::string identities_out;
    identities->add_option("--max-two-j", max_two_j, "Largest twice-j for the exact suite")
        ->check(CLI::NonNegativeNumber);
    identities->add_option("--tensor-max-two-j", tensor_max_two_j,
                           "Largest twice-j for the tensor batteries "
                           "(default min(max-two-j, 8))");
    identities->add_option("--threads", threads,
                           "Worker threads for the exact suite (0 = auto; default "
                           "from RACAH_FRAMES_THREADS)");
    identities->add_flag("--inject-failure", inject_failure,
                         "Test hook: append a deliberately failing entry");
    identities->add_option("--out", identities_out, "Write the report here instead of stdout");

    // tensor dump
    auto* tensor = app.add_subcommand("tensor", "Unit-tensor matrices");
    tensor->require_subcommand(1);
    auto* dump = tensor->add_subcommand("dump", "Emit unit tensors as JSON");
    std::string dump_j;
    int dump_k = 0, dump_q = 0;
    std::string dump_out;
    dump->add_option("-j,--j", dump_j, "Angular momentum, e.g. 2 or 3/2")->required();
    auto* kopt = dump->add_option("-k", dump_k, "Restrict to one tensor order");
    dump->add_option("-q", dump_q, "Restrict to one component (needs -k)")->needs(kopt);
    dump->add_option("--out", dump_out, "Write JSON here instead of stdout");

    // mub {build,verify,coeffs}
    auto* mub = app.add_subcommand("mub", "Mutually unbiased bases");
    mub->require_subcommand(1);
    auto* mb = mub->add_subcommand("build", "Build the d+1 bases for prime d");
    int mub_d = 2;
    std::string mub_out;
    mb->add_option("-d,--dimension", mub_d, "Prime dimension")->required();
    mb->add_option("--out", mub_out, "Output family file")->required();
    auto* mv = mub->add_subcommand("verify", "Orthonormality, unbiasedness, identity "
                                             "decomposition, closed-form agreement");
    std::string mub_file, mub_report_out;
    std::optional<double> mub_tol;
    mv->add_option("file", mub_file, "Family file")->required();
    mv->add_option("--tol", mub_tol, "Override the check tolerance");
    mv->add_option("--out", mub_report_out, "Write the report here instead of stdout");
    auto* mc = mub->add_subcommand("coeffs", "Expansion-coefficient battery");
    std::string mc_file, mc_report_out, mc_family_out;
    std::optional<double> mc_tol;
    mc->add_option("file", mc_file, "Family file")->required();
    mc->add_option("--tol", mc_tol, "Override the battery tolerance");
    mc->add_option("--out", mc_report_out, "Write the report here instead of stdout");
    mc->add_option("--family-out", mc_family_out,
                   "Also write the family with coefficients attached");

    // sic {search,verify,coeffs}
    auto* sic = app.add_subcommand("sic", "Symmetric informationally complete POVMs");
    sic->require_subcommand(1);
    auto* ss = sic->add_subcommand("search", "Search for an equiangular family");
    rf::sic::SearchConfig config;
    std::string sic_out;
    bool flag_covariant = false, flag_free = false;
    ss->add_option("-d,--dimension", config.d, "Hilbert-space dimension")->required();
    ss->add_option("--restarts", config.restarts, "Random restarts");
    ss->add_option("--max-iterations", config.max_iterations,
                   "Iteration budget per restart");
    ss->add_option("--tol", config.tolerance, "Convergence tolerance on the residual");
    ss->add_option("--seed", config.seed, "Deterministic base seed");
    auto* cov = ss->add_flag("--covariant", flag_covariant,
                             "Optimize a fiducial and take its displacement orbit "
                             "(default)");
    ss->add_flag("--free", flag_free, "Optimize all d^2 states independently")
        ->excludes(cov);
    ss->add_option("--out", sic_out, "Output family file")->required();
    auto* sv = sic->add_subcommand("verify", "Unit norms, equiangular overlaps, "
                                             "identity decomposition, completeness");
    std::string sic_file, sic_report_out;
    std::optional<double> sic_tol;
    sv->add_option("file", sic_file, "Family file")->required();
    sv->add_option("--tol", sic_tol, "Override the check tolerance");
    sv->add_option("--out", sic_report_out, "Write the report here instead of stdout");
    auto* sc = sic->add_subcommand("coeffs", "Expansion-coefficient battery");
    std::string sc_file, sc_report_out, sc_family_out;
    std::optional<double> sc_tol;
    sc->add_option("file", sc_file, "Family file")->required();
    sc->add_option("--tol", sc_tol, "Override the battery tolerance");
    sc->add_option("--out", sc_report_out, "Write the report here instead of stdout");
    sc->add_option("--family-out", sc_family_out,
                   "Also write the family with coefficients attached");

    // frame check
    auto* frame = app.add_subcommand("frame", "Kind-dispatched family checks");
    frame->require_subcommand(1);
    auto* fc = frame->add_subcommand(
        "check", "Battery for sic/mub kinds; first component, conjugation, and "
                 "completeness for generic families");
    std::string frame_file, frame_report_out;
    std::optional<double> frame_tol;
    fc->add_option("file", frame_file, "Family file")->required();
    fc->add_option("--tol", frame_tol, "Override the check tolerance");
    fc->add_option("--out", frame_report_out, "Write the report here instead of stdout");

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

    try {
        if (w3->parsed()) return cmd_wigner_3jm(wargs);
        if (w6->parsed()) return cmd_wigner_6j(wargs);
        if (identities->parsed()) {
            if (tensor_max_two_j < 0) tensor_max_two_j = std::min(max_two_j, 8);
            return cmd_identities(max_two_j, tensor_max_two_j, threads, inject_failure,
                                  command, identities_out);
        }
        if (dump->parsed())
            return cmd_tensor_dump(dump_j,
                                   kopt->count() ? std::optional<int>(dump_k)
                                                 : std::nullopt,
                                   dump->count("-q") ? std::optional<int>(dump_q)
                                                     : std::nullopt,
                                   dump_out);
        if (mb->parsed()) return cmd_mub_build(mub_d, mub_out);
        if (mv->parsed()) return cmd_mub_verify(mub_file, mub_tol, command, mub_report_out);
        if (mc->parsed())
            return cmd_mub_coeffs(mc_file, mc_tol, command, mc_report_out, mc_family_out);
        if (ss->parsed()) {
            config.covariant = !flag_free;
            return cmd_sic_search(config, sic_out);
        }
        if (sv->parsed()) return cmd_sic_verify(sic_file, sic_tol, command, sic_report_out);
        if (sc->parsed())
            return cmd_sic_coeffs(sc_file, sc_tol, command, sc_report_out, sc_family_out);
        if (fc->parsed())
            return cmd_frame_check(frame_file, frame_tol, command, frame_report_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
}
