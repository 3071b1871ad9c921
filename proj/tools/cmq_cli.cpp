// Command-line driver: every sweep and study in the library as a
// subcommand, with JSON config files, CSV/JSON reports and atomic output.
//
// Exit codes: 0 success, 2 validation/usage error, 3 numerical-assertion
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmq/cli_support.hpp"
#include "cmq/cylinder.hpp"
#include "cmq/dynamics.hpp"
#include "cmq/expr.hpp"
#include "cmq/fermigas.hpp"
#include "cmq/su2.hpp"
#include "cmq/su2_checks.hpp"
#include "cmq/su2_domains.hpp"

namespace {

using namespace cmq;

struct NumericalAssertion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputOpts {
    std::string path;
    std::string format = "csv";
    bool overwrite = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", path, "output file for the report");
        cmd->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--overwrite", overwrite, "replace an existing output file");
    }

    void emit(const ConvergenceReport& rep) const {
        if (path.empty()) return;
        atomic_write_file(path, format == "json" ? report_to_json(rep) : to_csv(rep), overwrite);
    }
};

void print_summary(const std::string& study, const ConvergenceReport& rep) {
    std::printf("%s rows=%zu final_residual=%.17g\n", study.c_str(), rep.rows.size(),
                rep.final_residual());
}

// --config FILE: JSON object mirroring the long flags of the subcommand;
// command-line flags override file values, unknown keys are rejected by the
// regular flag parser.
std::vector<std::string> splice_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ArgumentError("--config needs a file argument");
            std::ifstream in(args[i + 1]);
            if (!in) throw ArgumentError("cannot read config file " + args[i + 1]);
            std::stringstream ss;
            ss << in.rdbuf();
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(ss.str());
            } catch (const nlohmann::json::parse_error& e) {
                throw ArgumentError(std::string("config JSON: ") + e.what());
            }
            if (!j.is_object()) throw ArgumentError("config JSON must be an object");
            for (const auto& [key, value] : j.items()) {
                from_file.push_back("--" + key);
                if (value.is_boolean()) {
                    if (!value.get<bool>()) from_file.pop_back();
                } else if (value.is_string()) {
                    from_file.push_back(value.get<std::string>());
                } else {
                    from_file.push_back(value.dump());
                }
            }
            ++i;  // skip the filename
        } else {
            out.push_back(args[i]);
        }
    }
    // file values first so explicit flags win on single-value options
    out.insert(out.begin(), from_file.begin(), from_file.end());
    return out;
}

std::vector<std::size_t> size_list(const std::string& s) { return parse_size_list(s); }
std::vector<double> real_list(const std::string& s) { return parse_real_list(s); }

SemialgebraicDomain load_domain(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ArgumentError("cannot read domain file " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_domain_json(ss.str());
}

// ----------------------------------------------------------------------
// subcommand runners

int run_cylinder_separability(const std::string& obs, const std::string& nlist, double length,
                              double momentum, const OutputOpts& out) {
    const auto rep = check_separability(parse_cylinder_observable(obs), size_list(nlist),
                                        length, momentum);
    out.emit(rep);
    print_summary("cylinder-separability", rep);
    if (!residuals_nonincreasing(rep))
        throw NumericalAssertion("separability residuals are not nonincreasing (10% slack)");
    return 0;
}

int run_cylinder_vonneumann(const std::string& a, const std::string& b, const std::string& nlist,
                            double length, double momentum, const OutputOpts& out) {
    const auto rep = check_von_neumann(parse_cylinder_observable(a), parse_cylinder_observable(b),
                                       size_list(nlist), length, momentum);
    out.emit(rep);
    print_summary("cylinder-vonneumann", rep);
    return 0;
}

int run_cylinder_dirac(const std::string& a, const std::string& b, std::size_t margin,
                       const std::string& nlist, double length, double momentum,
                       const OutputOpts& out) {
    const auto rep = check_dirac(parse_cylinder_observable(a), parse_cylinder_observable(b),
                                 margin, size_list(nlist), length, momentum);
    out.emit(rep);
    print_summary("cylinder-dirac", rep);
    return 0;
}

int run_cylinder_prop2(const std::string& a, const std::string& b, double u, double v,
                       double momentum, const std::string& nlist, const std::string& seq,
                       double q, const OutputOpts& out) {
    CoefficientSequence coeffs;
    if (seq == "invsq") {
        coeffs.kind = CoefficientSequence::Kind::inverse_square;
    } else if (seq == "geometric") {
        coeffs.kind = CoefficientSequence::Kind::geometric;
        coeffs.q = q;
    } else {
        throw ArgumentError("--coeffs must be invsq or geometric");
    }
    const auto rep = check_prop2(parse_cylinder_observable(a), parse_cylinder_observable(b),
                                 coeffs, u, v, momentum, size_list(nlist));
    out.emit(rep);
    print_summary("cylinder-prop2", rep);
    return 0;
}

int run_two_state(double h0, double hn_re, double hn_im, double hbar, int harmonic,
                  double tmax, std::size_t points, const OutputOpts& out) {
    const TwoStateModel model{h0, cxd(hn_re, hn_im), hbar, harmonic};
    if (model.omega() <= 0.0) throw ArgumentError("two-state model needs |H_n| > 0");
    if (tmax <= 0.0) tmax = 2.0 * kTwoPi / model.omega();
    std::vector<double> times(points), probs(points);
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = tmax * double(i) / double(points - 1);
        times[i] = t;
        probs[i] = two_state_probability(model, t);
        ComplexMatrix arg = model.hamiltonian();
        arg *= cxd(0.0, -t / hbar);
        worst = std::max(worst, std::abs(std::norm(expm(arg)(1, 0)) - probs[i]));
    }
    if (!out.path.empty()) atomic_write_file(out.path, trace_to_csv(times, probs), out.overwrite);
    std::printf("supertunnel-two-state points=%zu max_expm_deviation=%.3e\n", points, worst);
    if (worst > 1e-8)
        throw NumericalAssertion("two-state closed form deviates from expm beyond 1e-8");
    return 0;
}

int run_line(int harmonic, double omega, double tmax, std::size_t points,
             const OutputOpts& out) {
    if (tmax <= 0.0) throw ArgumentError("--tmax must be positive");
    std::vector<double> times(points), probs(points);
    for (std::size_t i = 0; i < points; ++i) {
        times[i] = tmax * double(i) / double(points - 1);
        probs[i] = line_transition_probability(harmonic, times[i], omega);
    }
    if (!out.path.empty()) atomic_write_file(out.path, trace_to_csv(times, probs), out.overwrite);
    std::printf("supertunnel-line points=%zu final_probability=%.17g\n", points, probs.back());
    return 0;
}

int run_decompactify(double gap, const std::string& mlist, double hbar, double energy, double q,
                     std::size_t tpoints, const OutputOpts& out) {
    ChainHamiltonianSpec spec =
        q > 0.0 ? ChainHamiltonianSpec{energy, {}, 1.0} : ChainHamiltonianSpec::cosine(energy, 1.0);
    if (q > 0.0) {
        spec.coefficients[0] = energy;
        for (int k = 1; k <= 64; ++k) {
            spec.coefficients[k] = energy * std::pow(q, k);
            spec.coefficients[-k] = energy * std::pow(q, k);
        }
    }
    const double omega1 = std::abs(spec.coefficient(1)) / hbar;
    const auto rep = decompactification_study(gap, spec, hbar, real_list(mlist),
                                              default_time_grid(omega1, tpoints));
    out.emit(rep);
    print_summary("supertunnel-decompactify", rep);
    return 0;
}

FermiGasParams fermi_params(std::size_t states, std::size_t fermions, double length,
                            double momentum, double hbar, double mass) {
    FermiGasParams p;
    p.states = states;
    p.fermions = fermions;
    p.momentum = momentum;
    p.hbar = hbar;
    p.mass = mass;
    p.length = length > 0.0 ? length : double(states) * kTwoPi * hbar / momentum;
    p.validate();
    return p;
}

int run_fermi(std::size_t states, std::size_t fermions, double length, double momentum,
              double hbar, double mass, const OutputOpts& out) {
    auto p = fermi_params(states, fermions, length, momentum, hbar, mass);
    const double u = total_energy(p);
    std::printf("fermi N=%zu Ncal=%zu E=%.17g U=%.17g n_max=%.17g\n", p.states, p.fermions,
                p.energy_scale(), u, max_density(p));
    if (!out.path.empty()) {
        // (Ncal, U, P_semiclassical, P_exact) table over fillings
        std::string csv = "fermions,U,P_semiclassical,P_exact\n";
        const double step = kTwoPi * p.hbar / p.momentum;
        for (std::size_t f = 1; f <= p.fermions; ++f) {
            FermiGasParams row = p;
            row.fermions = f;
            FermiGasParams stencil = row;
            stencil.length = row.length + 0.6 * step;  // centers the stencil across one step
            const auto px = pressure_exact(stencil, 0.5 * step);
            csv += detail::format_double(double(f));
            csv += ',';
            csv += detail::format_double(total_energy(row));
            csv += ',';
            csv += detail::format_double(pressure_semiclassical(row));
            csv += ',';
            csv += detail::format_double(px.value);
            csv += '\n';
        }
        atomic_write_file(out.path, csv, out.overwrite);
    }
    return 0;
}

int run_fermi_pressure(std::size_t states, std::size_t fermions, double length, double momentum,
                       double hbar, double mass, double dl, const OutputOpts& out) {
    auto p = fermi_params(states, fermions, length, momentum, hbar, mass);
    const double step = kTwoPi * p.hbar / p.momentum;
    if (dl <= 0.0) {
        dl = 0.5 * step;
        p.length += 1.2 * dl;  // place the stencil across exactly one step
    }
    const auto px = pressure_exact(p, dl);
    const double ps = pressure_semiclassical(p);
    std::printf("fermi-pressure P_exact=%.17g P_semiclassical=%.17g N_minus=%zu N_plus=%zu%s\n",
                px.value, ps, px.states_minus, px.states_plus,
                px.step_warning ? " step_warning" : "");
    ConvergenceReport rep;
    rep.metadata["study"] = "fermi-pressure";
    rep.metadata["step_warning"] = px.step_warning ? "true" : "false";
    rep.add(double(fermions), px.value, ps);
    out.emit(rep);
    return 0;
}

SemialgebraicDomain domain_from_flags(const std::string& file, double ball_r, double cap_r,
                                      double cap_h, long long s2, long long m2) {
    if (!file.empty()) return load_domain(file);
    if (s2 >= 0 && m2 > -(1LL << 40)) return SemialgebraicDomain::cap_exact(s2, m2);
    if (s2 >= 0) return SemialgebraicDomain::basic({DiagonalPoly::exact_ball(s2)});
    if (cap_r > 0.0) return SemialgebraicDomain::cap(cap_r, cap_h);
    if (ball_r > 0.0) return SemialgebraicDomain::ball(ball_r);
    throw ArgumentError("specify a domain: --domain FILE, --ball R, --cap-R/--cap-h or --s2/--m2");
}

int run_su2_domain_dim(const SemialgebraicDomain& dom, double hbar, const OutputOpts& out) {
    const double radius = dom.bounding_radius(hbar);
    const int two_j_max = static_cast<int>(std::ceil(2.0 * radius / hbar)) + 2;
    TruncatedRegularRep rep_space(two_j_max);
    const auto e = domain_eigenspace(dom, rep_space, hbar);
    std::printf("su2-domain-dim hbar=%.17g dim=%lld\n", hbar, e.dimension());
    ConvergenceReport rep;
    rep.metadata["study"] = "su2-domain-dim";
    rep.add(hbar, double(e.dimension()), double(e.dimension()));
    out.emit(rep);
    return 0;
}

int run_su2_cap_count(long long s2, long long m2) {
    std::printf("%lld\n", cap_state_count(s2, m2));
    return 0;
}

int run_su2_thickness(double radius, double height, double t, const std::string& hbars,
                      const OutputOpts& out) {
    auto rep = thickness_ratio(SemialgebraicDomain::cap(radius, height), t, real_list(hbars),
                               radius);
    rep.metadata["R"] = detail::format_double(radius);
    rep.metadata["h"] = detail::format_double(height);
    out.emit(rep);
    print_summary("su2-thickness", rep);
    return 0;
}

int run_su2_weyl(const std::string& llist, const OutputOpts& out) {
    ConvergenceReport rep;
    rep.metadata["study"] = "su2-weyl";
    for (double l : real_list(llist)) {
        if (l <= 0.0) throw ArgumentError("su2-weyl: l must be positive");
        rep.add(l, double(weyl_dimension(l)) / (l * l * l), 8.0 / 3.0);
    }
    out.emit(rep);
    print_summary("su2-weyl", rep);
    return 0;
}

int run_su2_vn_dirac(const std::string& a, const std::string& b, const SemialgebraicDomain& dom,
                     double t, const std::string& hbars, const OutputOpts& out) {
    const auto rep = check_vn_dirac_su2(DomainPolynomial::general(parse_tripoly(a)),
                                        DomainPolynomial::general(parse_tripoly(b)), dom, t,
                                        real_list(hbars));
    out.emit(rep);
    print_summary("su2-vn-dirac", rep);
    return 0;
}

int run_su2_separability_ball(int a2, int b2, const std::string& llist, const OutputOpts& out) {
    const auto rep = check_separability_ball(a2, b2, real_list(llist));
    out.emit(rep);
    print_summary("su2-separability-ball", rep);
    return 0;
}

int run_su2_positivity(const std::string& f, const SemialgebraicDomain& dom,
                       const std::string& hbars, const OutputOpts& out) {
    const auto rep = positivity_check(dom, DomainPolynomial::general(parse_tripoly(f)),
                                      real_list(hbars));
    out.emit(rep);
    print_summary("su2-positivity", rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantization studies on bounded phase spaces with compact momentum"};
    app.require_subcommand(0, 1);
    app.set_help_all_flag("--help-all", "print help for every subcommand");
    // config-file values are injected before explicit flags; take-last makes
    // the command line win
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    bool list_only = false;
    app.add_flag("--list", list_only, "list subcommand names and exit");

    // ---- cylinder ----
    std::string obs_a = "x", nlist = "4,..,64";
    double length = 1.0, momentum = kTwoPi;
    std::size_t dirac_margin = 1;
    double iv_u = 1.0, iv_v = 2.0, seq_q = 0.5;
    std::string seq_kind = "invsq";
    OutputOpts out_sep, out_vn, out_dirac, out_prop2;

    auto* sep = app.add_subcommand("cylinder-separability",
                                   "norm convergence ||Q(a)||_N -> ||a||");
    sep->add_option("--observable", obs_a, "observable over x, z, zbar")->required();
    sep->add_option("--N", nlist, "dimension sweep (supports 4,..,1024)")->required();
    sep->add_option("--L", length, "position extent");
    sep->add_option("--M", momentum, "momentum circumference");
    out_sep.attach(sep);

    auto* vn = app.add_subcommand("cylinder-vonneumann",
                                  "product defect ||Q(a)Q(b) - Q(ab)||_N");
    std::string vn_a = "x*z", vn_b = "x", vn_n = "4,..,64";
    double vn_l = 1.0, vn_m = kTwoPi;
    vn->add_option("--a", vn_a)->required();
    vn->add_option("--b", vn_b)->required();
    vn->add_option("--N", vn_n)->required();
    vn->add_option("--L", vn_l);
    vn->add_option("--M", vn_m);
    out_vn.attach(vn);

    auto* dirac = app.add_subcommand("cylinder-dirac",
                                     "commutator vs bracket on bulk states");
    std::string di_a = "x*z", di_b = "x", di_n = "8,..,64";
    double di_l = 1.0, di_m = kTwoPi;
    dirac->add_option("--a", di_a)->required();
    dirac->add_option("--b", di_b)->required();
    dirac->add_option("--l", dirac_margin, "bulk margin (Laurent bound)")->required();
    dirac->add_option("--N", di_n)->required();
    dirac->add_option("--L", di_l);
    dirac->add_option("--M", di_m);
    out_dirac.attach(dirac);

    auto* prop2 = app.add_subcommand("cylinder-prop2",
                                     "interval limits with a fixed decaying state");
    std::string p2_a = "z", p2_b = "zbar", p2_n = "8,..,64";
    double p2_m = kTwoPi;
    prop2->add_option("--a", p2_a)->required();
    prop2->add_option("--b", p2_b)->required();
    prop2->add_option("--u", iv_u, "left endpoint (nonzero)");
    prop2->add_option("--v", iv_v, "right endpoint (nonzero)");
    prop2->add_option("--M", p2_m);
    prop2->add_option("--N", p2_n)->required();
    prop2->add_option("--coeffs", seq_kind, "invsq or geometric");
    prop2->add_option("--q", seq_q, "ratio for geometric coefficients");
    out_prop2.attach(prop2);

    // ---- supertunneling ----
    double ts_h0 = 0.0, ts_re = 0.5, ts_im = 0.0, ts_hbar = 1.0, ts_tmax = 0.0;
    int ts_n = 1;
    std::size_t ts_points = 256;
    OutputOpts out_ts;
    auto* two = app.add_subcommand("supertunnel-two-state",
                                   "gap-jumping probability sin^2(omega_n t)");
    two->add_option("--H0", ts_h0);
    two->add_option("--Hn-re", ts_re);
    two->add_option("--Hn-im", ts_im);
    two->add_option("--hbar", ts_hbar);
    two->add_option("--n", ts_n, "harmonic bridging the gap");
    two->add_option("--tmax", ts_tmax, "trace end time (default two periods)");
    two->add_option("--points", ts_points);
    out_ts.attach(two);

    int ln_n = 3;
    double ln_omega = 1.0, ln_tmax = 20.0;
    std::size_t ln_points = 256;
    OutputOpts out_ln;
    auto* line = app.add_subcommand("supertunnel-line",
                                    "full-line probability J_n(t omega)^2");
    line->add_option("--n", ln_n)->required();
    line->add_option("--omega", ln_omega);
    line->add_option("--tmax", ln_tmax);
    line->add_option("--points", ln_points);
    out_ln.attach(line);

    double dc_gap = 1.0, dc_hbar = 1.0, dc_e = 1.0, dc_q = 0.0;
    std::string dc_m = "6.28,..,50.3";
    std::size_t dc_tpoints = 256;
    OutputOpts out_dc;
    auto* dc = app.add_subcommand("supertunnel-decompactify",
                                  "peak transition probability as M grows");
    dc->add_option("--gap", dc_gap, "forbidden-segment length |I|")->required();
    dc->add_option("--M", dc_m, "momentum circumference sweep")->required();
    dc->add_option("--hbar", dc_hbar);
    dc->add_option("--E", dc_e, "energy scale");
    dc->add_option("--q", dc_q, "geometric coefficient ratio (0 = cosine spec)");
    dc->add_option("--tpoints", dc_tpoints);
    out_dc.attach(dc);

    // ---- fermi gas ----
    std::size_t fg_n = 100, fg_f = 100;
    double fg_l = 0.0, fg_m = kTwoPi, fg_hbar = 1.0, fg_mass = 1.0, fg_dl = 0.0;
    OutputOpts out_fg, out_fp;
    auto* fermi = app.add_subcommand("fermi", "degenerate Fermi gas energies");
    fermi->add_option("--N", fg_n, "single-particle states")->required();
    fermi->add_option("--fermions", fg_f)->required();
    fermi->add_option("--L", fg_l, "interval length (default fits N states exactly)");
    fermi->add_option("--M", fg_m);
    fermi->add_option("--hbar", fg_hbar);
    fermi->add_option("--mass", fg_mass);
    out_fg.attach(fermi);

    auto* fp = app.add_subcommand("fermi-pressure",
                                  "degeneracy pressure, exact vs semiclassical");
    fp->add_option("--N", fg_n)->required();
    fp->add_option("--fermions", fg_f)->required();
    fp->add_option("--L", fg_l);
    fp->add_option("--M", fg_m);
    fp->add_option("--hbar", fg_hbar);
    fp->add_option("--mass", fg_mass);
    fp->add_option("--dL", fg_dl, "stencil half-width (default half a step, auto-centered)");
    out_fp.attach(fp);

    // ---- su2 ----
    std::string dom_file;
    double dom_ball = 0.0, dom_cap_r = 0.0, dom_cap_h = 0.0;
    long long dom_s2 = -1, dom_m2 = -(1LL << 40);
    double su2_hbar = 0.1, su2_t = 1.0;
    std::string su2_hbars = "0.2,..,0.025", su2_l = "5,..,40";
    std::string su2_a = "x1", su2_b = "x2", su2_f = "1.1 - x1^2";
    int sab_a2 = 1, sab_b2 = -1;
    long long cap_s2 = 0, cap_m2 = 0;
    OutputOpts out_dim, out_thick, out_weyl, out_vnd, out_sab, out_pos;

    auto add_domain_flags = [&](CLI::App* cmd) {
        cmd->add_option("--domain", dom_file, "domain JSON file");
        cmd->add_option("--ball", dom_ball, "ball radius");
        cmd->add_option("--cap-R", dom_cap_r, "cap ball radius");
        cmd->add_option("--cap-h", dom_cap_h, "cap plane height");
        cmd->add_option("--s2", dom_s2, "exact-units ball 2s");
        cmd->add_option("--m2", dom_m2, "exact-units plane 2m");
    };

    auto* dim = app.add_subcommand("su2-domain-dim", "eigenspace dimension of a domain");
    add_domain_flags(dim);
    dim->add_option("--hbar", su2_hbar);
    out_dim.attach(dim);

    auto* capc = app.add_subcommand("su2-cap-count", "closed-form cap weight count");
    capc->add_option("--s2", cap_s2, "doubled Casimir index 2s")->required();
    capc->add_option("--m2", cap_m2, "doubled plane index 2m")->required();

    double th_r = 1.0, th_h = 0.0, th_t = 2.0;
    std::string th_hbars = "0.12,..,0.00375";
    auto* thick = app.add_subcommand("su2-thickness", "bulk/total dimension ratio of a cap");
    thick->set_help_flag("--help", "print help");  // frees the short -h for the cap height
    thick->add_option("--R", th_r);
    thick->add_option("--h", th_h);
    thick->add_option("--t", th_t, "filtration degree");
    thick->add_option("--hbars", th_hbars)->required();
    out_thick.attach(thick);

    std::string weyl_l = "10,..,100";
    auto* weyl = app.add_subcommand("su2-weyl", "filtration dimension growth dim/l^3");
    weyl->add_option("--l", weyl_l)->required();
    out_weyl.attach(weyl);

    auto* vnd = app.add_subcommand("su2-vn-dirac",
                                   "von Neumann and Dirac residuals on a domain");
    vnd->add_option("--a", su2_a, "observable over x1, x2, x3, C")->required();
    vnd->add_option("--b", su2_b)->required();
    add_domain_flags(vnd);
    vnd->add_option("--t", su2_t, "filtration degree (bulk = 2t shrink)");
    vnd->add_option("--hbars", su2_hbars)->required();
    out_vnd.attach(vnd);

    auto* sab = app.add_subcommand("su2-separability-ball",
                                   "||Q^D(pi_ab)||_N^2 -> 1/2 on the ball");
    sab->add_option("--a2", sab_a2)->check(CLI::IsMember({-1, 1}));
    sab->add_option("--b2", sab_b2)->check(CLI::IsMember({-1, 1}));
    sab->add_option("--l", su2_l, "Casimir cutoff sweep")->required();
    out_sab.attach(sab);

    auto* pos = app.add_subcommand("su2-positivity",
                                   "minimum eigenvalue of a positive observable");
    pos->add_option("--f", su2_f, "observable over x1, x2, x3, C")->required();
    add_domain_flags(pos);
    pos->add_option("--hbars", su2_hbars)->required();
    out_pos.attach(pos);

    // config splicing + parse
    std::vector<std::string> raw(argv + 1, argv + argc);
    try {
        if (!raw.empty() && raw[0][0] != '-') {
            std::vector<std::string> tail(raw.begin() + 1, raw.end());
            tail = splice_config(tail);
            raw.assign(1, raw[0]);
            raw.insert(raw.end(), tail.begin(), tail.end());
        }
        std::vector<std::string> rev(raw.rbegin(), raw.rend());
        app.parse(rev);  // CLI11 consumes reversed argument vectors
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (list_only) {
            for (const auto& name : subcommand_names()) std::puts(name.c_str());
            return 0;
        }
        if (sep->parsed())
            return run_cylinder_separability(obs_a, nlist, length, momentum, out_sep);
        if (vn->parsed()) return run_cylinder_vonneumann(vn_a, vn_b, vn_n, vn_l, vn_m, out_vn);
        if (dirac->parsed())
            return run_cylinder_dirac(di_a, di_b, dirac_margin, di_n, di_l, di_m, out_dirac);
        if (prop2->parsed())
            return run_cylinder_prop2(p2_a, p2_b, iv_u, iv_v, p2_m, p2_n, seq_kind, seq_q,
                                      out_prop2);
        if (two->parsed())
            return run_two_state(ts_h0, ts_re, ts_im, ts_hbar, ts_n, ts_tmax, ts_points, out_ts);
        if (line->parsed()) return run_line(ln_n, ln_omega, ln_tmax, ln_points, out_ln);
        if (dc->parsed())
            return run_decompactify(dc_gap, dc_m, dc_hbar, dc_e, dc_q, dc_tpoints, out_dc);
        if (fermi->parsed())
            return run_fermi(fg_n, fg_f, fg_l, fg_m, fg_hbar, fg_mass, out_fg);
        if (fp->parsed())
            return run_fermi_pressure(fg_n, fg_f, fg_l, fg_m, fg_hbar, fg_mass, fg_dl, out_fp);
        if (dim->parsed())
            return run_su2_domain_dim(
                domain_from_flags(dom_file, dom_ball, dom_cap_r, dom_cap_h, dom_s2, dom_m2),
                su2_hbar, out_dim);
        if (capc->parsed()) return run_su2_cap_count(cap_s2, cap_m2);
        if (thick->parsed()) return run_su2_thickness(th_r, th_h, th_t, th_hbars, out_thick);
        if (weyl->parsed()) return run_su2_weyl(weyl_l, out_weyl);
        if (vnd->parsed())
            return run_su2_vn_dirac(
                su2_a, su2_b,
                domain_from_flags(dom_file, dom_ball, dom_cap_r, dom_cap_h, dom_s2, dom_m2),
                su2_t, su2_hbars, out_vnd);
        if (sab->parsed()) return run_su2_separability_ball(sab_a2, sab_b2, su2_l, out_sab);
        if (pos->parsed())
            return run_su2_positivity(
                su2_f,
                domain_from_flags(dom_file, dom_ball, dom_cap_r, dom_cap_h, dom_s2, dom_m2),
                su2_hbars, out_pos);
        std::fprintf(stderr, "error: a subcommand is required (see --help or --list)\n");
        return 2;
    } catch (const NumericalAssertion& e) {
        std::fprintf(stderr, "numerical assertion failed: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
