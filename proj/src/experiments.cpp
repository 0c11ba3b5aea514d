#include "wavemaps/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "wavemaps/control.hpp"
#include "wavemaps/degree.hpp"
#include "wavemaps/harmonic.hpp"
#include "wavemaps/obstruction.hpp"
#include "wavemaps/serialize.hpp"

namespace wavemaps {

namespace fs = std::filesystem;

double RunResult::num(const std::string& key) const {
    for (const auto& [k, v] : metrics)
        if (k == key) return std::stod(v);
    throw std::runtime_error("missing metric: " + key);
}

std::string RunResult::str(const std::string& key) const {
    for (const auto& [k, v] : metrics)
        if (k == key) return v;
    throw std::runtime_error("missing metric: " + key);
}

namespace {

struct Ctx {
    const ExperimentConfig& cfg;
    std::vector<std::string> preamble;
    RunResult result;

    explicit Ctx(const ExperimentConfig& c) : cfg(c), preamble(c.echo()) {
        fs::create_directories(c.out_dir);
    }

    Grid grid() const { return Grid(cfg.n_points); }
    double dt(const Grid& g) const { return cfg.dt_ratio * g.spacing(); }
    ControlRegion damping_region() const {
        return {cfg.damping_start, cfg.damping_start + cfg.damping_length};
    }
    ControlRegion control_region() const {
        return {cfg.control_start, cfg.control_start + cfg.control_length};
    }

    void metric(const std::string& key, double v) { result.metrics.emplace_back(key, fmt_double(v)); }
    void metric(const std::string& key, const std::string& v) { result.metrics.emplace_back(key, v); }

    void save(const std::string& name, const std::string& contents) {
        write_file((fs::path(cfg.out_dir) / name).string(), contents);
    }
    void save_trace(const std::string& name, const EnergyTrace& trace) {
        std::ostringstream os;
        write_trace(os, trace, preamble);
        save(name, os.str());
    }
    void save_state(const std::string& name, const FieldState& st) {
        std::ostringstream os;
        write_state(os, st, preamble);
        save(name, os.str());
    }
    void save_control(const std::string& name, const ControlSignal& sig) {
        std::ostringstream os;
        write_control(os, sig, preamble);
        save(name, os.str());
    }
    void finish() {
        std::ostringstream os;
        std::vector<std::pair<std::string, std::string>> kv = result.metrics;
        kv.emplace_back("status", std::to_string(result.status));
        write_report(os, kv, preamble);
        save("report.txt", os.str());
    }
};

// Equator-arc initial state of prescribed energy: the family loop A(s*, .)
// with 2 pi sin^2 s* = e0.
FieldState arc_state(const Grid& g, double e0) {
    if (!(e0 >= 0.0 && e0 <= two_pi))
        throw ConfigError("e0 must lie in [0, 2pi] for equator-arc data");
    double sv = std::asin(std::sqrt(e0 / two_pi));
    FieldState st(g, 2);
    for (int j = 0; j < g.n(); ++j)
        family_A(sv, g.x(j), std::span<double>(st.phi.data() + static_cast<size_t>(j) * 3, 3));
    return st;
}

// Least-squares log-linear fit of E(t) over [t_lo, t_hi]; returns (rate, r2).
std::pair<double, double> fit_exponential(const EnergyTrace& trace, double t_lo, double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    long m = 0;
    for (size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i], e = trace.energy[i];
        if (t < t_lo || t > t_hi || e <= 0.0) continue;
        double y = std::log(e);
        sx += t; sy += y; sxx += t * t; sxy += t * y; syy += y * y;
        ++m;
    }
    if (m < 3) return {0.0, 0.0};
    double denom = m * sxx - sx * sx;
    double b = (m * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / m;
    double a = (sy - b * sx) / m;
    double ss_res = 0.0;
    for (size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i], e = trace.energy[i];
        if (t < t_lo || t > t_hi || e <= 0.0) continue;
        double r = std::log(e) - (a + b * t);
        ss_res += r * r;
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {-b, r2};
}

void run_damp_decay(Ctx& c) {
    Grid g = c.grid();
    double e0 = c.cfg.e0 > 0.0 ? c.cfg.e0 : std::numbers::pi;
    FieldState st = arc_state(g, e0);
    DampingProfile damp(g, c.damping_region(), c.cfg.damping_amplitude);
    Trajectory traj = evolve(st, c.cfg.T, nullptr, &damp, c.dt(g),
                             std::max(1, static_cast<int>(c.cfg.T / c.dt(g)) / 32));
    double E0 = traj.trace.energy.front();
    double hit = -1.0;
    for (size_t i = 0; i < traj.trace.times.size(); ++i)
        if (traj.trace.energy[i] <= 0.01 * E0) {
            hit = traj.trace.times[i];
            break;
        }
    auto [rate, r2] = fit_exponential(traj.trace, 1.0, hit > 0 ? hit : c.cfg.T);
    c.metric("E0", E0);
    c.metric("E_final", traj.trace.energy.back());
    c.metric("balance_residual", energy_balance_residual(traj, damp));
    c.metric("decay_rate", rate);
    c.metric("fit_r2", r2);
    c.metric("t_hit_1pct", hit);
    c.metric("max_energy_uptick", [&] {
        double worst = 0.0;
        for (size_t i = 1; i < traj.trace.energy.size(); ++i)
            worst = std::max(worst, traj.trace.energy[i] - traj.trace.energy[i - 1]);
        return worst;
    }());
    c.save_trace("trace.csv", traj.trace);
    c.save_state("state_final.txt", traj.final());
    export_trajectory((fs::path(c.cfg.out_dir) / "states").string(), traj, c.preamble);
}

void run_harmonic_detect(Ctx& c) {
    Grid g = c.grid();
    double target_e = c.cfg.e0 > 0.0 ? c.cfg.e0 : two_pi + 0.15;
    FieldState st = FieldState::equator(g, 2);
    double base = energy_unchecked(st);
    if (target_e < base) throw ConfigError("e0 below the equator energy");
    // tangent velocity perturbation carrying the energy excess
    double amp = std::sqrt((target_e - base) / std::numbers::pi);
    for (int j = 0; j < g.n(); ++j) {
        double x = g.x(j);
        double w = amp * std::cos(3.0 * x);
        auto v = st.node_t(j);
        v[0] = -w * std::sin(x);
        v[1] = w * std::cos(x);
    }
    st.validate();
    DampingProfile damp(g, c.damping_region(), c.cfg.damping_amplitude);

    std::ostringstream diag;
    for (const auto& line : c.preamble) diag << "# " << line << "\n";
    diag << "time,energy,delta_star,nearest_N,distance\n";

    std::string outcome = "none";
    double t_outcome = -1.0;
    double t = 0.0;
    const double chunk = 1.0;
    while (t < c.cfg.T - 1e-9) {
        double E = energy_unchecked(st);
        auto [gap, gap_n] = energy_gap(E);
        double dist = std::numeric_limits<double>::infinity();
        int N = -1;
        try {
            HarmonicFit fit = nearest_harmonic(st);
            dist = fit.distance;
            N = fit.map.N;
        } catch (const std::runtime_error&) {
        }
        diag << fmt_double(t) << ',' << fmt_double(E) << ',' << fmt_double(gap) << ',' << N << ','
             << fmt_double(dist) << "\n";
        if (dist <= 0.05 && N == 1 && gap <= 0.05) {
            outcome = "a";
            t_outcome = t;
            break;
        }
        if (E < two_pi - 0.1) {
            outcome = "b";
            t_outcome = t;
            break;
        }
        Trajectory piece = evolve(st, chunk, nullptr, &damp, c.dt(g), 1 << 30);
        st = piece.final();
        t += chunk;
    }
    c.metric("outcome", outcome);
    c.metric("t_outcome", t_outcome);
    c.metric("E0", target_e);
    c.save("diagnostic.csv", diag.str());
    if (outcome == "none") c.result.status = 1;
}

// Perturbations of the equator for the localized-drop experiment, scaled to
// the requested H1 x L2 size.
FieldState perturbed_equator(const Grid& g, const std::string& kind, double size) {
    FieldState st = FieldState::equator(g, 2);
    if (kind == "none" || size == 0.0) return st;
    FieldState ref = st;
    if (kind == "tilt") {
        for (int j = 0; j < g.n(); ++j) st.node(j)[2] += std::sin(g.x(j));
    } else if (kind == "mode2") {
        for (int j = 0; j < g.n(); ++j) st.node(j)[2] += std::cos(2.0 * g.x(j));
    } else if (kind == "velocity") {
        for (int j = 0; j < g.n(); ++j) {
            double x = g.x(j);
            st.node_t(j)[0] = -std::sin(x) * std::cos(2.0 * x);
            st.node_t(j)[1] = std::cos(x) * std::cos(2.0 * x);
        }
    } else {
        throw ConfigError("unknown perturbation kind '" + kind + "'");
    }
    st.project_to_sphere();
    // scale the raw perturbation to the requested size by bisection
    double raw = h1l2_distance(st, ref);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 60 && std::abs(raw - size) > 1e-12; ++iter) {
        double mid = 0.5 * (lo + hi);
        FieldState trial = ref;
        if (kind == "tilt")
            for (int j = 0; j < g.n(); ++j) trial.node(j)[2] += mid * std::sin(g.x(j));
        else if (kind == "mode2")
            for (int j = 0; j < g.n(); ++j) trial.node(j)[2] += mid * std::cos(2.0 * g.x(j));
        else
            for (int j = 0; j < g.n(); ++j) {
                double x = g.x(j);
                trial.node_t(j)[0] = -std::sin(x) * mid * std::cos(2.0 * x);
                trial.node_t(j)[1] = std::cos(x) * mid * std::cos(2.0 * x);
            }
        trial.project_to_sphere();
        raw = h1l2_distance(trial, ref);
        st = trial;
        (raw < size ? lo : hi) = mid;
    }
    return st;
}

void run_energy_drop(Ctx& c) {
    Grid g = c.grid();
    GeodesicMap equator{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, 1};
    ControlSignal f = energy_drop_control(g, equator, c.cfg.epsilon, c.control_region());
    FieldState st = perturbed_equator(g, c.cfg.perturb, c.cfg.perturb_size);
    Trajectory traj = evolve(st, two_pi, &f, nullptr, c.dt(g),
                             std::max(1, f.instants() / 128));
    double E0 = traj.trace.energy.front(), ET = traj.trace.energy.back();
    c.metric("E0", E0);
    c.metric("E_T", ET);
    c.metric("dE", ET - E0);
    c.metric("ratio_eps2", (ET - E0) / (c.cfg.epsilon * c.cfg.epsilon));
    c.metric("below_2pi", ET < two_pi ? 1.0 : 0.0);
    c.save_trace("trace.csv", traj.trace);
    c.save_control("control.txt", f);
}

void run_radial(Ctx& c) {
    Grid g = c.grid();
    RadialSchedule sched(c.cfg.T, c.cfg.theta_f);
    auto [closed, control] = closed_form_radial(sched, g, c.dt(g),
                                                std::max(1, static_cast<int>(c.cfg.T / c.dt(g)) / 128));
    FieldState st = FieldState::equator(g, 2);
    Trajectory sim = evolve(st, c.cfg.T, &control, nullptr, control.dt(),
                            std::max(1, control.instants() / 128));
    const FieldState& ref = closed.final();
    const FieldState& fin = sim.final();
    double linf = 0.0;
    for (size_t p = 0; p < ref.phi.size(); ++p)
        linf = std::max(linf, std::abs(ref.phi[p] - fin.phi[p]));
    double h = g.spacing(), dts = control.dt();
    c.metric("linf_T", linf);
    c.metric("error_bound_unit", linf / (h * h + dts * dts));
    c.metric("E_T_sim", sim.trace.energy.back());
    c.metric("E_T_closed", closed.trace.energy.back());
    c.save_trace("trace.csv", sim.trace);
    c.save_trace("trace_closed.csv", closed.trace);
    c.save_control("control.txt", control);
    c.save_state("state_final.txt", fin);
}

void run_kg_control(Ctx& c) {
    Grid g = c.grid();
    std::vector<double> tv(g.n(), -1.0), tq(g.n(), 0.0);
    HumResult r = hum_steer(g, c.control_region(), two_pi, tv, tq, 1.0, 1e9);
    ScalarRun run = kg_solve(ScalarField(g), &r.control, two_pi, c.dt(g), 1.0, 1 << 30);
    c.metric("residual", r.report.residual);
    c.metric("iterations", static_cast<double>(r.report.iterations));
    c.metric("converged", r.report.converged ? 1.0 : 0.0);
    c.metric("min_curvature", r.report.min_curvature_estimate);
    c.metric("control_norm", r.report.control_norm);
    c.metric("F_0", run.quad_form.front());
    c.metric("F_T", run.quad_form.back());
    c.metric("F_drop", run.quad_form.back() - run.quad_form.front());
    c.save_control("control.txt", r.control);
    if (!r.report.converged) c.result.status = 1;
}

void run_pipeline(Ctx& c) {
    Grid g = c.grid();
    GeodesicMap start{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, c.cfg.degree_N};
    FieldState st = c.cfg.e0 >= 0.0 && c.cfg.e0 < two_pi ? arc_state(g, c.cfg.e0)
                                                         : start.state(g);
    DampingProfile damp(g, c.damping_region(), c.cfg.damping_amplitude);
    PipelineOptions opts;
    opts.eps_schedule = c.cfg.eps_schedule;
    opts.budget = c.cfg.budget;
    opts.max_energy = c.cfg.max_energy;
    opts.dt = c.dt(g);
    opts.control_region = c.control_region();
    auto [traj, report] = global_pipeline(st, damp, opts);
    c.metric("success", report.success ? 1.0 : 0.0);
    c.metric("drop_phases", static_cast<double>(report.drop_phases));
    c.metric("final_energy", report.final_energy);
    c.metric("total_time", report.total_time);
    c.metric("phases", static_cast<double>(report.phases.size()));
    bool monotone = true;
    for (size_t i = 0; i < report.phases.size(); ++i) {
        const auto& ph = report.phases[i];
        std::string kind = ph.kind == PipelinePhase::Kind::damp ? "damp"
                           : ph.kind == PipelinePhase::Kind::drop ? "drop" : "final-damp";
        std::ostringstream row;
        row << kind << ',' << fmt_double(ph.t_start) << ',' << fmt_double(ph.t_end) << ','
            << fmt_double(ph.e_start) << ',' << fmt_double(ph.e_end) << ',' << ph.detected_N << ','
            << fmt_double(ph.eps) << ',' << (ph.retried ? 1 : 0);
        c.metric("phase_" + std::to_string(i), row.str());
        if (i > 0 && ph.e_start > report.phases[i - 1].e_end + 1e-9) monotone = false;
        if (ph.e_end > ph.e_start + defaults::mono_tol * std::max(1.0, ph.e_start) &&
            ph.kind != PipelinePhase::Kind::drop)
            monotone = false;
    }
    c.metric("phase_energies_monotone", monotone ? 1.0 : 0.0);
    c.save_trace("trace.csv", traj.trace);
    c.save_state("state_final.txt", traj.final());
    if (!report.success || !monotone) c.result.status = 1;
}

void run_s1_control(Ctx& c) {
    Grid g = c.grid();
    const int N = c.cfg.degree_N;
    FieldState init(g, 1), fin(g, 1);
    for (int j = 0; j < g.n(); ++j) {
        double x = g.x(j);
        double th0 = N * x;
        double th1 = N * x + c.cfg.s1_amp * std::sin(x);
        init.node(j)[0] = std::cos(th0);
        init.node(j)[1] = std::sin(th0);
        fin.node(j)[0] = std::cos(th1);
        fin.node(j)[1] = std::sin(th1);
    }
    ControlRegion region = c.control_region();
    double T0 = sharp_time(region);
    double T = T0 + c.cfg.s1_dT;
    c.metric("sharp_time", T0);
    c.metric("T", T);
    try {
        S1ControlResult r = s1_polar_control(init, fin, T, region);
        c.metric("residual", r.report.residual);
        c.metric("converged", 1.0);
        c.metric("iterations", static_cast<double>(r.report.iterations));
        c.metric("min_curvature", r.report.min_curvature_estimate);
        c.metric("control_norm", r.report.control_norm);
        bool winding_ok = true;
        for (const auto& s : r.replay.states)
            if (winding_number(s) != N) winding_ok = false;
        c.metric("winding_conserved", winding_ok ? 1.0 : 0.0);
        c.save_control("control.txt", r.h);
        if (!c.cfg.expect_converged || !winding_ok) c.result.status = 1;
    } catch (const NotConvergedError& e) {
        c.metric("residual", e.report.residual);
        c.metric("converged", 0.0);
        c.metric("iterations", static_cast<double>(e.report.iterations));
        c.metric("min_curvature", e.report.min_curvature_estimate);
        c.metric("control_norm", e.report.control_norm);
        if (c.cfg.expect_converged) c.result.status = 1;
    }
}

void run_degree(Ctx& c) {
    DegreeReport rep;
    if (c.cfg.family == "A") {
        HomotopyFamily f = HomotopyFamily::suspension(1);
        rep = family_degree(f, c.cfg.m);
    } else if (c.cfg.family == "A2") {
        rep = family_degree(HomotopyFamily::suspension(2), c.cfg.m);
    } else {
        rep = family_degree(HomotopyFamily::suspension(3), c.cfg.m);
    }
    c.metric("family", c.cfg.family);
    c.metric("m", static_cast<double>(c.cfg.m));
    c.metric("raw_degree", rep.raw);
    c.metric("rounded", static_cast<double>(rep.rounded));
    c.metric("residual", rep.residual);

    // family-A energy curve against the closed form 2 pi sin^2 s
    if (c.cfg.family == "A") {
        Grid ge(c.cfg.n_points);
        HomotopyFamily fam = HomotopyFamily::suspension(1);
        std::ostringstream os;
        for (const auto& line : c.preamble) os << "# " << line << "\n";
        os << "s,energy,closed_form\n";
        double max_err = 0.0, max_e = 0.0;
        const int samples = 64;
        for (int i = 0; i < samples; ++i) {
            double s = two_pi * i / samples;
            auto energies = family_energy_curve(fam, {{s}}, ge);
            double expect = two_pi * std::sin(s) * std::sin(s);
            os << fmt_double(s) << ',' << fmt_double(energies[0]) << ',' << fmt_double(expect)
               << "\n";
            max_err = std::max(max_err, std::abs(energies[0] - expect));
            max_e = std::max(max_e, energies[0]);
        }
        c.save("family_energy.csv", os.str());
        c.metric("family_energy_max_err", max_err);
        c.metric("family_energy_max", max_e);
    }

    // winding sanity on reference loops
    Grid g = c.grid();
    bool winding_ok = true;
    for (int N = 0; N <= 5; ++N) {
        FieldState loop(g, 1);
        for (int j = 0; j < g.n(); ++j) {
            loop.node(j)[0] = std::cos(N * g.x(j));
            loop.node(j)[1] = std::sin(N * g.x(j));
        }
        if (winding_number(loop) != N) winding_ok = false;
    }
    c.metric("winding_ok", winding_ok ? 1.0 : 0.0);
    std::ostringstream table;
    for (const auto& line : c.preamble) table << "# " << line << "\n";
    table << "family,m,raw_degree,rounded,residual\n";
    table << c.cfg.family << ',' << c.cfg.m << ',' << fmt_double(rep.raw) << ',' << rep.rounded
          << ',' << fmt_double(rep.residual) << "\n";
    c.save("degree.csv", table.str());
    if (!winding_ok) c.result.status = 1;
}

void run_nonuniform_decay(Ctx& c) {
    Grid g = c.grid();
    DampingProfile damp(g, c.damping_region(), c.cfg.damping_amplitude);
    std::vector<double> svals = c.cfg.s >= 0.0 ? std::vector<double>{c.cfg.s} : c.cfg.s_values;
    auto rows = nonuniform_decay_experiment(damp, svals, c.cfg.energy_target, c.cfg.t_max,
                                            c.dt(g));
    std::ostringstream os;
    for (const auto& line : c.preamble) os << "# " << line << "\n";
    os << "s,E0,hit_time,censored\n";
    bool monotone = true;
    double prev = -1.0;
    for (const auto& r : rows) {
        os << fmt_double(r.s) << ',' << fmt_double(r.initial_energy) << ','
           << fmt_double(r.hit_time) << ',' << (r.censored ? 1 : 0) << "\n";
        if (!r.censored) {
            if (r.hit_time < prev - 1e-9) monotone = false;
            prev = r.hit_time;
        }
    }
    c.save("decay.csv", os.str());
    c.metric("rows", static_cast<double>(rows.size()));
    c.metric("hit_times_monotone", monotone ? 1.0 : 0.0);
    c.metric("censored_count", static_cast<double>(std::count_if(
                                   rows.begin(), rows.end(), [](const DecayRow& r) { return r.censored; })));
    for (size_t i = 0; i < rows.size(); ++i)
        c.metric("hit_" + std::to_string(i),
                 rows[i].censored ? -1.0 : rows[i].hit_time);
}

void run_small_time(Ctx& c) {
    Grid g = c.grid();
    SmallTimeEnsemble ens = small_time_positive_check(g, c.cfg.half_width, c.cfg.T_pos,
                                                      c.cfg.n_samples, c.cfg.seed, c.dt(g));
    c.metric("min_quad_form", ens.min_quad_form);
    c.metric("max_outside_cone", ens.max_outside_cone);
    c.metric("samples_used", static_cast<double>(ens.samples_used));
    c.metric("samples_discarded", static_cast<double>(ens.samples_discarded));

    SmallTimeNegative neg = small_time_negative_construction(g, c.cfg.half_width_neg, c.cfg.T_neg,
                                                             c.dt(g));
    LinearizedRun sim = linearized_solve(g, neg.f1, c.cfg.T_neg, neg.f1.dt());
    c.metric("neg_quad_form", neg.quad_form_T);
    c.metric("neg_quad_form_simulated", sim.quad_form.back());
    c.metric("raw_integral_3pi2", raw_profile_integral(1.5 * std::numbers::pi));
    c.save_control("control_negative.txt", neg.f1);
    if (!(ens.min_quad_form > 0.0) || !(neg.quad_form_T < 0.0)) c.result.status = 1;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Ctx c(cfg);
    c.metric("experiment", cfg.experiment);
    try {
        if (cfg.experiment == "damp-decay") run_damp_decay(c);
        else if (cfg.experiment == "harmonic-detect") run_harmonic_detect(c);
        else if (cfg.experiment == "energy-drop") run_energy_drop(c);
        else if (cfg.experiment == "radial") run_radial(c);
        else if (cfg.experiment == "kg-control") run_kg_control(c);
        else if (cfg.experiment == "pipeline") run_pipeline(c);
        else if (cfg.experiment == "s1-control") run_s1_control(c);
        else if (cfg.experiment == "degree") run_degree(c);
        else if (cfg.experiment == "nonuniform-decay") run_nonuniform_decay(c);
        else if (cfg.experiment == "small-time") run_small_time(c);
        else throw ConfigError("unknown experiment name '" + cfg.experiment + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        c.metric("error", std::string(e.what()));
        c.result.status = 1;
    }
    c.finish();
    return c.result;
}

int run_sweep(const ExperimentConfig& base, const std::string& param,
              const std::vector<std::string>& values) {
    base.validate();
    if (values.empty()) throw ConfigError("sweep: empty values list");
    {
        ExperimentConfig probe = base;
        probe.set(param, values.front()); // verifies the parameter names a field
    }
    struct Row {
        std::string value;
        int status = 1;
        std::vector<std::pair<std::string, std::string>> metrics;
    };
    std::vector<std::future<Row>> futures;
    for (const auto& v : values) {
        futures.push_back(std::async(std::launch::async, [&, v]() {
            Row row;
            row.value = v;
            try {
                ExperimentConfig cfg = base;
                cfg.set(param, v);
                cfg.out_dir = (fs::path(base.out_dir) / (param + "=" + v)).string();
                RunResult r = run_experiment(cfg);
                row.status = r.status;
                row.metrics = r.metrics;
            } catch (const std::exception& e) {
                row.status = 1;
                row.metrics.emplace_back("error", e.what());
            }
            return row;
        }));
    }
    std::vector<Row> rows;
    for (auto& f : futures) rows.push_back(f.get());

    fs::create_directories(base.out_dir);
    std::ostringstream os;
    for (const auto& line : base.echo()) os << "# " << line << "\n";
    os << "# sweep param=" << param << "\n";
    // union of metric keys in first-seen order
    std::vector<std::string> keys;
    for (const auto& r : rows)
        for (const auto& [k, v] : r.metrics)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    os << param << ",status";
    for (const auto& k : keys) os << ',' << k;
    os << "\n";
    int failures = 0;
    std::ostringstream failure_report;
    for (const auto& r : rows) {
        os << r.value << ',' << r.status;
        for (const auto& k : keys) {
            os << ',';
            for (const auto& [mk, mv] : r.metrics)
                if (mk == k) {
                    os << mv;
                    break;
                }
        }
        os << "\n";
        if (r.status != 0) {
            ++failures;
            failure_report << param << "=" << r.value << " failed\n";
        }
    }
    write_file((fs::path(base.out_dir) / "sweep.csv").string(), os.str());
    if (failures)
        write_file((fs::path(base.out_dir) / "sweep_failures.txt").string(), failure_report.str());
    return failures == 0 ? 0 : 1;
}

} // namespace wavemaps
