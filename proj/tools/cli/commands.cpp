#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "cli/svg.hpp"
#include "sgdphase/asymptotics.hpp"
#include "sgdphase/errors.hpp"
#include "sgdphase/genfunc.hpp"
#include "sgdphase/parallel.hpp"
#include "sgdphase/rng.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdcli {

using namespace sgdphase;

namespace {

nlohmann::json fit_json(const PowerLawFit& f) {
  return {{"Lambda", json_number(f.Lambda)}, {"nu", json_number(f.nu)},
          {"K", json_number(f.K)},           {"kappa", json_number(f.kappa)},
          {"zeta", json_number(f.kappa / f.nu)}, {"tail_start", f.tail_start},
          {"residual", json_number(f.residual)}};
}

PowerLawFit fit_for(const Problem& p, const ExperimentConfig& c) {
  if (p.exact_fit) return *p.exact_fit;
  return fit_power_law(p.spectrum, std::nullopt, c.c0_convention());
}

// Mass beyond the last mode under the power law: initial-loss share and
// trace of H.
nlohmann::json tail_estimate(const PowerLawFit& f, std::size_t modes) {
  const double m = double(modes);
  return {{"initial_loss", json_number(0.5 * f.K * std::pow(m, -f.kappa))},
          {"trace_H", json_number(f.nu > 1.0 ? f.Lambda * std::pow(m, 1.0 - f.nu) / (f.nu - 1.0)
                                             : INFINITY)}};
}

std::optional<PowerLawFit> try_fit(const Problem& p, const ExperimentConfig& c) {
  try {
    return fit_for(p, c);
  } catch (const Error&) {
    return std::nullopt;
  }
}

GenFuncParams genfunc_params(const ExperimentConfig& c) {
  return {c.alpha, c.beta, c.gamma(), c.tau2};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Points t >= 1 of a trajectory, for log axes.
svg::Series series_of(const std::string& name, const LossTrajectory& t, bool dashed = false) {
  svg::Series s{name, {}, {}, dashed};
  for (std::size_t i = 1; i < t.losses.size(); ++i) {
    s.x.push_back(double(i));
    s.y.push_back(t.losses[i]);
  }
  return s;
}

void emit_trajectory(OutputSet& out, const std::string& name, LossTrajectory t,
                     const ExperimentConfig& c, const Problem& p) {
  t.metadata["diverged"] = t.diverged_at.has_value();
  t.metadata["seed"] = c.seed;
  t.metadata["problem"] = c.to_json();
  if (const auto fit = try_fit(p, c)) t.metadata["truncation_tail"] = tail_estimate(*fit, p.spectrum.size());
  out.adopt(name + ".csv");
  out.adopt(name + ".csv.json");
  write_trajectory(t, out.path(name + ".csv"));
}

const FeatureProblem& require_features(const Problem& p, const std::string& what) {
  if (!p.features)
    fail(ErrorKind::config_error, what + " needs an explicit feature problem (--torus or --features)");
  return *p.features;
}

void cmd_simulate(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const SGDParams params = c.sgd_params();
  svg::LineChart chart{"Loss trajectories", "t", "L(t)", {}, {}, {}};
  for (const auto& regime : c.regimes) {
    LossTrajectory t;
    if (regime == "se") {
      t = run_se(p.spectrum, params);
    } else if (regime == "noiseless") {
      t = run_noiseless(p.spectrum, c.alpha, c.beta, c.steps);
    } else if (regime == "full") {
      t = run_full_moments(require_features(p, "regime full"), params);
    } else {
      t = run_mc(require_features(p, "regime mc"), params, c.runs, c.seed, default_threads());
    }
    emit_trajectory(out, regime, t, c, p);
    if (c.plot) chart.series.push_back(series_of(regime, t, regime == "noiseless"));
  }
  // Batch-size sweep under the SE model.
  for (std::size_t b : c.b_list) {
    SGDParams sp = params;
    sp.batch = b;
    sp.gamma = gamma_for_batch(c.effective_dataset_size(), b);
    const auto t = run_se(p.spectrum, sp);
    const std::string name = "se_b" + std::to_string(b);
    emit_trajectory(out, name, t, c, p);
    if (c.plot) chart.series.push_back(series_of(name, t, false));
  }
  if (c.plot) {
    if (p.exact_fit && p.exact_fit->nu > 1.0) {
      const double zeta = p.exact_fit->kappa / p.exact_fit->nu;
      const double y0 = chart.series.front().y.front();
      chart.guides.push_back({"t^-zeta", -zeta, 1.0, y0});
      chart.guides.push_back({"t^(1/nu-2)", 1.0 / p.exact_fit->nu - 2.0, 1.0, y0});
    }
    out.write("loss.svg", svg::render_loglog(chart));
  }
}

void cmd_stability_map(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const auto alphas = c.grid_alpha->values();
  const auto betas = c.grid_beta->values();
  const std::size_t na = alphas.size(), nb = betas.size();
  const double gamma = c.gamma();
  std::vector<double> final_loss(na * nb), u1(na * nb), boundary(nb);
  parallel_for(nb, default_threads(), [&](std::size_t j) {
    GenFuncParams gp{alphas.front(), betas[j], gamma, c.tau2};
    boundary[j] = critical_alpha(p.spectrum, gp);
  });
  parallel_for(na * nb, default_threads(), [&](std::size_t idx) {
    const std::size_t j = idx / na, i = idx % na;
    SGDParams sp = c.sgd_params();
    sp.alpha = alphas[i];
    sp.beta = betas[j];
    const auto t = run_se(p.spectrum, sp);
    final_loss[idx] = t.diverged_at ? INFINITY : t.final_loss();
    u1[idx] = stability_report(p.spectrum, {alphas[i], betas[j], gamma, c.tau2}).U1;
  });
  std::string csv = "alpha,beta,final_loss,predicted_U1,predicted_boundary\n";
  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t i = 0; i < na; ++i) {
      const std::size_t idx = j * na + i;
      csv += format_number(alphas[i]) + "," + format_number(betas[j]) + "," +
             format_number(final_loss[idx]) + "," + format_number(u1[idx]) + "," +
             format_number(boundary[j]) + "\n";
    }
  out.write("stability_map.csv", csv);
  if (c.plot) {
    svg::Heatmap h;
    h.title = "log10 L(T) / L(0)";
    h.x_label = "alpha";
    h.y_label = "beta";
    h.xs = alphas;
    h.ys = betas;
    const double l0 = p.spectrum.initial_loss();
    for (double v : final_loss) h.values.push_back(std::isfinite(v) && v > 0 ? std::log10(v / l0) : INFINITY);
    for (std::size_t j = 0; j < nb; ++j) h.boundary.emplace_back(boundary[j], betas[j]);
    h.boundary_label = "U(1) = 1";
    out.write("stability_map.svg", svg::render_heatmap(h));
  }
}

void cmd_asymptotics(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const auto fit = fit_for(p, c);
  const auto gp = genfunc_params(c);
  const auto law = loss_asymptote(p.spectrum, gp, fit);
  nlohmann::json j;
  j["fit"] = fit_json(fit);
  j["asymptote"] = law.to_json();
  if (law.phase == Phase::noise_dominated) j["t_trans"] = json_number(transition_time(law));
  const auto xi = xi_criterion(p.spectrum, fit.nu, fit.kappa / fit.nu);
  j["xi"] = xi.to_json();
  const auto opt = optimal_alpha(p.spectrum, fit.nu, fit.kappa / fit.nu);
  j["alpha_opt"] = json_number(opt.alpha_opt);
  j["alpha_max"] = json_number(opt.alpha_max);
  j["stability"] = stability_report(p.spectrum, gp, fit.nu).to_json();
  j["truncation_tail"] = tail_estimate(fit, p.spectrum.size());
  out.write("asymptotics.json", dump(j));
  if (c.plot) {
    const auto t = run_se(p.spectrum, c.sgd_params());
    svg::LineChart chart{"SE loss and large-t law", "t", "L(t)", {series_of("se", t)}, {}, {}};
    chart.guides.push_back({"law", law.exponent, 1.0, law.constant});
    out.write("asymptotics.svg", svg::render_loglog(chart));
  }
}

void cmd_divergence(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const auto gp = genfunc_params(c);
  const auto d = solve_divergence(p.spectrum, gp);
  nlohmann::json j;
  j["divergence"] = d.to_json();
  std::optional<BlowupReport> blow;
  try {
    blow = blowup_time(p.spectrum, gp, fit_for(p, c));
    j["blowup"] = blow->to_json();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::not_applicable && e.kind() != ErrorKind::non_loggable) throw;
    j["blowup"] = e.what();
  }
  const auto t = run_se(p.spectrum, c.sgd_params());
  emit_trajectory(out, "se", t, c, p);
  out.write("divergence.json", dump(j));
  if (c.plot) {
    svg::LineChart chart{"Divergent loss", "t", "L(t)", {series_of("se", t)}, {}, {}};
    chart.series.push_back(series_of("noiseless", run_noiseless(p.spectrum, c.alpha, c.beta, c.steps), true));
    svg::Series asym{"asymptote", {}, {}, true};
    for (std::size_t i = 1; i < t.losses.size(); ++i) {
      const double v = d.prefactor * std::pow(d.r_L, -double(i));
      if (!std::isfinite(v)) break;
      asym.x.push_back(double(i));
      asym.y.push_back(v);
    }
    chart.series.push_back(asym);
    chart.markers.push_back({"t_div", d.t_div});
    if (blow) chart.markers.push_back({"t_blowup", blow->t_blowup});
    out.write("divergence.svg", svg::render_loglog(chart));
  }
}

void cmd_phase_diagram(const ExperimentConfig& c, OutputSet& out) {
  const auto nus = c.grid_nu->values();
  const auto zetas = c.grid_zeta->values();
  GenFuncParams gp{c.alpha, c.beta, c.gamma(), c.tau2};
  const auto cells = phase_diagram(nus, zetas, gp, c.modes);
  std::string csv = "nu,zeta,phase,exponent,constant\n";
  for (const auto& cell : cells)
    csv += format_number(cell.nu) + "," + format_number(cell.zeta) + "," + to_string(cell.phase) +
           "," + format_number(cell.exponent) + "," + format_number(cell.constant) + "\n";
  out.write("phase_diagram.csv", csv);
  if (c.plot) {
    svg::Heatmap h;
    h.title = "Phases";
    h.x_label = "nu";
    h.y_label = "zeta";
    h.xs = nus;
    h.ys = zetas;
    h.values.assign(nus.size() * zetas.size(), 0.0);
    for (std::size_t i = 0; i < nus.size(); ++i)
      for (std::size_t k = 0; k < zetas.size(); ++k)
        h.values[k * nus.size() + i] = double(static_cast<int>(cells[i * zetas.size() + k].phase));
    h.legend = {"signal", "noise", "boundary", "eventual div.", "immediate div."};
    for (double nu : nus)
      if (nu > 1.0) h.boundary.emplace_back(nu, 2.0 - 1.0 / nu);
    h.boundary_label = "zeta = 2 - 1/nu";
    out.write("phase_diagram.svg", svg::render_heatmap(h));
  }
}

void cmd_fit(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const auto fit = fit_power_law(p.spectrum, std::nullopt, c.c0_convention());
  nlohmann::json j = fit_json(fit);
  j["convention"] = c.convention;
  j["modes"] = p.spectrum.size();
  j["phase"] = to_string(classify_phase(fit.nu, fit.kappa / fit.nu));
  out.write("fit.json", dump(j));
}

void cmd_se_error(const ExperimentConfig& c, const Problem& p, OutputSet& out) {
  const auto& f = require_features(p, "se-error");
  const Eigen::VectorXd dw = f.initial_error();
  const auto e = se_fit_error(f, dw * dw.transpose());
  nlohmann::json j;
  j["tau1"] = c.tau1;
  j["tau2"] = c.tau2;
  j["E2"] = json_number(e(c.tau1, c.tau2));
  j["Q"] = {{e.Q(0, 0), e.Q(0, 1)}, {e.Q(1, 0), e.Q(1, 1)}};
  j["l"] = {e.l(0), e.l(1)};
  j["tau2_star"] = json_number(e.tau2_star);
  j["E2_star"] = json_number(e.e2_star);
  out.write("se_error.json", dump(j));
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  Problem p;
  switch (c.source()) {
    case Source::power_law: {
      PowerLawSpec spec;
      spec.Lambda = c.Lambda;
      spec.nu = *c.nu;
      spec.K = c.K;
      spec.kappa = *c.kappa;
      spec.modes = c.modes;
      spec.convention = c.c0_convention();
      p.spectrum = build_power_law(spec);
      p.exact_fit = PowerLawFit{c.Lambda, *c.nu, c.K, *c.kappa, 1, 0.0};
      break;
    }
    case Source::csv:
      p.spectrum = load_spectrum_csv(c.csv);
      break;
    case Source::torus: {
      const std::size_t n = *c.torus;
      std::vector<double> kernel(n);
      for (std::size_t m = 0; m < n; ++m)
        kernel[m] = std::exp((std::cos(2.0 * std::numbers::pi * double(m) / double(n)) - 1.0) /
                             (c.torus_length * c.torus_length));
      CounterRng rng(c.seed, 0);
      Eigen::VectorXd ws(n);
      for (std::size_t i = 0; i < n; ++i) ws(static_cast<Eigen::Index>(i)) = rng.normal();
      auto tp = build_torus_problem({n}, kernel, ws, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
      p.spectrum = std::move(tp.spectrum);
      p.features = std::move(tp.features);
      break;
    }
    case Source::features: {
      p.features = random_feature_problem(*c.features, *c.samples, c.seed);
      p.spectrum = eigendecompose(*p.features).spectrum;
      break;
    }
  }
  if (c.dataset_size) p.spectrum.dataset_size = c.dataset_size;
  return p;
}

void run_command(const ExperimentConfig& c, OutputSet& out) {
  if (c.command == "phase-diagram") {
    cmd_phase_diagram(c, out);
    return;
  }
  const Problem p = build_problem(c);
  if (c.command == "simulate") cmd_simulate(c, p, out);
  else if (c.command == "stability-map") cmd_stability_map(c, p, out);
  else if (c.command == "asymptotics") cmd_asymptotics(c, p, out);
  else if (c.command == "divergence") cmd_divergence(c, p, out);
  else if (c.command == "fit") cmd_fit(c, p, out);
  else if (c.command == "se-error") cmd_se_error(c, p, out);
}

int run_cli(const std::vector<std::string>& args) {
  std::optional<OutputSet> out;
  try {
    const auto config = parse_config(args);
    if (!config) return 0;
    const auto t0 = std::chrono::steady_clock::now();
    out.emplace(config->out);
    try {
      run_command(*config, *out);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out->write_manifest(config->to_json(), wall);
    } catch (...) {
      out->rollback();
      throw;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sgdcli
