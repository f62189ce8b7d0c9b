#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtm4f/analysis.hpp"
#include "qtm4f/errors.hpp"
#include "qtm4f/io.hpp"
#include "qtm4f/model.hpp"
#include "qtm4f/relaxation.hpp"

namespace qtm4f::cli {

namespace {

using nlohmann::json;

struct ModelFlags {
  double U = 0.0;
  double A = 0.0;
  double mu_x = 1.0;
  double mu_y = 1.0;
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  ModelParams params() const { return {.U = U, .A = A, .mu_x = mu_x, .mu_y = mu_y}; }
  FieldVector field() const { return {.Bx = bx, .By = by, .Bz = bz}; }
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_field) {
  app->add_option("--U", f.U, "TRD2 - TRD1 splitting U/k_B, kelvin")->required();
  app->add_option("--A", f.A, "tunneling matrix element A/k_B, kelvin (>= 0)")->required();
  app->add_option("--mu-x", f.mu_x, "pseudospin moment along x (TRD1 axis), Bohr magnetons")
      ->capture_default_str();
  app->add_option("--mu-y", f.mu_y, "pseudospin moment along y (TRD2 axis), Bohr magnetons")
      ->capture_default_str();
  if (with_field) {
    app->add_option("--bx", f.bx, "applied field along x, tesla")->capture_default_str();
    app->add_option("--by", f.by, "applied field along y, tesla")->capture_default_str();
    app->add_option("--bz", f.bz, "applied field along z, tesla (no effect in this model)")
        ->capture_default_str();
  }
}

void warn_bz(const ModelFlags& f, std::ostream& err) {
  if (f.bz != 0.0) err << "warning: Bz couples to nothing in the pseudospin model and is ignored\n";
}

CLI::Option* add_format(CLI::App* app, std::string& format, std::vector<std::string> allowed) {
  return app->add_option("--format", format, "output format")
      ->check(CLI::IsMember(std::move(allowed)))
      ->capture_default_str();
}

json with_unit(double v, const char* unit) { return {{"value", v}, {"unit", unit}}; }

std::string trace_header() { return "t_ns,p1,p1bar,p2,p2bar,mx,my"; }

// Fit that stopped without converging; carries the full diagnostic.
struct FitNotConverged {
  json diagnostic;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-state pseudospin model of anisotropic 4f ion pairs: spectra, tunneling "
               "parameters and Arrhenius relaxation fits.",
               args.empty() ? "qtm4f" : args[0]};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output_path;
  app.add_option("-o,--output", output_path, "write results to this file instead of stdout");

  // Every subcommand sets `action`; it writes its result to the stream.
  std::function<void(std::ostream&)> action;

  // spectrum-ua
  auto* sua = app.add_subcommand("spectrum-ua", "zero-field eigenvalues (units of A) versus U/A");
  double ua_min = 0.0, ua_max = 20.0;
  std::size_t ua_points = 201;
  std::string sua_format = "csv";
  sua->add_option("--min", ua_min, "lowest U/A (dimensionless)")->capture_default_str();
  sua->add_option("--max", ua_max, "highest U/A (dimensionless)")->capture_default_str();
  sua->add_option("--points", ua_points, "number of grid points (>= 2)")->capture_default_str();
  add_format(sua, sua_format, {"csv", "json"});
  sua->callback([&] {
    action = [&](std::ostream& os) {
      const SweepTable t = sweep_ua(ua_min, ua_max, ua_points);
      if (sua_format == "csv") io::write_sweep_csv(os, t);
      else os << io::sweep_to_json(t).dump(2) << '\n';
    };
  });

  // spectrum-field
  auto* sf = app.add_subcommand("spectrum-field",
                                "eigenvalues (kelvin) and ground-state moment versus By/B_Zt");
  ModelFlags sf_model;
  double sf_max = 2.0;
  std::size_t sf_points = 201;
  std::string sf_format = "csv";
  add_model_flags(sf, sf_model, false);
  sf->add_option("--max", sf_max, "highest By in units of B_Zt = |U|/(2 mu_y) (dimensionless)")
      ->capture_default_str();
  sf->add_option("--points", sf_points, "number of grid points (>= 2)")->capture_default_str();
  add_format(sf, sf_format, {"csv", "json"});
  sf->callback([&] {
    action = [&](std::ostream& os) {
      const SweepTable t = sweep_field(sf_model.params(), sf_max, sf_points);
      if (sf_format == "csv") io::write_sweep_csv(os, t);
      else os << io::sweep_to_json(t).dump(2) << '\n';
    };
  });

  // eigen
  auto* eig = app.add_subcommand("eigen", "eigenvalues (kelvin) and eigenvectors at one field");
  ModelFlags eig_model;
  std::string eig_method = "numeric";
  std::string eig_format = "json";
  add_model_flags(eig, eig_model, true);
  eig->add_option("--method", eig_method,
                  "numeric (Jacobi) or closed (analytic, zero field only)")
      ->check(CLI::IsMember({"numeric", "closed"}))
      ->capture_default_str();
  add_format(eig, eig_format, {"json"});
  eig->callback([&] {
    action = [&](std::ostream& os) {
      warn_bz(eig_model, err);
      const ModelParams p = eig_model.params();
      const FieldVector f = eig_model.field();
      EigenSystem es;
      if (eig_method == "closed") {
        if (f.Bx != 0.0 || f.By != 0.0)
          throw DomainError("closed-form eigensystem is only available at zero in-plane field");
        es = closed_form_zero_field(p);
      } else {
        es = eigensystem(build_hamiltonian(p, f));
      }
      json j = io::eigensystem_to_json(es);
      j["method"] = eig_method;
      j["field_T"] = {{"Bx", f.Bx}, {"By", f.By}, {"Bz", f.Bz}};
      j["moments_muB"] = json::array();
      for (const auto& v : es.vectors) {
        const MomentVector m = moment_expectation(StateVector::from_real(v), p);
        j["moments_muB"].push_back({{"mx", m.mx}, {"my", m.my}, {"mz", m.mz}});
      }
      os << j.dump(2) << '\n';
    };
  });

  // extract
  auto* ex = app.add_subcommand(
      "extract", "tunneling element, frequency and threshold field from a ground splitting");
  std::optional<double> ex_delta, ex_U, ex_A, ex_mu_y;
  std::string ex_mode = "both";
  std::string ex_format = "json";
  ex->add_option("--delta", ex_delta, "ground splitting lambda2 - lambda1 over k_B, kelvin");
  ex->add_option("--U", ex_U, "TRD splitting U/k_B, kelvin");
  ex->add_option("--A", ex_A, "tunneling element A/k_B, kelvin (derives --delta when omitted)");
  ex->add_option("--mu-y", ex_mu_y, "pseudospin moment along y, Bohr magnetons");
  ex->add_option("--mode", ex_mode, "A extraction rule: exact, paper (delta = 4A) or both")
      ->check(CLI::IsMember({"exact", "paper", "both"}))
      ->capture_default_str();
  add_format(ex, ex_format, {"json"});
  ex->callback([&] {
    action = [&](std::ostream& os) {
      json j;
      double delta = 0.0;
      if (ex_delta) {
        delta = *ex_delta;
        j["delta"] = with_unit(delta, "K");
        j["delta"]["source"] = "input";
      } else {
        if (!ex_U || !ex_A) throw DomainError("extract needs --delta, or both --U and --A");
        delta = ground_splitting(ModelParams{.U = *ex_U, .A = *ex_A});
        j["delta"] = with_unit(delta, "K");
        j["delta"]["source"] = "ground_splitting";
      }
      if (ex_U && ex_A)
        j["ground_splitting"] = with_unit(ground_splitting(ModelParams{.U = *ex_U, .A = *ex_A}), "K");
      if (ex_mode != "exact") j["A_paper"] = with_unit(extract_A(delta, 0.0, ExtractionMode::paper), "K");
      if (ex_mode != "paper") {
        if (ex_U) j["A_exact"] = with_unit(extract_A(delta, *ex_U, ExtractionMode::exact), "K");
        else if (ex_mode == "exact") throw DomainError("exact extraction needs --U");
      }
      j["frequency"] = with_unit(to_frequency(delta), "GHz");
      if (ex_U && ex_mu_y) {
        ModelParams p{.U = *ex_U, .mu_y = *ex_mu_y};
        j["zeeman_threshold"] = with_unit(zeeman_threshold(p), "T");
      }
      j["annotations"] = json::array();
      if (auto note = frequency_annotation(delta)) j["annotations"].push_back(*note);
      os << j.dump(2) << '\n';
    };
  });

  // fit
  auto* ft = app.add_subcommand("fit", "fit a multi-process Arrhenius model to a lifetime dataset");
  std::string ft_input;
  std::size_t ft_processes = 2;
  std::size_t ft_grid = 200;
  std::vector<double> ft_init_tau0, ft_init_delta;
  std::string ft_format = "json";
  ft->add_option("-i,--input", ft_input, "dataset CSV (T_K,tau_s[,sigma_ln_tau][,mode])")
      ->required();
  ft->add_option("--processes", ft_processes, "number of Arrhenius processes (1-4)")
      ->capture_default_str();
  ft->add_option("--grid-points", ft_grid, "points of the log-spaced model curve (>= 2)")
      ->capture_default_str();
  ft->add_option("--init-tau0", ft_init_tau0, "initial prefactors, seconds (one per process)");
  ft->add_option("--init-delta", ft_init_delta, "initial barriers Delta/k_B, kelvin");
  add_format(ft, ft_format, {"json"});
  ft->callback([&] {
    action = [&](std::ostream& os) {
      std::ifstream in(ft_input);
      if (!in) throw DomainError("cannot open dataset '" + ft_input + "'");
      const RelaxationDataset data = io::read_dataset_csv(in, ft_input);
      std::optional<RelaxationModel> init;
      if (!ft_init_tau0.empty() || !ft_init_delta.empty()) {
        if (ft_init_tau0.size() != ft_init_delta.size())
          throw DomainError("--init-tau0 and --init-delta need the same number of values");
        std::vector<ArrheniusProcess> procs;
        for (std::size_t i = 0; i < ft_init_tau0.size(); ++i)
          procs.push_back({.tau0 = ft_init_tau0[i], .delta = ft_init_delta[i]});
        init.emplace(std::move(procs));
      }
      const FitResult r = fit(data, ft_processes, init);
      json j = io::fit_to_json(r);
      j["source"] = data.source;
      double tmin = data.points.front().temperature, tmax = tmin;
      json at_data = json::array();
      for (const auto& pt : data.points) {
        tmin = std::min(tmin, pt.temperature);
        tmax = std::max(tmax, pt.temperature);
        at_data.push_back({{"T_K", pt.temperature}, {"tau_s", model_lifetime(r.model, pt.temperature)}});
      }
      json grid = json::array();
      if (tmax > tmin)
        for (double T : log_spaced(tmin, tmax, ft_grid))
          grid.push_back({{"T_K", T}, {"tau_s", model_lifetime(r.model, T)}});
      j["curve"] = {{"at_data", at_data}, {"grid", grid}};
      if (!r.converged) {
        json diag{{"error", "fit_not_converged"},
                  {"message", "damped Gauss-Newton stopped without meeting the convergence criteria"},
                  {"result", j}};
        throw FitNotConverged{std::move(diag)};
      }
      os << j.dump(2) << '\n';
    };
  });

  // synth
  auto* sy = app.add_subcommand("synth", "synthetic lifetime dataset from an Arrhenius model");
  std::vector<double> sy_tau0, sy_delta;
  std::string sy_molecule;
  double sy_tmin = 0.4, sy_tmax = 30.0, sy_noise = 0.05;
  std::size_t sy_points = 30;
  std::uint64_t sy_seed = 1;
  auto* sy_mol = sy->add_option("--molecule", sy_molecule,
                                "published two-process parameters: dy2s or tb2scn")
                     ->check(CLI::IsMember({"dy2s", "tb2scn"}));
  auto* sy_t = sy->add_option("--tau0", sy_tau0, "prefactors, seconds (one per process)");
  sy->add_option("--delta", sy_delta, "barriers Delta/k_B, kelvin (one per process)")->needs(sy_t);
  sy_t->excludes(sy_mol);
  sy->add_option("--tmin", sy_tmin, "lowest temperature, kelvin")->capture_default_str();
  sy->add_option("--tmax", sy_tmax, "highest temperature, kelvin")->capture_default_str();
  sy->add_option("--points", sy_points, "number of log-spaced temperatures")->capture_default_str();
  sy->add_option("--noise", sy_noise, "Gaussian sigma of ln(tau) (dimensionless)")
      ->capture_default_str();
  sy->add_option("--seed", sy_seed, "random seed")->capture_default_str();
  sy->callback([&] {
    action = [&](std::ostream& os) {
      std::vector<ArrheniusProcess> procs;
      if (!sy_molecule.empty()) {
        const PublishedMolecule& m = sy_molecule == "dy2s" ? kDy2S : kTb2ScN;
        procs = {{m.tau0_I, m.delta_I}, {m.tau0_II, m.delta_II}};
      } else {
        if (sy_tau0.empty() || sy_tau0.size() != sy_delta.size())
          throw DomainError("synth needs --molecule or matching --tau0/--delta lists");
        for (std::size_t i = 0; i < sy_tau0.size(); ++i) procs.push_back({sy_tau0[i], sy_delta[i]});
      }
      RelaxationDataset d = synthesize(RelaxationModel(std::move(procs)),
                                       log_spaced(sy_tmin, sy_tmax, sy_points), sy_noise, sy_seed);
      io::write_dataset_csv(os, d);
    };
  });

  // evolve
  auto* ev = app.add_subcommand("evolve",
                                "coherent time evolution of basis populations and moment");
  ModelFlags ev_model;
  std::string ev_initial = "1";
  double ev_tmax = 1.0;
  std::size_t ev_points = 1001;
  std::string ev_format = "csv";
  add_model_flags(ev, ev_model, true);
  ev->add_option("--initial", ev_initial, "initial basis state: 1, 1bar, 2 or 2bar")
      ->check(CLI::IsMember({"1", "1bar", "2", "2bar"}))
      ->capture_default_str();
  ev->add_option("--t-max", ev_tmax, "final time, nanoseconds")->capture_default_str();
  ev->add_option("--points", ev_points, "number of time samples from 0 to t-max (>= 2)")
      ->capture_default_str();
  add_format(ev, ev_format, {"csv", "json"});
  ev->callback([&] {
    action = [&](std::ostream& os) {
      warn_bz(ev_model, err);
      if (ev_points < 2) throw DomainError("evolve needs at least 2 time points");
      if (!std::isfinite(ev_tmax) || !(ev_tmax > 0.0)) throw DomainError("t-max must be positive");
      const ModelParams p = ev_model.params();
      const EigenSystem es = eigensystem(build_hamiltonian(p, ev_model.field()));
      const Basis b0 = ev_initial == "1"      ? Basis::one
                       : ev_initial == "1bar" ? Basis::one_bar
                       : ev_initial == "2"    ? Basis::two
                                              : Basis::two_bar;
      const StateVector s0 = StateVector::basis(b0);
      json rows = json::array();
      if (ev_format == "csv") os << trace_header() << '\n';
      for (std::size_t k = 0; k < ev_points; ++k) {
        const double t = k + 1 == ev_points
                             ? ev_tmax
                             : ev_tmax * static_cast<double>(k) / static_cast<double>(ev_points - 1);
        const StateVector s = evolve(s0, es, t);
        const MomentVector m = moment_expectation(s, p);
        const double pops[4] = {s.population(Basis::one), s.population(Basis::one_bar),
                                s.population(Basis::two), s.population(Basis::two_bar)};
        if (ev_format == "csv") {
          os << io::format_double(t);
          for (double x : pops) os << ',' << io::format_double(x);
          os << ',' << io::format_double(m.mx) << ',' << io::format_double(m.my) << '\n';
        } else {
          rows.push_back({{"t_ns", t}, {"p1", pops[0]}, {"p1bar", pops[1]}, {"p2", pops[2]},
                          {"p2bar", pops[3]}, {"mx", m.mx}, {"my", m.my}});
        }
      }
      if (ev_format == "json") os << json{{"trace", rows}}.dump(2) << '\n';
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("qtm4f");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageError;
  }

  auto domain_failure = [&](const char* kind, const std::string& message, json extra = json::object()) {
    json diag{{"error", kind}, {"message", message}};
    diag.update(extra);
    err << diag.dump() << '\n';
    return kDomainError;
  };

  try {
    if (output_path.empty()) {
      action(out);
    } else {
      // Render fully before touching the file so failures leave no partial output.
      std::ostringstream buf;
      action(buf);
      std::ofstream file(output_path, std::ios::binary);
      if (!file) return domain_failure("io_error", "cannot open output '" + output_path + "'");
      file << buf.str();
      if (!file) return domain_failure("io_error", "failed writing '" + output_path + "'");
    }
  } catch (const DegenerateFitError& e) {
    return domain_failure("degenerate_fit", e.what(),
                          {{"parameters", json::array({e.first(), e.second()})}});
  } catch (const ConvergenceError& e) {
    return domain_failure("not_converged", e.what(), {{"residual", e.residual()}});
  } catch (const DomainError& e) {
    return domain_failure("domain_error", e.what());
  } catch (const FitNotConverged& e) {
    err << e.diagnostic.dump() << '\n';
    return kDomainError;
  }
  return kOk;
}

}  // namespace qtm4f::cli
