#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gelation/duality.hpp"
#include "gelation/connectivity.hpp"
#include "gelation/ensemble.hpp"
#include "gelation/exactgraph.hpp"
#include "gelation/panjer.hpp"
#include "gelation/simulate.hpp"
#include "gelation/rates.hpp"
#include "gelation/mdpcheck.hpp"

namespace py = pybind11;
using namespace gelation;

PYBIND11_MODULE(_gelation, m) {
    m.doc() = "compound Poisson representation of sparse random graph "
              "component profiles: exact laws, conditioned ensembles, "
              "deviation rates and Monte Carlo checks";

    // duality
    py::class_<DualityPair>(m, "DualityPair")
        .def_readonly("c", &DualityPair::c)
        .def_readonly("T", &DualityPair::T)
        .def_readonly("t", &DualityPair::t);
    m.def("solve_duality", &solve_duality, py::arg("c"));
    m.def("parametrize", &parametrize, py::arg("t"));

    py::class_<BorelWeights>(m, "BorelWeights")
        .def_readonly("c", &BorelWeights::c)
        .def_readonly("K", &BorelWeights::K)
        .def_readonly("logh", &BorelWeights::logh);
    m.def("borel_weights", &borel_weights, py::arg("c"), py::arg("K"));

    py::class_<BorelMoments>(m, "BorelMoments")
        .def_readonly("c", &BorelMoments::c)
        .def_readonly("T", &BorelMoments::T)
        .def_readonly("K", &BorelMoments::K)
        .def_readonly("sum0", &BorelMoments::sum0)
        .def_readonly("sum1", &BorelMoments::sum1)
        .def_readonly("sum2", &BorelMoments::sum2)
        .def_readonly("tail0", &BorelMoments::tail0)
        .def_readonly("tail1", &BorelMoments::tail1)
        .def_readonly("tail2", &BorelMoments::tail2)
        .def_readonly("limit0", &BorelMoments::limit0)
        .def_readonly("limit1", &BorelMoments::limit1)
        .def_readonly("limit2", &BorelMoments::limit2);
    m.def("borel_moments", &borel_moments, py::arg("c"), py::arg("K"));

    // connectivity
    py::class_<MuTable>(m, "MuTable")
        .def_readonly("p", &MuTable::p)
        .def_readonly("K", &MuTable::K)
        .def_readonly("logmu", &MuTable::logmu)
        .def_readonly("precision_bits", &MuTable::precision_bits)
        .def_readonly("restarts", &MuTable::restarts);
    m.def("mu_exact", &mu_exact, py::arg("p"), py::arg("K"));
    m.def("mu_stepanov_small", &mu_stepanov_small, py::arg("k"), py::arg("c"), py::arg("n"));
    m.def("mu_stepanov_linear", &mu_stepanov_linear, py::arg("alpha"), py::arg("c"), py::arg("n"));

    py::class_<SandwichReport>(m, "SandwichReport")
        .def_readonly("ok", &SandwichReport::ok)
        .def_readonly("first_violation", &SandwichReport::first_violation)
        .def_readonly("K", &SandwichReport::K);
    m.def("mu_sandwich_check",
          py::overload_cast<double, long, int>(&mu_sandwich_check),
          py::arg("c"), py::arg("n"), py::arg("K"));

    // ensemble
    py::class_<ThetaChoice>(m, "ThetaChoice")
        .def_readonly("theta", &ThetaChoice::theta)
        .def_readonly("eps0", &ThetaChoice::eps0)
        .def_readonly("gamma_at_theta", &ThetaChoice::gamma_at_theta)
        .def_readonly("eta", &ThetaChoice::eta);
    m.def("choose_theta", &choose_theta, py::arg("c"));
    m.def("gamma_fn", &gamma_fn, py::arg("theta"), py::arg("c"));

    py::class_<JumpLaw>(m, "JumpLaw")
        .def_readonly("n", &JumpLaw::n)
        .def_readonly("c", &JumpLaw::c)
        .def_readonly("theta", &JumpLaw::theta)
        .def_readonly("kmax", &JumpLaw::kmax)
        .def_readonly("logZ", &JumpLaw::logZ)
        .def_readonly("logp", &JumpLaw::logp)
        .def_readonly("mu_precision_bits", &JumpLaw::mu_precision_bits)
        .def("logW", &JumpLaw::logW, py::arg("k"));
    m.def("jump_law", py::overload_cast<long, double, double>(&jump_law),
          py::arg("n"), py::arg("c"), py::arg("theta"));

    py::class_<EnsembleMoments>(m, "EnsembleMoments")
        .def_readonly("Z", &EnsembleMoments::Z)
        .def_readonly("mean", &EnsembleMoments::mean)
        .def_readonly("second_moment", &EnsembleMoments::second_moment)
        .def_readonly("variance", &EnsembleMoments::variance);
    m.def("ensemble_moments", &ensemble_moments, py::arg("law"));
    m.def("mgf_bound_check", &mgf_bound_check, py::arg("law"), py::arg("eta"));
    m.def("zero_range_rate", py::overload_cast<long, double, long>(&zero_range_rate),
          py::arg("n"), py::arg("c"), py::arg("k"));

    // panjer
    py::class_<CompoundSumTable>(m, "CompoundSumTable")
        .def_readonly("lambda_", &CompoundSumTable::lambda)
        .def_readonly("n_max", &CompoundSumTable::n_max)
        .def_readonly("kmax", &CompoundSumTable::kmax)
        .def_readonly("lograte", &CompoundSumTable::lograte)
        .def_readonly("logpmf", &CompoundSumTable::logpmf)
        .def("logp_S", &CompoundSumTable::logp_S, py::arg("m"));
    m.def("compound_pmf", &compound_pmf, py::arg("law"), py::arg("lambda_"), py::arg("n_max"));
    m.def("panjer_residual_max", &panjer_residual_max, py::arg("table"));

    py::class_<ConditionalEnsemble>(m, "ConditionalEnsemble")
        .def_readonly("n", &ConditionalEnsemble::n)
        .def_readonly("c", &ConditionalEnsemble::c)
        .def_readonly("theta", &ConditionalEnsemble::theta)
        .def_readonly("law", &ConditionalEnsemble::law)
        .def_readonly("table", &ConditionalEnsemble::table)
        .def_readonly("logP_hit", &ConditionalEnsemble::logP_hit);
    m.def("make_ensemble", py::overload_cast<long, double, double>(&make_ensemble),
          py::arg("n"), py::arg("c"), py::arg("theta") = 0.0,
          "theta <= 0 selects the automatic truncation");
    m.def("hit_probability_identity", &hit_probability_identity,
          py::arg("n"), py::arg("c"), py::arg("theta"));
    m.def("ratio_identity_fra", &ratio_identity_fra, py::arg("n"), py::arg("m"), py::arg("c"));
    m.def("conditional_count_pmf", &conditional_count_pmf, py::arg("ens"), py::arg("k"));
    m.def("conditional_max_pmf", &conditional_max_pmf, py::arg("ens"));
    m.def("conditional_N_pmf", &conditional_N_pmf, py::arg("ens"));
    m.def("conditional_max_window_logprob", &conditional_max_window_logprob,
          py::arg("ens"), py::arg("m_lo"), py::arg("m_hi"));
    m.def("conditional_count_window_logprob", &conditional_count_window_logprob,
          py::arg("ens"), py::arg("k"), py::arg("j_lo"), py::arg("j_hi"));
    m.def("conditional_N_window_logprob", &conditional_N_window_logprob,
          py::arg("ens"), py::arg("j_lo"), py::arg("j_hi"));
    m.def("conditional_profile_law", &conditional_profile_law, py::arg("ens"));
    m.def("knbeta_ratio", py::overload_cast<long, double, double, double>(&knbeta_ratio),
          py::arg("n"), py::arg("c"), py::arg("beta"), py::arg("a_n"));
    m.def("knbeta_subcritical", &knbeta_subcritical, py::arg("n"), py::arg("c"), py::arg("a_n"));

    // exactgraph
    py::class_<ExactLaw>(m, "ExactLaw")
        .def_readonly("n", &ExactLaw::n)
        .def_readonly("c", &ExactLaw::c)
        .def_readonly("entries", &ExactLaw::entries);
    m.def("law_by_partitions", &law_by_partitions, py::arg("n"), py::arg("c"));
    m.def("brute_force_law", &brute_force_law, py::arg("n"), py::arg("c"));

    py::class_<DerivedLaws>(m, "DerivedLaws")
        .def_readonly("cmax", &DerivedLaws::cmax)
        .def_readonly("cn", &DerivedLaws::cn)
        .def_readonly("tnk", &DerivedLaws::tnk);
    m.def("derived_laws", &derived_laws, py::arg("law"));
    m.def("log_prob_cmax_le", &log_prob_cmax_le, py::arg("law"), py::arg("m"));
    m.def("restrict_cmax", &restrict_cmax, py::arg("law"), py::arg("m"));

    // simulate
    py::class_<ComponentStats>(m, "ComponentStats")
        .def_readonly("n", &ComponentStats::n)
        .def_readonly("cmax", &ComponentStats::cmax)
        .def_readonly("cn", &ComponentStats::cn)
        .def_readonly("t", &ComponentStats::t);
    m.def("sample_graph_stats", &sample_graph_stats,
          py::arg("n"), py::arg("c"), py::arg("seed"), py::arg("replica") = 0,
          py::call_guard<py::gil_scoped_release>());

    py::class_<VarianceEstimate>(m, "VarianceEstimate")
        .def_readonly("value", &VarianceEstimate::value)
        .def_readonly("se", &VarianceEstimate::se);
    m.def("jackknife_variance", &jackknife_variance, py::arg("xs"), py::arg("scale"));

    py::class_<CltReport>(m, "CltReport")
        .def_readonly("n", &CltReport::n)
        .def_readonly("c", &CltReport::c)
        .def_readonly("replicas", &CltReport::replicas)
        .def_readonly("seed", &CltReport::seed)
        .def_readonly("mean_cmax", &CltReport::mean_cmax)
        .def_readonly("mean_cn", &CltReport::mean_cn)
        .def_readonly("mean_cn_se", &CltReport::mean_cn_se)
        .def_readonly("var_cmax", &CltReport::var_cmax)
        .def_readonly("var_t", &CltReport::var_t)
        .def_readonly("var_cn", &CltReport::var_cn)
        .def_readonly("local1_display", &CltReport::local1_display)
        .def_readonly("local1_rate", &CltReport::local1_rate)
        .def_readonly("local2", &CltReport::local2)
        .def_readonly("local3", &CltReport::local3)
        .def_readonly("local1_display_consistent", &CltReport::local1_display_consistent)
        .def_readonly("local1_rate_consistent", &CltReport::local1_rate_consistent);
    m.def("clt_constants_check", &clt_constants_check,
          py::arg("n"), py::arg("c"), py::arg("replicas"), py::arg("seed"),
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

    // rates
    py::enum_<RateName>(m, "RateName")
        .value("i_max", RateName::i_max)
        .value("iota_k", RateName::iota_k)
        .value("j_total", RateName::j_total)
        .value("grand_sum", RateName::grand_sum)
        .value("grand_fixed", RateName::grand_fixed)
        .value("grand_excl_k", RateName::grand_excl_k)
        .value("general_compound", RateName::general_compound)
        .value("general_fixed", RateName::general_fixed);

    py::class_<QuadraticRate>(m, "QuadraticRate")
        .def_readonly("name", &QuadraticRate::name)
        .def_readonly("kappa", &QuadraticRate::kappa)
        .def_readonly("c", &QuadraticRate::c)
        .def_readonly("T", &QuadraticRate::T)
        .def_readonly("k", &QuadraticRate::k)
        .def_readonly("kappa_display", &QuadraticRate::kappa_display)
        .def("value", &QuadraticRate::value, py::arg("x"));
    m.def("mdp_rate", &mdp_rate, py::arg("name"), py::arg("c"), py::arg("k") = 0);

    py::class_<GrandRates>(m, "GrandRates")
        .def_readonly("sum", &GrandRates::sum)
        .def_readonly("fixed", &GrandRates::fixed)
        .def_readonly("excl_k", &GrandRates::excl_k);
    m.def("grand_rates", &grand_rates, py::arg("c"), py::arg("theta"), py::arg("k"));
    m.def("general_compound_rate", &general_compound_rate,
          py::arg("lambda_"), py::arg("mu"), py::arg("sigma2"));
    m.def("general_fixed_rate", &general_fixed_rate, py::arg("lambda_"), py::arg("sigma2"));

    py::class_<LdpRate>(m, "LdpRate")
        .def_readonly("c", &LdpRate::c)
        .def_readonly("thresholds", &LdpRate::thresholds)
        .def_readonly("complete", &LdpRate::complete)
        .def("value", &LdpRate::value, py::arg("x"));
    m.def("make_ldp_rate", &make_ldp_rate, py::arg("c"), py::arg("kmax"));
    m.def("ldp_thresholds", &ldp_thresholds, py::arg("c"), py::arg("kmax"));
    m.def("ldp_rate", &ldp_rate, py::arg("c"), py::arg("x"));
    m.def("ldp_kernel", &ldp_kernel, py::arg("y"), py::arg("r"));

    py::class_<EmpiricalRates>(m, "EmpiricalRates")
        .def_readonly("lambda_", &EmpiricalRates::lambda)
        .def_readonly("jump_rate", &EmpiricalRates::jump_rate)
        .def_readonly("component_rate", &EmpiricalRates::component_rate);
    m.def("empirical_rates", &empirical_rates, py::arg("sigma"), py::arg("c"),
          "sigma[k] for k >= 1; index 0 is ignored");

    // mdpcheck
    py::enum_<AnRule>(m, "AnRule")
        .value("power", AnRule::power)
        .value("sqrt_log", AnRule::sqrt_log);
    m.def("an_value", &an_value, py::arg("rule"), py::arg("rho"), py::arg("n"));
    m.def("mdp_window", &mdp_window,
          py::arg("center"), py::arg("beta"), py::arg("delta"), py::arg("s"));

    py::enum_<ScanStatistic>(m, "ScanStatistic")
        .value("max", ScanStatistic::max)
        .value("count_k", ScanStatistic::count_k)
        .value("N", ScanStatistic::N)
        .value("grand_sum", ScanStatistic::grand_sum);

    py::class_<ScanSpec>(m, "ScanSpec")
        .def(py::init<>())
        .def_readwrite("c", &ScanSpec::c)
        .def_readwrite("theta", &ScanSpec::theta)
        .def_readwrite("n_grid", &ScanSpec::n_grid)
        .def_readwrite("rule", &ScanSpec::rule)
        .def_readwrite("rho", &ScanSpec::rho)
        .def_readwrite("statistic", &ScanSpec::statistic)
        .def_readwrite("k", &ScanSpec::k)
        .def_readwrite("betas", &ScanSpec::betas)
        .def_readwrite("delta", &ScanSpec::delta);

    py::class_<ScanRow>(m, "ScanRow")
        .def_readonly("n", &ScanRow::n)
        .def_readonly("beta", &ScanRow::beta)
        .def_readonly("a_n", &ScanRow::a_n)
        .def_readonly("window_lo", &ScanRow::window_lo)
        .def_readonly("window_hi", &ScanRow::window_hi)
        .def_readonly("log_prob", &ScanRow::log_prob)
        .def_readonly("scaled", &ScanRow::scaled)
        .def_readonly("rate_value", &ScanRow::rate_value);
    m.def("conditional_mdp_scan",
          py::overload_cast<const ScanSpec&, int>(&conditional_mdp_scan),
          py::arg("spec"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<MgfExpansion>(m, "MgfExpansion")
        .def_readonly("xi", &MgfExpansion::xi)
        .def_readonly("a_n", &MgfExpansion::a_n)
        .def_readonly("n", &MgfExpansion::n)
        .def_readonly("lambda_", &MgfExpansion::lambda)
        .def_readonly("mu", &MgfExpansion::mu)
        .def_readonly("sigma2", &MgfExpansion::sigma2)
        .def_readonly("compound_scaled", &MgfExpansion::compound_scaled)
        .def_readonly("compound_predicted", &MgfExpansion::compound_predicted)
        .def_readonly("compound_residual", &MgfExpansion::compound_residual)
        .def_readonly("fixed_scaled", &MgfExpansion::fixed_scaled)
        .def_readonly("fixed_predicted", &MgfExpansion::fixed_predicted)
        .def_readonly("fixed_residual", &MgfExpansion::fixed_residual);
    m.def("mgf_expansion_check", &mgf_expansion_check,
          py::arg("law"), py::arg("lambda_"), py::arg("xi"), py::arg("a_n"), py::arg("n"));

    py::class_<AlphaRow>(m, "AlphaRow")
        .def_readonly("n", &AlphaRow::n)
        .def_readonly("a_n", &AlphaRow::a_n)
        .def_readonly("scaled", &AlphaRow::scaled)
        .def_readonly("markov_bound", &AlphaRow::markov_bound)
        .def_readonly("tightness", &AlphaRow::tightness);
    m.def("alphan_check", &alphan_check,
          py::arg("c"), py::arg("theta"), py::arg("alpha"),
          py::arg("rule"), py::arg("rho"), py::arg("n_grid"),
          py::call_guard<py::gil_scoped_release>());
}
