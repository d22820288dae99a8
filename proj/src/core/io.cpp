#include "io.hpp"

#include "format.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace skewnow {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

double round9(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json tail_json(Tail t) { return t.is_infinite() ? json("inf") : json(t.value()); }

Tail tail_from(const json& j)
{
    if (j.is_string() && j.get<std::string>() == "inf") return Tail::infinite();
    return Tail(j.get<double>());
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json spec_json(const ModelSpec& s)
{
    return {{"label", s.label},
            {"gdp_family", to_string(s.gdp_family)},
            {"related_family", to_string(s.related_family)},
            {"dynamic_scale", s.dynamic_scale},
            {"dynamic_shape", s.dynamic_shape},
            {"related_frequency", to_string(s.related_frequency)},
            {"scale_aggregation", to_string(s.scale_aggregation)},
            {"location_common_ar", s.location_common_ar}};
}

ModelSpec spec_from(const json& j)
{
    ModelSpec s;
    s.label = j.at("label").get<std::string>();
    s.gdp_family = family_from_string(j.at("gdp_family").get<std::string>());
    s.related_family = family_from_string(j.at("related_family").get<std::string>());
    s.dynamic_scale = j.at("dynamic_scale").get<bool>();
    s.dynamic_shape = j.at("dynamic_shape").get<bool>();
    const std::string freq = j.at("related_frequency").get<std::string>();
    if (freq == "monthly") s.related_frequency = RelatedFrequency::monthly;
    else if (freq == "rolling_quarterly") s.related_frequency = RelatedFrequency::rolling_quarterly;
    else throw std::invalid_argument("unknown related_frequency: " + freq);
    const std::string agg = j.at("scale_aggregation").get<std::string>();
    if (agg == "gaussian_approx") s.scale_aggregation = ScaleAggregation::gaussian_approx;
    else if (agg == "direct") s.scale_aggregation = ScaleAggregation::direct;
    else if (agg == "none") s.scale_aggregation = ScaleAggregation::none;
    else throw std::invalid_argument("unknown scale_aggregation: " + agg);
    s.location_common_ar = j.value("location_common_ar", false);
    s.validate();
    return s;
}

json theta_json(const ModelParameters& t)
{
    const auto vec = [](const StateVector& v) {
        json a = json::array();
        for (double x : v) a.push_back(x);
        return a;
    };
    return {{"initial_state", vec(t.initial_state)},
            {"update_gains", vec(t.update_gains)},
            {"prediction_gains", vec(t.prediction_gains)},
            {"ar_location_common", t.ar_location_common},
            {"ar_scale_common", t.ar_scale_common},
            {"ar_shape_trend", t.ar_shape_trend},
            {"ar_shape_common", t.ar_shape_common},
            {"loading_location", t.loading_location},
            {"loading_scale", t.loading_scale},
            {"loading_shape", t.loading_shape},
            {"tail_gdp", tail_json(t.tail_gdp)},
            {"tail_related", tail_json(t.tail_related)},
            {"copula",
             {{"family", to_string(t.copula.family)}, {"dependence", t.copula.dependence}, {"dof", t.copula.dof}}},
            {"weight", t.weight}};
}

ModelParameters theta_from(const json& j)
{
    ModelParameters t;
    const auto vec = [](const json& a, StateVector& v) {
        if (!a.is_array() || a.size() != kStateDim) throw std::invalid_argument("state vectors need 9 entries");
        for (std::size_t i = 0; i < kStateDim; ++i) v[i] = a[i].get<double>();
    };
    vec(j.at("initial_state"), t.initial_state);
    vec(j.at("update_gains"), t.update_gains);
    vec(j.at("prediction_gains"), t.prediction_gains);
    t.ar_location_common = j.at("ar_location_common").get<double>();
    t.ar_scale_common = j.at("ar_scale_common").get<double>();
    t.ar_shape_trend = j.at("ar_shape_trend").get<double>();
    t.ar_shape_common = j.at("ar_shape_common").get<double>();
    t.loading_location = j.at("loading_location").get<double>();
    t.loading_scale = j.at("loading_scale").get<double>();
    t.loading_shape = j.at("loading_shape").get<double>();
    t.tail_gdp = tail_from(j.at("tail_gdp"));
    t.tail_related = tail_from(j.at("tail_related"));
    const json& c = j.at("copula");
    t.copula.family = copula_family_from_string(c.at("family").get<std::string>());
    t.copula.dependence = c.at("dependence").get<double>();
    t.copula.dof = c.at("dof").get<double>();
    t.weight = j.at("weight").get<double>();
    return t;
}

}  // namespace

std::string spec_to_json(const ModelSpec& spec) { return spec_json(spec).dump(2); }

ModelSpec spec_from_json(const std::string& text) { return spec_from(json::parse(text)); }

std::string fit_to_json(const FitResult& fit)
{
    const bool has_copula = fit.estimate.copula.family != CopulaFamily::independence;
    const bool has_dof = fit.estimate.copula.family == CopulaFamily::student_t;
    json j;
    j["model"] = fit.spec.label;
    j["log_lik"] = number_or_null(round9(fit.total_loglik));
    j["log_lik_indep"] = number_or_null(round9(fit.independence_loglik));
    j["log_lik_gdp"] = number_or_null(round9(fit.gdp_loglik));
    j["dependence"] = has_copula ? json(round9(fit.estimate.copula.dependence)) : json(nullptr);
    j["copula_dof"] = has_dof ? json(round9(fit.estimate.copula.dof)) : json(nullptr);
    j["aic"] = number_or_null(round9(fit.aic));
    j["bic"] = number_or_null(round9(fit.bic));
    j["weighted_objective"] = number_or_null(round9(fit.objective));
    j["n_params"] = fit.n_params;
    j["n_obs"] = fit.n_obs;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["status"] = fit.status;
    j["spec"] = spec_json(fit.spec);
    json params = json::object();
    for (std::size_t i = 0; i < fit.parameter_names.size() && i < fit.parameter_values.size(); ++i) {
        params[fit.parameter_names[i]] = round9(fit.parameter_values[i]);
    }
    j["parameters"] = params;
    j["theta"] = theta_json(fit.estimate);
    json starts = json::array();
    for (const auto& s : fit.starts) {
        starts.push_back({{"index", s.index},
                          {"initial_objective", number_or_null(round9(s.initial_objective))},
                          {"final_objective", number_or_null(round9(s.final_objective))},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"message", s.message}});
    }
    j["starts"] = starts;
    return j.dump(2);
}

FitResult fit_from_json(const std::string& text)
{
    const json j = json::parse(text);
    FitResult fit;
    fit.spec = spec_from(j.at("spec"));
    fit.estimate = theta_from(j.at("theta"));
    const auto num = [&](const char* key) {
        const json& v = j.at(key);
        return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
    };
    fit.total_loglik = num("log_lik");
    fit.independence_loglik = num("log_lik_indep");
    fit.gdp_loglik = num("log_lik_gdp");
    fit.aic = num("aic");
    fit.bic = num("bic");
    fit.objective = num("weighted_objective");
    fit.n_params = j.at("n_params").get<std::size_t>();
    fit.n_obs = j.at("n_obs").get<std::size_t>();
    fit.converged = j.value("converged", false);
    fit.iterations = j.value("iterations", std::size_t{0});
    fit.status = j.value("status", std::string());
    for (const auto& [k, v] : j.at("parameters").items()) {
        fit.parameter_names.push_back(k);
        fit.parameter_values.push_back(v.get<double>());
    }
    fit.estimate.validate(fit.spec);
    return fit;
}

void write_fit_json(const fs::path& path, const FitResult& fit)
{
    auto out = open_output(path);
    out << fit_to_json(fit) << '\n';
}

FitResult read_fit_json(const fs::path& path) { return fit_from_json(slurp(path)); }

void write_states_csv(const fs::path& path, const ObservationPanel& panel, const FilterResult& fr)
{
    auto out = open_output(path);
    out << "month,state,predicted,filtered\n";
    for (std::size_t t = 0; t < fr.filtered_states.size(); ++t) {
        for (std::size_t j = 0; j < kStateDim; ++j) {
            out << panel.months[t].str() << ',' << state_name(j) << ',' << format_number(fr.predicted_states[t][j])
                << ',' << format_number(fr.filtered_states[t][j]) << '\n';
        }
    }
}

void write_params_csv(const fs::path& path, const ObservationPanel& panel, const FilterResult& fr)
{
    auto out = open_output(path);
    out << "month,series,location,scale,shape\n";
    const char* names[2] = {"gdp", "related"};
    for (std::size_t t = 0; t < fr.predicted_params.size(); ++t) {
        for (int s = 0; s < 2; ++s) {
            const ASTParams& p = fr.predicted_params[t][s];
            out << panel.months[t].str() << ',' << names[s] << ',' << format_number(p.location) << ','
                << format_number(p.scale) << ',' << format_number(p.shape) << '\n';
        }
    }
}

void write_scores_csv(const fs::path& path, const ObservationPanel& panel, const FilterResult& fr)
{
    auto out = open_output(path);
    out << "month,state,scaled_score\n";
    for (std::size_t t = 0; t < fr.scaled_scores.size(); ++t) {
        for (std::size_t j = 0; j < kStateDim; ++j) {
            out << panel.months[t].str() << ',' << state_name(j) << ',' << format_number(fr.scaled_scores[t][j])
                << '\n';
        }
    }
}

void write_density_csv(const fs::path& path, const DensityNowcast& d)
{
    auto out = open_output(path);
    out << "x,density\n";
    for (std::size_t k = 0; k < d.grid.x.size(); ++k) {
        out << format_number(d.grid.x[k]) << ',' << format_number(d.grid.density[k]) << '\n';
    }
}

std::string nowcast_summary_json(const DensityNowcast& d)
{
    json j;
    j["quarter"] = d.target.str();
    j["step"] = d.step;
    j["mean"] = round9(d.mean);
    j["median"] = round9(interval(d, 0.0).lo);
    json bands = json::array();
    for (const auto& b : d.percentiles) {
        bands.push_back({{"coverage", b.coverage}, {"lo", round9(b.lo)}, {"hi", round9(b.hi)}});
    }
    j["intervals"] = bands;
    j["n_draws"] = d.n_draws;
    j["seed"] = d.seed;
    return j.dump(2);
}

void write_nowcast_json(const fs::path& path, const DensityNowcast& d)
{
    auto out = open_output(path);
    out << nowcast_summary_json(d) << '\n';
}

void write_fan_chart_csv(const fs::path& path, const std::vector<BacktestEntry>& entries, const std::string& model)
{
    auto out = open_output(path);
    out << "quarter,step,mean,lo90,hi90,realized\n";
    for (const auto& e : entries) {
        if (e.model != model) continue;
        out << e.quarter.str() << ',' << e.step << ',' << format_number(e.mean) << ',' << format_number(e.lo90) << ','
            << format_number(e.hi90) << ',' << format_number(e.realized) << '\n';
    }
}

void write_panel_csv(const fs::path& path, const ObservationPanel& panel)
{
    auto out = open_output(path);
    out << "month,gdp,related\n";
    for (std::size_t t = 0; t < panel.size(); ++t) {
        out << panel.months[t].str() << ',';
        if (panel.observed(0, t)) out << format_number(panel.y[0][t]);
        out << ',';
        if (panel.observed(1, t)) out << format_number(panel.y[1][t]);
        out << '\n';
    }
}

}  // namespace skewnow
