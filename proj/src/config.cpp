#include "config.hpp"

#include <json.hpp>

#include "errors.hpp"

namespace boostq::config {
namespace {

using nlohmann::json;

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::parse, "invalid JSON");
    return j;
}

double need_num(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        fail(ErrorCode::parse, std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

std::vector<double> need_array(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        fail(ErrorCode::parse, std::string("missing array field '") + key + "'");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) fail(ErrorCode::parse, std::string("non-numeric entry in '") + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

SizeDistribution dist_from(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        fail(ErrorCode::parse, "distribution needs a 'type' field");
    std::string type = j["type"].get<std::string>();
    try {
        if (type == "deterministic") return SizeDistribution::deterministic(need_num(j, "value"));
        if (type == "exponential") return SizeDistribution::exponential(need_num(j, "rate"));
        if (type == "uniform")
            return SizeDistribution::uniform(need_num(j, "lo"), need_num(j, "hi"));
        if (type == "hyperexp")
            return SizeDistribution::hyperexponential(need_array(j, "probs"),
                                                      need_array(j, "rates"));
        if (type == "bounded_lomax") {
            if (j.contains("scale"))
                return SizeDistribution::bounded_lomax(need_num(j, "shape"), need_num(j, "scale"),
                                                       need_num(j, "bound"));
            return SizeDistribution::bounded_lomax_mean(need_num(j, "shape"), need_num(j, "bound"),
                                                        need_num(j, "mean"));
        }
        if (type == "empirical") return SizeDistribution::empirical(need_array(j, "samples"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse) throw;
        fail(ErrorCode::parse, std::string("bad distribution parameters: ") + e.what());
    }
    fail(ErrorCode::parse, "unknown distribution type '" + type + "'");
}

LabelSizeModel model_from(const json& j) {
    if (j.is_object() && j.contains("labels")) {
        if (!j["labels"].is_array() || j["labels"].empty())
            fail(ErrorCode::parse, "'labels' must be a nonempty array");
        std::vector<LabelSizeModel::LabelClass> classes;
        for (const auto& c : j["labels"]) {
            if (!c.is_object() || !c.contains("dist"))
                fail(ErrorCode::parse, "each label needs 'p' and 'dist'");
            classes.push_back({need_num(c, "p"), dist_from(c["dist"])});
        }
        try {
            return LabelSizeModel::finite_labels(std::move(classes));
        } catch (const Error& e) {
            fail(ErrorCode::parse, std::string("bad label model: ") + e.what());
        }
    }
    return LabelSizeModel::full_information(dist_from(j));
}

BoostFunction boost_from(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        fail(ErrorCode::parse, "boost needs a 'type' field");
    std::string type = j["type"].get<std::string>();
    try {
        if (type == "zero") return BoostFunction::zero();
        if (type == "theta_optimal") return BoostFunction::theta_optimal(need_num(j, "theta"));
        if (type == "constant") return BoostFunction::constant(need_num(j, "value"));
        if (type == "table") return BoostFunction::per_label_table(need_array(j, "boosts"));
        if (type == "reciprocal") {
            double scale = need_num(j, "scale");
            if (!(scale > 0)) fail(ErrorCode::parse, "reciprocal scale must be positive");
            return BoostFunction::user_curve([scale](double s) { return scale / s; });
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse) throw;
        fail(ErrorCode::parse, std::string("bad boost parameters: ") + e.what());
    }
    fail(ErrorCode::parse, "unknown boost type '" + type + "'");
}

PolicySpec policy_from(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        fail(ErrorCode::parse, "policy needs a 'type' field");
    std::string type = j["type"].get<std::string>();
    double threshold = j.contains("threshold") && j["threshold"].is_number()
                           ? j["threshold"].get<double>()
                           : kNaN;
    int k = j.contains("k") && j["k"].is_number_integer() ? j["k"].get<int>() : 1;
    try {
        if (type == "fcfs") return PolicySpec::fcfs();
        if (type == "srpt") return PolicySpec::srpt();
        if (type == "boost") {
            if (!j.contains("boost")) fail(ErrorCode::parse, "boost policy needs a 'boost' field");
            bool preemptive = j.value("preemptive", false);
            return PolicySpec::boost_policy(boost_from(j["boost"]), preemptive);
        }
        if (type == "cheat-boost") {
            if (!j.contains("boost")) fail(ErrorCode::parse, "cheat-boost needs a 'boost' field");
            return PolicySpec::cheat_boost(boost_from(j["boost"]));
        }
        if (type == "nudge") return PolicySpec::nudge(threshold);
        if (type == "nudge-k") return PolicySpec::nudge_k(k, threshold);
        if (type == "nudge-m") return PolicySpec::nudge_m(k, threshold);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse) throw;
        fail(ErrorCode::parse, std::string("bad policy parameters: ") + e.what());
    }
    fail(ErrorCode::parse, "unknown policy type '" + type + "'");
}

json dist_to(const SizeDistribution& d) {
    json j;
    if (d.is<SizeDistribution::Deterministic>()) {
        j["type"] = "deterministic";
        j["value"] = d.as<SizeDistribution::Deterministic>().value;
    } else if (d.is<SizeDistribution::Exponential>()) {
        j["type"] = "exponential";
        j["rate"] = d.as<SizeDistribution::Exponential>().rate;
    } else if (d.is<SizeDistribution::Uniform>()) {
        const auto& u = d.as<SizeDistribution::Uniform>();
        j["type"] = "uniform";
        j["lo"] = u.lo;
        j["hi"] = u.hi;
    } else if (d.is<SizeDistribution::Hyperexp>()) {
        const auto& h = d.as<SizeDistribution::Hyperexp>();
        j["type"] = "hyperexp";
        j["probs"] = h.probs;
        j["rates"] = h.rates;
    } else if (d.is<SizeDistribution::BoundedLomax>()) {
        const auto& b = d.as<SizeDistribution::BoundedLomax>();
        j["type"] = "bounded_lomax";
        j["shape"] = b.shape;
        j["scale"] = b.scale;
        j["bound"] = b.bound;
    } else {
        j["type"] = "empirical";
        j["samples"] = d.as<SizeDistribution::Empirical>().samples;
    }
    return j;
}

} // namespace

SizeDistribution dist_from_json(const std::string& text) { return dist_from(parse(text)); }

LabelSizeModel model_from_json(const std::string& text) { return model_from(parse(text)); }

BoostFunction boost_from_json(const std::string& text) { return boost_from(parse(text)); }

PolicySpec policy_from_json(const std::string& text) { return policy_from(parse(text)); }

std::string dist_to_json(const SizeDistribution& dist) { return dist_to(dist).dump(); }

std::string model_to_json(const LabelSizeModel& model) {
    if (model.full_info()) return dist_to(model.full_info_dist()).dump();
    json labels = json::array();
    for (std::size_t i = 0; i < model.label_count(); ++i) {
        const auto& c = model.label_class(i);
        labels.push_back({{"p", c.prob}, {"dist", dist_to(c.dist)}});
    }
    return json{{"labels", labels}}.dump();
}

} // namespace boostq::config
