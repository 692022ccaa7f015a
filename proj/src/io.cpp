#include "fitchoice/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fitchoice/rng.hpp"

namespace fitchoice::io {

namespace {

Json optional_id(const std::optional<VertexId>& v) {
    return v ? Json(*v) : Json(nullptr);
}

std::optional<VertexId> id_from(const nlohmann::json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<VertexId>();
}

// NaN is written as null.
double real_from(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::Exponent: return "exponent";
        case Normalization::LogCorrected: return "M_ln_n_over_n";
        case Normalization::Linear: return "M_over_n";
    }
    return "unknown";
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    }
    return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + p.string());
    }
    return is;
}

std::filesystem::path replica_path(const std::filesystem::path& dir, int i) {
    std::array<char, 32> name{};
    std::snprintf(name.data(), name.size(), "replica_%04d.jsonl", i);
    return dir / "replicas" / name.data();
}

}  // namespace

std::string format_real(double x) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format real");
    }
    return {buf.data(), end};
}

Json checkpoint_to_json(const Checkpoint& cp) {
    Json j;
    j["n"] = cp.n;
    j["M"] = cp.M;
    j["M1"] = cp.M1;
    j["Mlambda"] = cp.Mlambda;
    j["X"] = cp.X;
    j["Z"] = cp.Z;
    j["hub_low"] = optional_id(cp.hub_low);
    j["hub_high"] = optional_id(cp.hub_high);
    j["L1_at_max"] = cp.L1_at_max;
    j["Llambda_at_max"] = cp.Llambda_at_max;
    return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    Checkpoint cp;
    cp.n = j.at("n").get<std::int64_t>();
    cp.M = j.at("M").get<std::int64_t>();
    cp.M1 = j.at("M1").get<std::int64_t>();
    cp.Mlambda = j.at("Mlambda").get<std::int64_t>();
    cp.X = real_from(j.at("X"));
    cp.Z = real_from(j.at("Z"));
    cp.hub_low = id_from(j.at("hub_low"));
    cp.hub_high = id_from(j.at("hub_high"));
    cp.L1_at_max = j.at("L1_at_max").get<std::int64_t>();
    cp.Llambda_at_max = j.at("Llambda_at_max").get<std::int64_t>();
    return cp;
}

std::string serialize_checkpoint(const Checkpoint& cp) {
    return checkpoint_to_json(cp).dump();
}

Checkpoint parse_checkpoint(std::string_view line) {
    return checkpoint_from_json(nlohmann::json::parse(line));
}

void write_jsonl(std::ostream& os, std::span<const Checkpoint> trajectory) {
    for (const auto& cp : trajectory) {
        os << serialize_checkpoint(cp) << '\n';
    }
    if (!os) {
        throw std::runtime_error("write failed");
    }
}

std::vector<Checkpoint> read_jsonl(std::istream& is) {
    std::vector<Checkpoint> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty()) {
            out.push_back(parse_checkpoint(line));
        }
    }
    return out;
}

void write_stats_csv(std::ostream& os, std::span<const CheckpointStats> stats) {
    os << "n,stat_name,value\n";
    for (const auto& row : stats) {
        for (const Quantity q : kQuantities) {
            const Summary& s = row[q];
            const std::string base = to_string(q);
            const std::array<std::pair<const char*, double>, 6> fields{{{"mean", s.mean},
                                                                        {"min", s.min},
                                                                        {"max", s.max},
                                                                        {"q05", s.q05},
                                                                        {"q50", s.q50},
                                                                        {"q95", s.q95}}};
            for (const auto& [name, value] : fields) {
                os << row.n << ',' << base << '.' << name << ',' << format_real(value) << '\n';
            }
        }
    }
    if (!os) {
        throw std::runtime_error("write failed");
    }
}

Json report_to_json(const RegimeReport& report, std::span<const ReplicaSummary> replicas) {
    Json j;
    j["regime"] = to_string(report.regime);
    j["x_star"] = report.x_star ? Json(*report.x_star) : Json(nullptr);
    j["exponent_fit"] = {{"slope", report.exponent_fit.slope},
                         {"stderr", report.exponent_fit.stderr_slope},
                         {"points", report.exponent_fit.points}};
    j["band"] = {{"normalization", to_string(report.band.normalization)},
                 {"lower", report.band.lower},
                 {"upper", report.band.upper}};
    Json verdicts = Json::array();
    for (const auto& v : report.verdicts) {
        verdicts.push_back({{"name", v.name},
                            {"observed", v.observed},
                            {"lower", v.lower},
                            {"upper", v.upper},
                            {"pass", v.pass}});
    }
    j["verdicts"] = std::move(verdicts);
    Json reps = Json::array();
    for (const auto& r : replicas) {
        reps.push_back({{"seed", r.seed},
                        {"slope", r.fit.slope},
                        {"stderr", r.fit.stderr_slope},
                        {"points", r.fit.points},
                        {"hub_stable_since", r.hub_stable_since},
                        {"unique_leader_fraction", r.unique_leader_fraction}});
    }
    j["replicas"] = std::move(reps);
    return j;
}

void RunConfig::override_with(const RunConfig& o) {
    auto take = [](auto& mine, const auto& theirs) {
        if (theirs) {
            mine = theirs;
        }
    };
    take(beta, o.beta);
    take(d, o.d);
    take(lambda, o.lambda);
    take(p_lambda, o.p_lambda);
    take(steps, o.steps);
    take(replicas, o.replicas);
    take(seed, o.seed);
    take(schedule_ratio, o.schedule_ratio);
    take(out, o.out);
    take(formats, o.formats);
    take(parallelism, o.parallelism);
}

ModelParams RunConfig::model_params() const {
    auto need = [](const auto& v, const char* flag) {
        if (!v) {
            throw ValidationError(std::string("missing required parameter ") + flag);
        }
        return *v;
    };
    const double b = need(beta, "--beta");
    const int dd = need(d, "--d");
    const double l = need(lambda, "--lambda");
    const double p = need(p_lambda, "--p-lambda");
    return ModelParams(b, dd, l, p);
}

EnsembleSpec RunConfig::ensemble_spec() const {
    EnsembleSpec spec{model_params(), 1, 2, 0, {}, 1};
    spec.replicas = replicas.value_or(1);
    spec.target_edges = steps.value_or(10000);
    spec.master_seed = seed.value_or(0);
    spec.schedule.ratio = schedule_ratio.value_or(1.2);
    spec.parallelism = parallelism.value_or(default_parallelism());
    spec.validate();
    return spec;
}

std::set<Format> parse_formats(std::string_view list) {
    std::set<Format> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = std::min(list.find(',', start), list.size());
        const auto item = list.substr(start, comma - start);
        if (item == "jsonl") {
            out.insert(Format::Jsonl);
        } else if (item == "csv") {
            out.insert(Format::Csv);
        } else {
            throw ValidationError("format must be a subset of {jsonl, csv} (got '" +
                                  std::string(item) + "')");
        }
        start = comma + 1;
    }
    return out;
}

RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ValidationError("config must be a JSON object");
    }
    RunConfig c;
    try {
        auto read = [&j](const char* key, auto& field) {
            if (j.contains(key) && !j.at(key).is_null()) {
                field = j.at(key).get<typename std::remove_reference_t<decltype(field)>::value_type>();
            }
        };
        read("beta", c.beta);
        read("d", c.d);
        read("lambda", c.lambda);
        read("p_lambda", c.p_lambda);
        read("steps", c.steps);
        read("replicas", c.replicas);
        read("seed", c.seed);
        read("schedule_ratio", c.schedule_ratio);
        read("out", c.out);
        read("parallelism", c.parallelism);
        if (j.contains("formats")) {
            std::string joined;
            for (const auto& f : j.at("formats")) {
                joined += (joined.empty() ? "" : ",") + f.get<std::string>();
            }
            c.formats = parse_formats(joined);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    auto is = open_in(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

Json manifest_to_json(const EnsembleManifest& m) {
    Json j;
    j["beta"] = m.params.beta();
    j["d"] = m.params.d();
    j["lambda"] = m.params.lambda();
    j["p_lambda"] = m.params.p_lambda();
    j["replicas"] = m.replicas;
    j["steps"] = m.target_edges;
    j["seed"] = m.master_seed;
    Json sched;
    sched["ratio"] = m.schedule.ratio;
    sched["extra"] = m.schedule.extra;
    sched["dense"] = m.schedule.dense ? Json::array({m.schedule.dense->first, m.schedule.dense->second})
                                      : Json(nullptr);
    sched["points"] = m.points;
    j["schedule"] = std::move(sched);
    return j;
}

EnsembleManifest manifest_from_json(const nlohmann::json& j) {
    const ModelParams params(j.at("beta").get<double>(), j.at("d").get<int>(),
                             j.at("lambda").get<double>(), j.at("p_lambda").get<double>());
    EnsembleManifest m{params,
                       j.at("replicas").get<int>(),
                       j.at("steps").get<std::int64_t>(),
                       j.at("seed").get<std::uint64_t>(),
                       {},
                       {}};
    const auto& s = j.at("schedule");
    m.schedule.ratio = s.at("ratio").get<double>();
    m.schedule.extra = s.at("extra").get<std::vector<std::int64_t>>();
    if (!s.at("dense").is_null()) {
        m.schedule.dense = {s.at("dense").at(0).get<std::int64_t>(),
                            s.at("dense").at(1).get<std::int64_t>()};
    }
    m.points = s.at("points").get<std::vector<std::int64_t>>();
    return m;
}

void write_ensemble_output(const std::filesystem::path& dir, const EnsembleSpec& spec,
                           const EnsembleResult& result, const std::set<Format>& formats) {
    std::filesystem::create_directories(dir);
    const EnsembleManifest manifest{spec.params,      spec.replicas,
                                    spec.target_edges, spec.master_seed,
                                    spec.schedule,    spec.schedule.points(1, spec.target_edges)};
    {
        auto os = open_out(dir / "config.json");
        os << manifest_to_json(manifest).dump(2) << '\n';
    }
    {
        auto os = open_out(dir / "report.json");
        os << report_to_json(result.report, result.replicas).dump(2) << '\n';
    }
    if (formats.contains(Format::Jsonl)) {
        std::filesystem::create_directories(dir / "replicas");
        for (std::size_t i = 0; i < result.streams.size(); ++i) {
            auto os = open_out(replica_path(dir, static_cast<int>(i)));
            write_jsonl(os, result.streams[i]);
        }
    }
    if (formats.contains(Format::Csv)) {
        auto os = open_out(dir / "stats.csv");
        write_stats_csv(os, result.stats);
    }
}

LoadedEnsemble load_ensemble_output(const std::filesystem::path& dir) {
    auto cfg = open_in(dir / "config.json");
    LoadedEnsemble out{manifest_from_json(nlohmann::json::parse(cfg)), {}};
    for (int i = 0; i < out.manifest.replicas; ++i) {
        const auto path = replica_path(dir, i);
        if (!std::filesystem::exists(path)) {
            throw std::runtime_error("missing trajectory " + path.string() +
                                     " (was the ensemble written without jsonl?)");
        }
        auto is = open_in(path);
        out.streams.push_back(read_jsonl(is));
        std::vector<std::int64_t> ns;
        for (const auto& cp : out.streams.back()) {
            ns.push_back(cp.n);
        }
        if (ns != out.manifest.points) {
            throw std::runtime_error("trajectory " + path.string() +
                                     " does not follow the recorded schedule");
        }
    }
    return out;
}

Json analyze_directory(const std::filesystem::path& dir) {
    auto loaded = load_ensemble_output(dir);
    const auto& m = loaded.manifest;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < m.replicas; ++i) {
        seeds.push_back(replica_seed(m.master_seed, static_cast<std::uint64_t>(i)));
    }
    const auto result = aggregate(m.params, std::move(loaded.streams), seeds);
    return report_to_json(result.report, result.replicas);
}

}  // namespace fitchoice::io
