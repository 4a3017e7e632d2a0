#include "cli.hpp"

#include "tvws/aggregator.hpp"
#include "tvws/bandplan.hpp"
#include "tvws/detect.hpp"
#include "tvws/error.hpp"
#include "tvws/scene.hpp"
#include "tvws/sensor_service.hpp"
#include "tvws/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace tvws::cli {
namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "471250000" as well as "471.25e6", as long as the value is a whole
// number of Hz.
Hz parse_hz(const std::string& text, const char* flag) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v) || std::fabs(v) > 9.0e18 || std::round(v) != v) {
        throw UsageError(std::string(flag) + ": '" + text + "' is not a whole number of Hz");
    }
    // Re-parse integers exactly; doubles lose precision above 2^53.
    if (text.find_first_of(".eE") == std::string::npos) {
        return std::stoll(text);
    }
    return static_cast<Hz>(v);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("WS_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0') {
            throw UsageError(std::string("WS_SEED: '") + env + "' is not an integer");
        }
        return v;
    }
    return 0;
}

struct SweepFlags {
    std::string f_min = "471250000";
    std::string f_max = "863250000";
    std::string step = "250000";
    double dwell = kDefaultDwellSeconds;

    void add(CLI::App& app) {
        app.add_option("--f-min", f_min, "Sweep start in Hz")->capture_default_str();
        app.add_option("--f-max", f_max, "Sweep end in Hz (exclusive)")->capture_default_str();
        app.add_option("--step", step, "Sweep step (SS) in Hz")->capture_default_str();
        app.add_option("--dwell", dwell, "Dwell time per step in seconds")->capture_default_str();
    }

    SweepConfig resolve() const {
        return {parse_hz(f_min, "--f-min"), parse_hz(f_max, "--f-max"), parse_hz(step, "--step"),
                dwell};
    }
};

struct FrontEndFlags {
    std::string scene;
    std::string mode = "analytic";
    std::string sample_rate = "4000000";
    double jitter = 0.0;
    std::optional<std::uint64_t> seed;
    std::string only_kind;
    std::string sensor_id = "local";

    void add(CLI::App& app) {
        app.add_option("--scene", scene, "Scene JSON file")->required();
        app.add_option("--mode", mode, "Front-end mode")
            ->check(CLI::IsMember({"analytic", "iq"}))
            ->capture_default_str();
        app.add_option("--sample-rate", sample_rate, "IQ sample rate in Hz")->capture_default_str();
        app.add_option("--jitter", jitter, "Analytic-mode jitter sigma in dB")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app.add_option("--seed", seed, "Front-end seed (falls back to $WS_SEED, then 0)");
        app.add_option("--only-kind", only_kind, "Keep only emitters of this kind")
            ->check(CLI::IsMember({"wideband_tv", "narrowband_incumbent"}));
        app.add_option("--sensor-id", sensor_id, "Sensor id stamped on the record")
            ->capture_default_str();
    }

    FrontEndConfig resolve(Hz measurement_bandwidth) const {
        FrontEndConfig fe;
        fe.mode = mode == "iq" ? FrontEndMode::iq : FrontEndMode::analytic;
        fe.measurement_bandwidth = measurement_bandwidth;
        fe.sample_rate = parse_hz(sample_rate, "--sample-rate");
        fe.jitter_sigma_db = jitter;
        fe.seed = resolve_seed(seed);
        return fe;
    }

    std::shared_ptr<const Scene> load() const {
        Scene s = load_scene_file(scene);
        if (only_kind == "wideband_tv") {
            s = s.only(EmitterKind::wideband_tv);
        } else if (only_kind == "narrowband_incumbent") {
            s = s.only(EmitterKind::narrowband_incumbent);
        }
        return std::make_shared<const Scene>(std::move(s));
    }
};

nlohmann::ordered_json sweep_json(const SweepConfig& s) {
    return {{"f_min_hz", s.f_min}, {"f_max_hz", s.f_max}, {"step_hz", s.step}, {"dwell_s", s.dwell_s}};
}

nlohmann::ordered_json frontend_json(const FrontEndFlags& flags, const FrontEndConfig& fe) {
    nlohmann::ordered_json j;
    j["scene"] = flags.scene;
    if (!flags.only_kind.empty()) {
        j["only_kind"] = flags.only_kind;
    }
    j["mode"] = flags.mode;
    if (fe.mode == FrontEndMode::iq) {
        j["sample_rate_hz"] = fe.sample_rate;
    } else {
        j["jitter_sigma_db"] = fe.jitter_sigma_db;
    }
    j["seed"] = fe.seed;
    return j;
}

// Output goes to the --out file when given, otherwise to `fallback`.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) {
                throw Error("cannot open " + path + " for writing");
            }
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }
    bool is_file() const { return file_.is_open(); }
    void finish() {
        stream_->flush();
        if (!*stream_) {
            throw Error("write failed");
        }
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void echo_config(std::ostream& out, const nlohmann::ordered_json& config) {
    out << "# config: " << config.dump() << '\n';
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            parts.push_back(item);
        }
    }
    return parts;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"TV white space sensing: sweep, classify, serve, poll, compare", "tvws"};
    app.require_subcommand(1, 1);

    // sweep
    SweepFlags sweep_flags;
    FrontEndFlags fe_flags;
    std::string out_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run one sweep and write the power samples as CSV");
    sweep_flags.add(*sweep_cmd);
    fe_flags.add(*sweep_cmd);
    sweep_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

    // channels
    std::string channel_width = "8000000";
    std::string free_out;
    auto* channels_cmd =
        app.add_subcommand("channels", "Sweep, threshold and classify every channel");
    sweep_flags.add(*channels_cmd);
    fe_flags.add(*channels_cmd);
    channels_cmd->add_option("--channel-width", channel_width, "Channel width in Hz")
        ->capture_default_str();
    channels_cmd->add_option("--out", out_path, "Decisions CSV (default: stdout)");
    channels_cmd->add_option("--free-out", free_out, "Also write the free channels as JSON");

    // serve
    std::string config_path;
    std::string listen_override;
    std::optional<std::uint64_t> serve_seed;
    auto* serve_cmd = app.add_subcommand("serve", "Run a sensor daemon");
    serve_cmd->add_option("--config", config_path, "Sensor config JSON")->required();
    serve_cmd->add_option("--listen", listen_override, "host:port override");
    serve_cmd->add_option("--seed", serve_seed, "Front-end seed override");

    // poll
    std::string sensors;
    long long timeout_ms = 30'000;
    auto* poll_cmd = app.add_subcommand("poll", "Poll sensors and write a REM snapshot CSV");
    poll_cmd->add_option("--sensors", sensors, "Comma-separated host:port list")->required();
    sweep_flags.add(*poll_cmd);
    poll_cmd->add_option("--channel-width", channel_width, "Channel width in Hz")
        ->capture_default_str();
    poll_cmd->add_option("--timeout-ms", timeout_ms, "Per-sensor timeout")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    poll_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

    // compare
    std::string detected_path;
    std::string reference_path;
    std::size_t total_channels = 49;
    auto* compare_cmd =
        app.add_subcommand("compare", "Compare detected free channels against a reference");
    compare_cmd->add_option("--detected", detected_path, "Detected free channels JSON")->required();
    compare_cmd->add_option("--reference", reference_path, "Reference free channels JSON")
        ->required();
    compare_cmd->add_option("--total-channels", total_channels, "Channels in the band plan")
        ->capture_default_str();

    std::vector<std::string> argv_rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(argv_rest.begin(), argv_rest.end());
    try {
        app.parse(argv_rest);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (sweep_cmd->parsed() || channels_cmd->parsed()) {
            const SweepConfig sweep = sweep_flags.resolve();
            const FrontEndConfig fe = fe_flags.resolve(sweep.step);
            const Hz width = parse_hz(channel_width, "--channel-width");
            sweep.validate();
            std::optional<BandPlan> plan;
            if (channels_cmd->parsed()) {
                plan = make_bandplan(sweep.f_min, sweep.f_max, width);
                samples_per_channel(*plan, sweep.step);
            }

            SimulatedFrontEnd frontend(fe_flags.load(), fe);
            const SweepRecord record = run_sweep(frontend, sweep, fe_flags.sensor_id);

            nlohmann::ordered_json config;
            config["command"] = sweep_cmd->parsed() ? "sweep" : "channels";
            config["sweep"] = sweep_json(sweep);
            if (plan) {
                config["channel_width_hz"] = width;
            }
            config["frontend"] = frontend_json(fe_flags, fe);
            config["sensor_id"] = fe_flags.sensor_id;

            Output sink(out_path, out);
            echo_config(sink.get(), config);
            if (!plan) {
                write_sweep_csv(sink.get(), record);
                sink.finish();
                return 0;
            }
            const Threshold t = compute_threshold(record);
            const auto decisions = classify(record, *plan, t);
            write_decisions_csv(sink.get(), decisions);
            sink.finish();
            const auto free = white_spaces(decisions);
            if (!free_out.empty()) {
                std::ofstream f(free_out, std::ios::binary | std::ios::trunc);
                f << channel_set_to_json(ChannelSet(free.begin(), free.end())) << '\n';
                if (!f) {
                    throw Error("cannot write " + free_out);
                }
            }
            char summary[96];
            std::snprintf(summary, sizeof summary, "white_spaces=%zu gamma_db=%.3f\n", free.size(),
                          t.gamma_db);
            (sink.is_file() ? out : err) << summary;
            return 0;
        }

        if (serve_cmd->parsed()) {
            SensorConfig cfg = load_sensor_config_file(config_path);
            if (!listen_override.empty()) {
                cfg.listen = net::parse_endpoint(listen_override);
            }
            if (serve_seed) {
                cfg.frontend.seed = *serve_seed;
            } else if (std::getenv("WS_SEED") != nullptr) {
                cfg.frontend.seed = resolve_seed(std::nullopt);
            }
            g_stop.store(false);
            struct sigaction sa{};
            sa.sa_handler = on_signal;
            sigemptyset(&sa.sa_mask);
            ::sigaction(SIGINT, &sa, nullptr);
            ::sigaction(SIGTERM, &sa, nullptr);
            serve(cfg, g_stop, &err);
            return 0;
        }

        if (poll_cmd->parsed()) {
            std::vector<net::Endpoint> endpoints;
            for (const auto& s : split_list(sensors)) {
                endpoints.push_back(net::parse_endpoint(s));
            }
            if (endpoints.empty()) {
                throw UsageError("--sensors: no sensor addresses given");
            }
            PollParams params;
            params.sweep = sweep_flags.resolve();
            params.channel_width = parse_hz(channel_width, "--channel-width");
            params.timeout = std::chrono::milliseconds(timeout_ms);
            const RemSnapshot snap = poll_all(endpoints, params);

            nlohmann::ordered_json config;
            config["command"] = "poll";
            config["sensors"] = split_list(sensors);
            config["sweep"] = sweep_json(params.sweep);
            config["channel_width_hz"] = params.channel_width;
            config["timeout_ms"] = timeout_ms;

            Output sink(out_path, out);
            echo_config(sink.get(), config);
            write_rem_csv(sink.get(), snap);
            sink.finish();
            for (const auto& f : snap.sensors_failed) {
                err << "sensor " << f.sensor << " failed: " << f.error << '\n';
            }
            (sink.is_file() ? out : err) << "sensors_ok=" << snap.sensors_ok.size()
                                         << " sensors_failed=" << snap.sensors_failed.size()
                                         << '\n';
            return snap.sensors_ok.empty() ? 1 : 0;
        }

        if (compare_cmd->parsed()) {
            const ComparisonReport r =
                compare(load_channel_set_file(detected_path), load_channel_set_file(reference_path),
                        total_channels);
            const auto list = [](const ChannelSet& s) {
                std::string text;
                for (auto c : s) {
                    text += (text.empty() ? "" : ",") + std::to_string(c);
                }
                return text;
            };
            char ratio[48];
            std::snprintf(ratio, sizeof ratio, "match_ratio=%.4f\n", r.match_ratio);
            out << ratio << "detected_free=" << r.detected_free.size()
                << " reference_free=" << r.reference_free.size()
                << " agreeing=" << r.agreeing.size() << '\n'
                << "only_detected=" << list(r.only_detected) << '\n'
                << "only_reference=" << list(r.only_reference) << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace tvws::cli
