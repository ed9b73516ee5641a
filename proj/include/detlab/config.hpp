/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_CONFIG_HPP
#define DETLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detlab/adapt.hpp"
#include "detlab/errors.hpp"
#include "detlab/simkit.hpp"

namespace detlab {

enum class Command { Ber, Per, Learn, Gap };

inline Command command_from_name(const std::string& s) {
    if (s == "ber")
        return Command::Ber;
    if (s == "per")
        return Command::Per;
    if (s == "learn")
        return Command::Learn;
    if (s == "gap")
        return Command::Gap;
    throw ValidationError("unknown command '" + s + "' (ber|per|learn|gap)");
}

inline std::string to_string(Command c) {
    switch (c) {
    case Command::Ber: return "ber";
    case Command::Per: return "per";
    case Command::Learn: return "learn";
    default: return "gap";
    }
}

struct LearnSpec {
    int m_tx = 2;
    int n_rx = 2;
    double snr_db = 20.0;
    AdaptAlgo algo = AdaptAlgo::Rls;
    LearnParams params;
    int n_train = 1000;
    int n_ensemble = 500;
    std::uint64_t seed = 1;
    int workers = 0;
};

struct GapSpec {
    std::string curve_a;
    std::string curve_b;
    double ber_target = 1e-3;
};

struct RunConfig {
    Command command = Command::Ber;
    SweepSpec sweep;
    LearnSpec learn;
    GapSpec gap;
    std::string output_path = "result.csv";
};

namespace detail {

struct KeyValue {
    std::string value;
    std::size_t line;
};

inline std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const std::size_t a = s.find_first_not_of(ws);
    if (a == std::string::npos)
        return "";
    const std::size_t b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        // run
        "command", "out", "seed", "workers",
        // sweep
        "detector", "m_tx", "n_rx", "constellation", "snr_db", "target_errors", "max_trials",
        "channel", "fading", "n_fft", "cp_len", "tau_rms_ns", "payload_bits", "n_train",
        // adapt
        "algo", "mu", "lambda", "pi0", "n_ensemble", "probe_symbols",
        // gap
        "curve_a", "curve_b", "ber_target"};
    return keys;
}

inline const std::set<std::string>& known_config_sections() {
    static const std::set<std::string> sections = {"run", "sweep", "ofdm", "adapt", "gap"};
    return sections;
}

/// Key-value lines with optional [section] headers and # comments.
/// Sections are organizational only; keys are globally unique.
inline std::map<std::string, KeyValue> tokenize_config(const std::string& text) {
    std::map<std::string, KeyValue> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!known_config_sections().count(name))
                throw ParseError("line " + std::to_string(lineno) + ": unknown section '" + name +
                                 "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        if (!known_config_keys().count(key))
            throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = {value, lineno};
    }
    return kv;
}

inline long long parse_int(const std::string& key, const KeyValue& kv) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(kv.value, &pos);
    } catch (const std::exception&) {
        throw ValidationError("key '" + key + "': expected integer, got '" + kv.value + "'");
    }
    if (pos != kv.value.size())
        throw ValidationError("key '" + key + "': expected integer, got '" + kv.value + "'");
    return v;
}

inline double parse_real(const std::string& key, const KeyValue& kv) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(kv.value, &pos);
    } catch (const std::exception&) {
        throw ValidationError("key '" + key + "': expected number, got '" + kv.value + "'");
    }
    if (pos != kv.value.size())
        throw ValidationError("key '" + key + "': expected number, got '" + kv.value + "'");
    return v;
}

inline std::vector<double> parse_real_list(const std::string& key, const KeyValue& kv) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(kv.value);
    std::string norm = kv.value;
    for (char& ch : norm)
        if (ch == ',')
            ch = ' ';
    std::istringstream nin(norm);
    while (nin >> item)
        out.push_back(parse_real(key, KeyValue{item, kv.line}));
    if (out.empty())
        throw ValidationError("key '" + key + "': expected at least one number");
    return out;
}

} // namespace detail

/// Parse and validate a config document; defaults are filled for every
/// key the document omits and echoed later in the run metadata.
inline RunConfig parse_config(const std::string& text) {
    auto kv = detail::tokenize_config(text);
    RunConfig cfg;

    auto take = [&](const char* key) -> const detail::KeyValue* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = take("command"))
        cfg.command = command_from_name(v->value);
    else
        throw ValidationError("missing required key 'command' (ber|per|learn|gap)");
    if (const auto* v = take("out"))
        cfg.output_path = v->value;

    SweepSpec& sw = cfg.sweep;
    LearnSpec& ln = cfg.learn;

    if (const auto* v = take("seed")) {
        const long long s = detail::parse_int("seed", *v);
        if (s < 0)
            throw ValidationError("key 'seed': must be >= 0");
        sw.seed = static_cast<std::uint64_t>(s);
        ln.seed = sw.seed;
    }
    if (const auto* v = take("workers")) {
        const long long w = detail::parse_int("workers", *v);
        if (w < 0)
            throw ValidationError("key 'workers': must be >= 0 (0 = auto)");
        sw.workers = static_cast<int>(w);
        ln.workers = sw.workers;
    }
    if (const auto* v = take("m_tx")) {
        const long long m = detail::parse_int("m_tx", *v);
        if (m < 1)
            throw ValidationError("key 'm_tx': must be >= 1");
        sw.m_tx = static_cast<int>(m);
        ln.m_tx = sw.m_tx;
    }
    if (const auto* v = take("n_rx")) {
        const long long n = detail::parse_int("n_rx", *v);
        if (n < 1)
            throw ValidationError("key 'n_rx': must be >= 1");
        sw.n_rx = static_cast<int>(n);
        ln.n_rx = sw.n_rx;
    }
    if (const auto* v = take("constellation")) {
        sw.constellation = Constellation::by_name(v->value).name;
        ln.params.constellation = sw.constellation;
    }
    if (const auto* v = take("detector"))
        sw.detector = detector_from_name(v->value);
    std::vector<double> snr_list;
    if (const auto* v = take("snr_db"))
        snr_list = detail::parse_real_list("snr_db", *v);
    if (const auto* v = take("target_errors")) {
        const long long t = detail::parse_int("target_errors", *v);
        if (t < 1)
            throw ValidationError("key 'target_errors': must be >= 1");
        sw.target_errors = static_cast<std::uint64_t>(t);
    }
    if (const auto* v = take("max_trials")) {
        const long long t = detail::parse_int("max_trials", *v);
        if (t < 1)
            throw ValidationError("key 'max_trials': must be >= 1");
        sw.max_trials = static_cast<std::uint64_t>(t);
    }
    if (const auto* v = take("channel")) {
        if (v->value == "flat")
            sw.channel = ChannelModel::Flat;
        else if (v->value == "ofdm_tapped")
            sw.channel = ChannelModel::OfdmTapped;
        else
            throw ValidationError("key 'channel': expected flat|ofdm_tapped");
    }
    if (const auto* v = take("n_fft")) {
        sw.ofdm.n_fft = static_cast<int>(detail::parse_int("n_fft", *v));
    }
    if (const auto* v = take("cp_len")) {
        sw.ofdm.cp_len = static_cast<int>(detail::parse_int("cp_len", *v));
    }
    if (const auto* v = take("tau_rms_ns")) {
        sw.tau_rms_ns = detail::parse_real("tau_rms_ns", *v);
        if (sw.tau_rms_ns < 0)
            throw ValidationError("key 'tau_rms_ns': must be >= 0");
    }
    if (const auto* v = take("payload_bits")) {
        const long long p = detail::parse_int("payload_bits", *v);
        if (p < 1)
            throw ValidationError("key 'payload_bits': must be >= 1");
        sw.payload_bits = static_cast<int>(p);
    }
    if (const auto* v = take("n_train")) {
        const long long t = detail::parse_int("n_train", *v);
        if (t < 0)
            throw ValidationError("key 'n_train': must be >= 0");
        sw.n_train = static_cast<int>(t);
        ln.n_train = static_cast<int>(t);
    }
    if (const auto* v = take("algo"))
        ln.algo = adapt_algo_from_name(v->value);
    if (const auto* v = take("mu")) {
        ln.params.mu = detail::parse_real("mu", *v);
        if (!(ln.params.mu > 0))
            throw ValidationError("key 'mu': must be > 0");
    }
    if (const auto* v = take("lambda")) {
        ln.params.lambda = detail::parse_real("lambda", *v);
        if (!(ln.params.lambda > 0) || ln.params.lambda > 1)
            throw ValidationError("key 'lambda': must be in (0, 1]");
    }
    if (const auto* v = take("pi0")) {
        ln.params.pi0 = detail::parse_real("pi0", *v);
        if (!(ln.params.pi0 > 0))
            throw ValidationError("key 'pi0': must be > 0");
    }
    if (const auto* v = take("n_ensemble")) {
        const long long n = detail::parse_int("n_ensemble", *v);
        if (n < 1)
            throw ValidationError("key 'n_ensemble': must be >= 1");
        ln.n_ensemble = static_cast<int>(n);
    }
    if (const auto* v = take("probe_symbols")) {
        const long long n = detail::parse_int("probe_symbols", *v);
        if (n < 1)
            throw ValidationError("key 'probe_symbols': must be >= 1");
        ln.params.probe_symbols = static_cast<int>(n);
    }
    if (const auto* v = take("curve_a"))
        cfg.gap.curve_a = v->value;
    if (const auto* v = take("curve_b"))
        cfg.gap.curve_b = v->value;
    if (const auto* v = take("ber_target")) {
        cfg.gap.ber_target = detail::parse_real("ber_target", *v);
        if (!(cfg.gap.ber_target > 0) || cfg.gap.ber_target >= 1)
            throw ValidationError("key 'ber_target': must be in (0, 1)");
    }

    // Mode follows the command; an explicit 'fading' key must agree.
    sw.mode = cfg.command == Command::Per ? SweepMode::QuasiStaticPer : SweepMode::FastFadingBer;
    if (const auto* v = take("fading")) {
        if (v->value == "fast") {
            if (cfg.command == Command::Per)
                throw ValidationError("key 'fading': the per command is quasi_static");
        } else if (v->value == "quasi_static") {
            if (cfg.command == Command::Ber)
                throw ValidationError("key 'fading': the ber command is fast fading");
        } else {
            throw ValidationError("key 'fading': expected fast|quasi_static");
        }
    }

    switch (cfg.command) {
    case Command::Ber:
    case Command::Per:
        if (snr_list.empty())
            throw ValidationError("missing required key 'snr_db'");
        sw.snr_points_db = snr_list;
        try {
            detail::validate_spec(sw); // full detector/antenna/ofdm legality
        } catch (const ConfigError& e) {
            throw ValidationError(e.what());
        } catch (const CpTooShort& e) {
            throw ValidationError(e.what());
        }
        break;
    case Command::Learn:
        if (snr_list.size() > 1)
            throw ValidationError("key 'snr_db': the learn command takes a single value");
        if (!snr_list.empty())
            ln.snr_db = snr_list[0];
        if (ln.m_tx > ln.n_rx)
            throw ValidationError("learn: m_tx must be <= n_rx");
        break;
    case Command::Gap:
        if (cfg.gap.curve_a.empty() || cfg.gap.curve_b.empty())
            throw ValidationError("gap: both 'curve_a' and 'curve_b' are required");
        break;
    }
    return cfg;
}

} // namespace detlab

#endif // DETLAB_CONFIG_HPP
