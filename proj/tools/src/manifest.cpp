#include <json.hpp>

#include "ael/evo/engine.hpp"
#include "cli.hpp"

namespace ael::cli {

using nlohmann::json;

std::string manifest_to_json(const RunManifest& m) {
    json doc{
        {"config", json::parse(evo::config_to_json(m.config))},
        {"llm_mode", m.llm_mode},
        {"transcript", m.transcript},
        {"output_dir", m.output_dir},
        {"started_at", m.started_at},
        {"finished_at", m.finished_at},
        {"best", m.best ? json::parse(evo::individual_to_json(*m.best)) : json(nullptr)},
    };
    return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
    try {
        const auto doc = json::parse(text);
        RunManifest m;
        m.config = evo::config_from_json(doc.at("config").dump());
        m.llm_mode = doc.at("llm_mode").get<std::string>();
        m.transcript = doc.at("transcript").get<std::string>();
        m.output_dir = doc.at("output_dir").get<std::string>();
        m.started_at = doc.at("started_at").get<std::string>();
        m.finished_at = doc.at("finished_at").get<std::string>();
        if (!doc.at("best").is_null()) {
            m.best = evo::individual_from_json(doc.at("best").dump());
        }
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("corrupt manifest: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("corrupt manifest: ") + e.what());
    }
}

}  // namespace ael::cli
